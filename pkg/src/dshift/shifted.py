"""Shifted cotangent bundles, twists and symplectic verification.

For a base presentation ``B = k[z_i | D z_i = f_i]`` and a shift ``d`` the
shifted cotangent algebra adds one fiber generator ``y_i`` per base
generator, of degree ``-d - deg z_i``.  The fiber differential is the one
for which the Liouville form ``λ = Σ y_i dz_i`` is ``D``-closed::

    D y_j = -Σ_i (-1)^{|y_i|} y_i M_ij,   D(dz_i) = Σ_j M_ij dz_j.

A potential ``f`` in ``B`` of degree ``1 - d`` twists this to
``D y_i = D_bar y_i + t_i`` with ``df = Σ t_i dz_i``; the standard form
``ω = Σ dy_i ∧ dz_i`` stays closed.

Nondegeneracy of a 2-form is tested through the map ``Φ: L_A^+ -> L_A``
whose ``(i, j)`` entry is the left coefficient of ``dz_j`` in
``ι_{X_i} ω_2``, where ``X_i`` is the vector field dual to ``dz_i``, times
``(-1)^{(d+1) deg z_i}``.  With that sign ``Φ`` is a chain map for every
``d`` and the symmetry sign is ``λ_P = (-1)^{d+1}``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cohom import SliceSpec
from .cotangent import cotangent_complex
from .derham import DeRham, VectorField
from .dgmod import DgMap, DgModule, DualityContext, dagger, dual_map, evaluation_map
from .gca import (Generator, Poly, PresentationError, Report, SemifreeCdga, check_presentation)
from .witt import is_quis, is_symmetric


def fiber_name(name: str) -> str:
    return f"y_{name}"


# ---------------------------------------------------------------------------
# Sym^xi


@dataclass
class TwistData:
    """A semifree ``B``-module ``M`` and a degree-1 map ``ξ: M -> B``.

    ``xi`` maps basis names of ``M`` to elements of ``B``.
    """

    base: SemifreeCdga
    module: DgModule
    xi: dict = field(default_factory=dict)

    def check(self) -> Report:
        rep = Report("twist")
        B = self.base
        for b in self.module.basis:
            v = self.xi.get(b.name)
            if v is None or not v.terms:
                continue
            if v.degree != b.degree + 1:
                rep.fail(f"ξ({b.name}) has degree {v.degree}, expected {b.degree + 1}")
        if not rep.ok:
            return rep
        # chain map M -> B[1]: ξ(D m) = D(ξ m)
        for i, b in enumerate(self.module.basis):
            lhs = B.D(self.xi.get(b.name, B.ring.zero()))
            rhs = B.ring.zero()
            for j, m in self.module.diff[i].items():
                rhs = rhs + m * self.xi.get(self.module.basis[j].name, B.ring.zero())
            if lhs != rhs:
                rep.fail(f"ξ is not a cocycle at {b.name}")
        return rep


def _topological(module: DgModule) -> list:
    """Basis order in which every ``D b`` only uses earlier elements."""
    deps = {i: set(row) for i, row in enumerate(module.diff)}
    order: list = []
    state: dict = {}

    def visit(i):
        if state.get(i) == 1:
            raise PresentationError("module differential is not triangular")
        if state.get(i) == 2:
            return
        state[i] = 1
        for j in sorted(deps[i]):
            visit(j)
        state[i] = 2
        order.append(i)

    for i in range(module.rank):
        visit(i)
    return order


def sym_twisted(t: TwistData, name: str = "") -> SemifreeCdga:
    """``Sym_B M`` with ``D y_i = Σ_j M_ij y_j + ξ(y_i)``, generators ``y_i`` of weight 1."""
    B = t.base
    M = t.module
    order = _topological(M)
    gens = [Generator(b.name, b.degree, b.weight, b.form) for b in B.gens]
    new = [Generator(M.basis[i].name, M.basis[i].degree, None) for i in order]
    A = SemifreeCdga(gens + new, {}, name=name)
    diffs = {g.name: B.diffs[g.name].to_ring(A.ring) for g in B.gens}
    for i in order:
        b = M.basis[i]
        img = A.ring.zero()
        for j, m in M.diff[i].items():
            img = img + m.to_ring(A.ring) * A.gen(M.basis[j].name)
        x = t.xi.get(b.name)
        if x is not None:
            img = img + x.to_ring(A.ring)
        diffs[b.name] = img
    return SemifreeCdga(A.gens, diffs, name=name)


# ---------------------------------------------------------------------------
# shifted cotangent algebras


@dataclass
class ShiftedCotangent:
    """``T^*[d]`` data: the algebra, its de Rham calculus and standard forms."""

    base: SemifreeCdga
    d: int
    algebra: SemifreeCdga
    derham: DeRham
    liouville: Poly
    omega: Poly
    euler: VectorField
    fiber: list
    twist: VectorField | None = None
    potential: Poly | None = None

    @property
    def pairs(self) -> list:
        """``(base name, fiber name)`` in base order."""
        return [(g.name, fiber_name(g.name)) for g in self.base.gens]


def _fiber_diffs(B: SemifreeCdga, d: int, ring) -> dict:
    LB = cotangent_complex(B, validate=False).module
    names = [g.name for g in B.gens]
    out = {}
    for j, zj in enumerate(names):
        img = ring.zero()
        for i, zi in enumerate(names):
            m = LB.diff[i].get(j)
            if m is None:
                continue
            yi = ring.gen(fiber_name(zi))
            term = yi * m.to_ring(ring)
            img = img + (term if (-d - B.gens[i].degree) % 2 else -term)
        out[fiber_name(zj)] = img
    return out


def shifted_cotangent(B: SemifreeCdga, d: int, potential=None, name: str = "") -> ShiftedCotangent:
    """Build ``T^*[d] B``, twisted by ``potential`` when given.

    Fiber generators come in reverse base order, which makes the fiber
    differential triangular.
    """
    if d < 1:
        raise PresentationError("d must be at least 1")
    rep = check_presentation(B)
    if not rep.ok:
        raise PresentationError("invalid base presentation: " + "; ".join(rep.violations))
    for g in B.gens:
        if fiber_name(g.name) in B.names:
            raise PresentationError(f"fiber name {fiber_name(g.name)} clashes with a base generator")
        if -d - g.degree > 0:
            raise PresentationError(f"generator {g.name} of degree {g.degree} is too deep for d={d}: "
                                    f"its fiber generator would have positive degree")
    fib = [Generator(fiber_name(g.name), -d - g.degree, None) for g in reversed(B.gens)]
    base_gens = [Generator(g.name, g.degree, None) for g in B.gens]
    tmp = SemifreeCdga(base_gens + fib, {})
    ring = tmp.ring
    diffs = {g.name: B.diffs[g.name].to_ring(ring) for g in B.gens}
    diffs.update(_fiber_diffs(B, d, ring))
    t = None
    f = None
    if potential is not None:
        f = B(potential) if not isinstance(potential, Poly) else potential.to_ring(B.ring)
        if f.terms:
            if f.degree != 1 - d:
                raise PresentationError(f"potential has degree {f.degree}, expected {1 - d}")
            if B.D(f).terms:
                raise PresentationError("potential is not a cocycle")
            drB = DeRham(B)
            coeffs = drB.one_form_coeffs(drB.d(f))
            t = {}
            for j, c in coeffs.items():
                zn = B.gens[j].name
                t[fiber_name(zn)] = c.to_ring(ring)
                diffs[fiber_name(zn)] = diffs[fiber_name(zn)] + c.to_ring(ring)
    A = SemifreeCdga(tmp.gens, diffs, name=name or f"T*[{d}]{B.name or 'B'}")
    dr = DeRham(A)
    lam = dr.ring.zero()
    for g in B.gens:
        lam = lam + dr.ring.gen(fiber_name(g.name)) * dr.dgen(g.name)
    omega = dr.d(lam)
    fiber = [g.name for g in fib]
    E = dr.euler(names=fiber, name="E")
    xi = dr.twist_field(t) if t else None
    return ShiftedCotangent(B, d, A, dr, lam, omega, E, fiber, xi, f)


def twisted_standard_form(B: SemifreeCdga, d: int, f) -> ShiftedCotangent:
    return shifted_cotangent(B, d, potential=f)


# ---------------------------------------------------------------------------
# nondegeneracy and symmetry


def nondegeneracy_map(A: SemifreeCdga, omega2: Poly, d: int, dr: DeRham | None = None,
                      LA: DgModule | None = None) -> DgMap:
    """The map ``Φ: L_A^+ -> L_A`` induced by a 2-form."""
    dr = dr or DeRham(A)
    LA = LA or cotangent_complex(A, validate=False).module
    src = dagger(LA, DualityContext(d, 1))
    w = dr.embed(omega2)
    rows = {}
    for i, g in enumerate(A.gens):
        X = VectorField({g.name: A.ring.one()}, -g.degree, name=f"X_{g.name}")
        c = dr.one_form_coeffs(dr.iota(X, w)) if w.terms else {}
        # identifying X_i with the dual basis of Hom(L_A, A[d]) costs a shift sign
        if (d + 1) * g.degree % 2:
            c = {j: -v for j, v in c.items()}
        rows[i] = c
    return DgMap(src, LA, rows)


def standard_symmetry_sign(d: int) -> int | None:
    """``λ_P`` making the standard form on ``T^*[d] k[x]`` symmetric."""
    B = SemifreeCdga([Generator("x", 0)])
    T = shifted_cotangent(B, d)
    phi = nondegeneracy_map(T.algebra, T.omega, d, T.derham)
    lhs = dual_map(phi, d)
    ev = phi.compose(evaluation_map(phi.target, d))
    for s in (1, -1):
        if lhs.equals(ev.scale(s)):
            return s
    return None


@dataclass
class SymplecticReport:
    closed: bool
    nondegenerate: bool
    symmetric: bool
    method: str = ""
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.closed and self.nondegenerate and self.symmetric

    def __bool__(self):
        return self.ok

    def to_dict(self):
        return {"closed": self.closed, "nondegenerate": self.nondegenerate,
                "symmetric": self.symmetric, "method": self.method, "ok": self.ok,
                "details": self.details}


def verify_symplectic(A: SemifreeCdga, omega, d: int, spec: SliceSpec | None = None,
                      ctx: DualityContext | None = None, dr: DeRham | None = None) -> SymplecticReport:
    """Closedness, nondegeneracy and ``λ_P``-symmetry of a form of degree ``2 - d``.

    Nondegeneracy first tries the exact isomorphism test; if that fails and
    ``spec`` is given, the cone of ``Φ`` is checked for acyclicity on slices.
    """
    dr = dr or DeRham(A)
    ctx = ctx or DualityContext(d, standard_symmetry_sign(d))
    w = dr.embed(omega)
    details: dict = {}
    closed = not dr.total(w).terms
    if not closed:
        details["closedness_defect"] = str(dr.total(w))
    if w.terms and w.degree != 2 - d:
        details["degree"] = w.degree
        closed = False
    comps = dr.components(w)
    if any(k < 2 for k, v in comps.items() if v.terms):
        details["p_floor"] = "form has components below form degree 2"
        closed = False
    w2 = dr.component(w, 2)
    LA = cotangent_complex(A, validate=False).module
    phi = nondegeneracy_map(A, w2, d, dr, LA)
    chain = phi.check()
    if not chain.ok:
        details["chain_map"] = chain.violations
    nondeg, method, more = is_quis(phi, spec) if chain.ok else (False, "chain map", {})
    details.update(more)
    sym = is_symmetric(phi, ctx)
    if not sym:
        details["symmetry"] = f"ω_2 is not λ_P-symmetric for λ_P = {ctx.lambdaP}"
    return SymplecticReport(closed, nondeg, sym, method, details)
