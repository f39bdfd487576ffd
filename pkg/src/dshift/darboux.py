"""Darboux normal forms for shifted symplectic presentations.

Given ``(A, ω)`` with ``ω`` a closed 2-form of degree ``2 - d`` and a set of
generators spanning a coordinate Lagrangian, the pipeline produces a base
``B``, a potential ``f`` and an isomorphism ``σ: T^*[d]_{df} B -> A`` with
``σ^* ω^std = ω`` on the nose.

Stages: split off the middle quadratic block, move the Lagrangian into the
degree window by surgery, integrate it to a sub-presentation ``B``, read off
the twist, extract ``f`` through ``e^ξ`` and build ``σ`` by the Moser trick.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .cohom import SliceSpec
from .cotangent import cotangent_complex
from .derham import (DeRham, VectorField, dname, exp_xi, find_primitive, weight_decompose)
from .dgmod import BasisElement, DgModule, calibrate
from .gca import AlgebraMap, Poly, PresentationError, Report, SemifreeCdga, check_presentation
from .linalg import det
from .shifted import (ShiftedCotangent, fiber_name, nondegeneracy_map, shifted_cotangent,
                      verify_symplectic)
from .witt import (SymmetricComplex, split_off_quadratic, surgery_to_lagrangian)


def window(d: int) -> tuple:
    """Allowed range of ``-deg y`` for fiber generators."""
    return (d + 1) // 2, d


# ---------------------------------------------------------------------------
# Frobenius integration


@dataclass
class FoliationData:
    """A coordinate subcomplex ``S ⊂ L_A`` spanned by ``dz``, ``z`` in ``names``."""

    A: SemifreeCdga
    names: list

    def check(self) -> Report:
        rep = Report("foliation")
        keep = set(self.names)
        unknown = keep - set(self.A.names)
        if unknown:
            rep.fail(f"unknown generators {sorted(unknown)}")
            return rep
        for n in self.names:
            extra = self.A.diffs[n].support() - keep
            if extra:
                rep.fail(f"D(d{n}) leaves S through {sorted(extra)}")
        return rep


def frobenius_integrate(fol: FoliationData) -> SemifreeCdga:
    """The sub-presentation ``B`` on the generators of ``S``.

    For a coordinate ``S`` the integrability square holds on the nose, and
    ``L_B ⊗ A -> L_A`` is the inclusion of ``S``, which is checked.
    """
    rep = fol.check()
    if not rep.ok:
        raise PresentationError("S is not integrable: " + "; ".join(rep.violations))
    B = fol.A.sub_presentation(fol.names, name="B")
    LA = cotangent_complex(fol.A, validate=False).module
    LB = cotangent_complex(B, validate=False).module
    for i, g in enumerate(B.gens):
        ia = fol.A.ring.index[g.name]
        want = {LA.basis[j].name: v for j, v in LA.diff[ia].items()}
        got = {LB.basis[j].name: v.to_ring(fol.A.ring) for j, v in LB.diff[i].items()}
        if want != got:
            raise AssertionError(f"L_B (x) A does not match S at d{g.name}")
    return B


# ---------------------------------------------------------------------------
# the Lagrangian and the base


def symmetric_complex(A: SemifreeCdga, omega: Poly, d: int, dr: DeRham) -> SymmetricComplex:
    """``(L_A, Φ)`` for the 2-form part of ``omega``."""
    LA = cotangent_complex(A, validate=False).module
    phi = nondegeneracy_map(A, dr.component(dr.embed(omega), 2), d, dr, LA)
    return SymmetricComplex(LA, phi, calibrate(d))


@dataclass
class BaseChoice:
    B: SemifreeCdga
    A: SemifreeCdga  # reordered: base generators first
    base: list
    fiber: list
    swaps: list = field(default_factory=list)
    report: Report | None = None


def choose_base_from_lagrangian(A: SemifreeCdga, omega, d: int, lagrangian: Sequence[str],
                                spec: SliceSpec | None = None, dr: DeRham | None = None) -> BaseChoice:
    """Validate the Lagrangian, run surgery and integrate the result."""
    dr = dr or DeRham(A)
    sym = symmetric_complex(A, omega, d, dr)
    lag = surgery_to_lagrangian(sym, [dname(n) for n in lagrangian], spec)
    if not lag.report.ok:
        raise PresentationError("; ".join(lag.report.violations))
    base = [n[2:-1] for n in lag.names]
    swaps = [(a[2:-1], b[2:-1]) for a, b in lag.swaps]
    bset = set(base)
    fiber = [g.name for g in A.gens if g.name not in bset]
    order = [g.name for g in A.gens if g.name in bset]
    fib_sorted = sorted(fiber, key=lambda n: (-A.ring.generator(n).degree, A.names.index(n)))
    Ar = A.reordered(order + fib_sorted)
    rep = check_presentation(Ar)
    if not rep.ok:
        raise PresentationError("base-first reordering is not a presentation: "
                                + "; ".join(rep.violations))
    B = frobenius_integrate(FoliationData(Ar, order))
    return BaseChoice(B, Ar, order, fib_sorted, swaps, lag.report)


# ---------------------------------------------------------------------------
# normalization


@dataclass
class NormalForm:
    """``A = Sym^ξ_B M``: the twist ``ξ(y) = λ_y`` and the linear part ``μ``."""

    B: SemifreeCdga
    A: SemifreeCdga
    fiber: list
    twist: dict  # fiber name -> element of A of fiber weight 0
    linear: dict  # fiber name -> {fiber name: coefficient}
    module: DgModule
    report: Report


def _split_fiber_linear(A: SemifreeCdga, p: Poly, fiber: Sequence[str]):
    fidx = [A.ring.index[n] for n in fiber]
    const: dict = {}
    lin: dict = {}
    bad = []
    for m, c in p.terms.items():
        w = sum(m[i] for i in fidx)
        if w == 0:
            const[m] = c
        elif w == 1:
            j = next(i for i in fidx if m[i])
            rest = tuple(0 if k == j else e for k, e in enumerate(m))
            # y·(coefficient) with the coefficient on the left
            sign, _ = A.ring.mono_mul(rest, tuple(int(k == j) for k in range(len(m))))
            lin.setdefault(A.ring.gens[j].name, {})[rest] = c * sign
        else:
            bad.append(m)
    return (Poly(A.ring, const), {k: Poly(A.ring, v) for k, v in lin.items()}, bad)


def normalize_presentation(choice: BaseChoice, d: int) -> NormalForm:
    """Read off ``ξ`` and the fiber module; check the degree window and linearity."""
    A, fiber = choice.A, choice.fiber
    rep = Report("normalize")
    lo, hi = window(d)
    for n in fiber:
        k = -A.ring.generator(n).degree
        if not lo <= k <= hi:
            rep.fail(f"fiber generator {n} has -deg {k} outside [{lo}, {hi}]")
    if len(fiber) != len(choice.base):
        rep.fail("fiber and base have different ranks")
    twist, linear = {}, {}
    for n in fiber:
        c, lin, bad = _split_fiber_linear(A, A.diffs[n], fiber)
        if bad:
            rep.fail(f"D{n} is not linear in the fiber")
        twist[n] = c
        linear[n] = lin
    basis = [BasisElement(n, A.ring.generator(n).degree) for n in fiber]
    idx = {n: i for i, n in enumerate(fiber)}
    rows = {idx[n]: {idx[k]: v for k, v in linear[n].items()} for n in fiber}
    M = DgModule(A, basis, rows, name="M")
    rep.data["twist"] = {k: str(v) for k, v in twist.items() if v.terms}
    return NormalForm(choice.B, A, fiber, twist, linear, M, rep)


# ---------------------------------------------------------------------------
# potential


def twist_field(nf: NormalForm, dr: DeRham) -> VectorField:
    return VectorField({n: v for n, v in nf.twist.items()}, 1, "xi")


@dataclass
class PotentialResult:
    f: Poly | None
    gamma: Poly
    ok: bool
    certificate: dict = field(default_factory=dict)


def extract_potential(nf: NormalForm, omega, dr: DeRham | None = None,
                      max_polydeg: int | None = None) -> PotentialResult:
    """``f`` with ``df = γ``, where ``-γ`` is the fiber-weight-0 part of ``e^ξ ω``.

    ``e^ξ`` is computed twice (substitution and series) as a cross-check.
    """
    A, B = nf.A, nf.B
    dr = dr or DeRham(A)
    w = dr.embed(omega)
    xi = twist_field(nf, dr)
    e1 = exp_xi(dr, w, xi, "substitution")
    e2 = exp_xi(dr, w, xi, "series")
    if e1 != e2:
        raise AssertionError("the two evaluations of e^xi disagree")
    w0 = weight_decompose(dr, e1, nf.fiber).get(0, dr.ring.zero())
    drB = DeRham(B)
    gamma = drB.embed(-w0)
    res = find_primitive(drB, gamma, max_polydeg=max_polydeg)
    return PotentialResult(res.f, gamma, res.ok, res.certificate)


# ---------------------------------------------------------------------------
# Moser


def _euler_primitive(dr: DeRham, w2: Poly, fiber: Sequence[str], base: Sequence[str]) -> Poly:
    """A 1-form ``Λ`` with ``dΛ = w2`` built from Euler contractions.

    Fiber weight ``λ > 0`` pieces use the fiber Euler field; the weight-0
    piece lives on the base and uses the base Euler field graded by the
    number of base factors.
    """
    E = dr.euler(names=fiber)
    Eb = dr.euler(names=base)
    out = dr.ring.zero()
    for lam, piece in weight_decompose(dr, w2, fiber).items():
        if lam:
            out = out + dr.iota(E, piece).scale(Fraction(1, lam))
            continue
        counts: dict = {}
        for m, c in piece.terms.items():
            counts.setdefault(sum(m), {})[m] = c
        for k, t in counts.items():
            out = out + dr.iota(Eb, Poly(dr.ring, t)).scale(Fraction(1, k))
    return out


@dataclass
class DarbouxResult:
    B: SemifreeCdga
    f: Poly
    model: ShiftedCotangent
    sigma: AlgebraMap
    report: Report
    swaps: list = field(default_factory=list)
    quadratic: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        from .textio import format_presentation

        return {"base": format_presentation(self.B), "f": str(self.f),
                "sigma": {g.name: str(self.sigma.images[i])
                          for i, g in enumerate(self.sigma.source.gens)},
                "swaps": [list(s) for s in self.swaps],
                "quadratic": {k: str(v) for k, v in self.quadratic.items()},
                "report": self.report.to_dict()}


def moser_identify(nf: NormalForm, omega, d: int, f: Poly, dr: DeRham | None = None,
                   quadratic: Mapping[str, Fraction] | None = None) -> DarbouxResult:
    """Build ``σ: T^*[d]_{df} B (⊕ quadratic block) -> A`` and verify it.

    ``σ`` fixes the base and sends ``y_z`` to the ``dz`` coefficient ``Y_z``
    of ``Λ`` with ``dΛ = ω_2``, so ``σ^*λ = Λ`` and ``σ^*ω^std = ω_2``.
    Checked: ``ω`` has no components beyond form degree 2, ``Λ`` has no
    fiber directions, ``σ`` is a chain map and an isomorphism, and the
    pulled-back form equals ``ω``.
    """
    A, B = nf.A, nf.B
    dr = dr or DeRham(A)
    rep = Report("darboux")
    w = dr.embed(omega)
    comps = dr.components(w)
    if set(comps) - {2}:
        rep.fail(f"ω has form components {sorted(comps)}; only pure 2-forms are identified exactly")
    w2 = comps.get(2, dr.ring.zero())
    quadratic = dict(quadratic or {})
    qpart = dr.ring.zero()
    for q, c in quadratic.items():
        dq = dr.dgen(q)
        qpart = qpart + (dq * dq).scale(Fraction(c) / 2)
    base = [g.name for g in B.gens]
    lam = _euler_primitive(dr, w2 - qpart, nf.fiber, base)
    coeffs = dr.one_form_coeffs(lam) if lam.terms else {}
    Y = {}
    for j, c in coeffs.items():
        n = A.gens[j].name
        if n not in base:
            rep.fail(f"Λ has a d({n}) component; the base is not Lagrangian")
        else:
            Y[n] = c
    T = shifted_cotangent(B, d, potential=f)
    src = T.algebra
    if quadratic:
        from .gca import Generator

        src = SemifreeCdga(list(src.gens) + [Generator(q, A.ring.generator(q).degree)
                                             for q in quadratic],
                           {k: v for k, v in src.diffs.items()}, name=src.name)
        T = ShiftedCotangent(T.base, d, src, DeRham(src), T.liouville, T.omega, T.euler, T.fiber,
                             T.twist, T.potential)
    images = {g.name: A.gen(g.name) for g in B.gens}
    for g in B.gens:
        images[fiber_name(g.name)] = Y.get(g.name, A.ring.zero())
    for q in quadratic:
        images[q] = A.gen(q)
    sigma = AlgebraMap(src, A, images, check=False)
    chain = sigma.check()
    for v in chain.violations:
        rep.fail(v)
    # isomorphism: the fiber part of each Y_z is invertible block by block
    inv = _linear_part_invertible(A, d, nf.fiber, base, Y)
    rep.data["linear_part_determinants"] = inv[1]
    if not inv[0]:
        rep.fail("σ is not an isomorphism on generators")
    drs = T.derham
    pb = dr.pullback(images, drs)
    std = T.omega.to_ring(drs.ring)
    for q, c in quadratic.items():
        std = std + (drs.dgen(q) * drs.dgen(q)).scale(Fraction(c) / 2)
    pulled = pb(std)
    delta = pulled - w
    rep.data["delta"] = str(delta)
    if delta.terms:
        rep.fail("σ^*ω^std differs from ω")
    return DarbouxResult(B, f, T, sigma, rep, [], quadratic)


def _linear_part_invertible(A: SemifreeCdga, d: int, fiber, base, Y) -> tuple:
    """Whether ``y_z -> Y_z`` is invertible: the diagonal degree blocks of
    ``∂Y/∂y`` must have nonzero constant determinant."""
    fidx = {A.ring.index[n]: n for n in fiber}
    J: dict = {}
    for z in base:
        for m, c in Y.get(z, A.ring.zero()).terms.items():
            fs = [i for i in fidx if m[i]]
            if len(fs) != 1 or m[fs[0]] != 1:
                continue
            rest = tuple(0 if k == fs[0] else e for k, e in enumerate(m))
            if A.ring.mono_degree(rest) != 0:
                continue
            key = (z, fidx[fs[0]])
            J[key] = J.get(key, A.ring.zero()) + Poly(A.ring, {rest: c})
    dets = {}
    ok = True
    for dg in sorted({A.ring.generator(n).degree for n in fiber}):
        cols = [n for n in fiber if A.ring.generator(n).degree == dg]
        rows = [z for z in base if -d - A.ring.generator(z).degree == dg]
        if len(rows) != len(cols):
            return False, {str(dg): "rank mismatch"}
        D = det([[J.get((z, n), A.ring.zero()) for n in cols] for z in rows])
        dets[str(dg)] = str(D)
        if not D.terms or D.polydeg() != 0:
            ok = False
    return ok, dets


# ---------------------------------------------------------------------------
# the pipeline


def _quadratic_block(A: SemifreeCdga, omega: Poly, d: int, dr: DeRham,
                     spec: SliceSpec | None) -> tuple:
    """Self-paired middle generators that are isolated in ``A`` and in ``ω``."""
    if d % 4 != 2:
        return {}, None
    sym = symmetric_complex(A, omega, d, dr)
    split = split_off_quadratic(sym, spec)
    found = {}
    for i in split.middle_indices:
        q = A.gens[i].name
        if A.diffs[q].terms or any(q in A.diffs[g.name].support() for g in A.gens):
            continue
        sq = dr.ring.index[dname(q)]
        c = None
        clean = True
        for m, v in dr.embed(omega).terms.items():
            if m[sq] or m[dr.ring.index[q]]:
                if m[sq] == 2 and sum(m) == 2:
                    c = v * 2
                else:
                    clean = False
        if c is not None and clean:
            found[q] = c
    return found, split.report


def darboux_pipeline(A: SemifreeCdga, omega, d: int, lagrangian: Sequence[str],
                     spec: SliceSpec | None = None, max_polydeg: int | None = None) -> DarbouxResult:
    """Run all stages; failures before Moser raise, Moser failures are reported."""
    dr = DeRham(A)
    w = dr.embed(omega)
    check = verify_symplectic(A, w, d, spec, dr=dr)
    if not check.ok:
        raise PresentationError(f"input is not symplectic: {check.to_dict()}")
    quad, _ = _quadratic_block(A, w, d, dr, spec)
    work_A, work_w, work_dr = A, w, dr
    if quad:
        rest = [g.name for g in A.gens if g.name not in quad]
        work_A = A.sub_presentation(rest, name=A.name)
        work_dr = DeRham(work_A)
        keep = {}
        for m, c in w.terms.items():
            if not any(m[dr.ring.index[q]] or m[dr.ring.index[dname(q)]] for q in quad):
                keep[m] = c
        work_w = work_dr.embed(Poly(dr.ring, keep))
    choice = choose_base_from_lagrangian(work_A, work_w, d, lagrangian, spec, work_dr)
    nf = normalize_presentation(choice, d)
    if not nf.report.ok:
        raise PresentationError("; ".join(nf.report.violations))
    drA = DeRham(nf.A)
    pot = extract_potential(nf, drA.embed(work_w), drA, max_polydeg)
    if not pot.ok:
        raise PresentationError(f"no potential found: {pot.certificate}")
    f = pot.f
    if quad:
        full = nf.A.extend([A.ring.generator(q) for q in quad], {}, name=A.name)
        drF = DeRham(full)
        nf_full = NormalForm(nf.B, full, nf.fiber, nf.twist, nf.linear, nf.module, nf.report)
        res = moser_identify(nf_full, drF.embed(w), d, f, drF, quad)
    else:
        res = moser_identify(nf, drA.embed(work_w), d, f, drA)
    res.swaps = choice.swaps
    res.report.data["symplectic"] = check.to_dict()
    res.report.data["base"] = choice.base
    return res
