"""Truncated Hodge-filtered de Rham complexes and their operator calculus.

For a presentation ``A = k[z_1..z_n | D z_i = f_i]`` the de Rham algebra is
the free graded-commutative ring on ``z_i`` and ``d(z_i)``, where ``d(z_i)``
has the degree of ``z_i`` plus one unit of form degree.  The wedge power
``⋀^p L_A`` is the form-degree ``p`` part, and ``F^p`` is the product of the
parts of form degree at least ``p``.  Two anticommuting differentials act:

* ``d``: ``z -> d(z)``, ``d(z) -> 0``;
* ``D``: ``z -> f_z``, ``d(z) -> -d(f_z)``.

A vector field ``X`` of degree ``k`` is its list of values ``X(dz_i)``.
Contraction ``ι_X`` is the derivation of total degree ``k - 1`` with
``ι_X(z) = 0`` and ``ι_X(dz) = X(dz)``.  We set ``Lie_X = [ι_X, d]``
(graded commutator).  With this convention a twist ``ξ`` with
``ι_ξ(dy_i) = t_i`` satisfies ``D_A = D_bar + Lie_ξ`` and the operator
relations hold on the nose; ``e^ξ = exp(-ι_ξ)`` is the algebra map
``dy_i -> dy_i - t_i``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping, Sequence

from .cohom import SlicedComplex, SliceSpec, enumerate_monomials, _as_vec
from .gca import (Generator, GradedRing, Poly, PresentationError, SemifreeCdga,
                  apply_derivation, substitute)
from .linalg import Echelon, nullspace


def dname(name: str) -> str:
    return f"d({name})"


class VectorField:
    """Degree-``k`` map ``L_A -> A`` given by values on the ``dz``."""

    def __init__(self, values: Mapping[str, Poly], degree: int, name: str = "X"):
        self.values = {k: v for k, v in values.items() if v.terms}
        self.degree = degree
        self.name = name

    def __repr__(self):
        return f"VectorField({self.name}, deg {self.degree})"


class DeRham:
    """De Rham calculus for one presentation."""

    def __init__(self, A: SemifreeCdga, ring: GradedRing | None = None):
        self.A = A
        self.n = A.ring.n
        if ring is None:
            gens = list(A.gens) + [Generator(dname(g.name), g.degree, g.weight, form=1)
                                   for g in A.gens]
            ring = GradedRing(gens)
        self.ring = ring
        self._conv = ring.converter(A.ring)
        self._d_images = {i: ring.gen(dname(g.name)) for i, g in enumerate(A.gens)}
        self._dcache: dict = {}
        self._Dcache: dict = {}
        D_images = {}
        for i, g in enumerate(A.gens):
            f = self.embed(A.diffs[g.name])
            if f.terms:
                D_images[i] = f
                D_images[self.n + i] = -self.d(f)
        self._D_images = D_images
        self.form_index = [i for i, g in enumerate(ring.gens) if g.form]

    # -- plumbing -----------------------------------------------------
    def embed(self, a) -> Poly:
        if isinstance(a, Poly):
            if a.ring is self.ring:
                return a
            if a.ring == self.A.ring or a.ring is self.A.ring:
                return Poly(self.ring, {self._conv(m): c for m, c in a.terms.items()})
            return a.to_ring(self.ring)
        if isinstance(a, DeRhamElement):
            return a.poly
        if isinstance(a, (int, Fraction)):
            return self.ring.const(a)
        return self.parse(a)

    def parse(self, text: str) -> Poly:
        from .textio import parse_poly

        return parse_poly(text, self.ring)

    def __call__(self, x) -> Poly:
        return self.embed(x)

    def dgen(self, name: str) -> Poly:
        return self.ring.gen(dname(name))

    def form_degree(self, m) -> int:
        return sum(m[i] for i in self.form_index)

    def components(self, p: Poly) -> dict:
        out: dict = {}
        for m, c in p.terms.items():
            out.setdefault(self.form_degree(m), {})[m] = c
        return {k: Poly(self.ring, v) for k, v in sorted(out.items())}

    def component(self, p: Poly, k: int) -> Poly:
        return p.component(lambda m: self.form_degree(m) == k)

    def restrict(self, p: Poly) -> Poly:
        """Form-degree-0 part of ``p`` as an element of ``A``."""
        idx = [self.ring.index[g.name] for g in self.A.gens]
        out = {}
        for m, c in p.terms.items():
            if self.form_degree(m) == 0:
                out[tuple(m[i] for i in idx)] = c
        return Poly(self.A.ring, out)

    def one_form_coeffs(self, p: Poly) -> dict:
        """Left coefficients of the ``dz_j`` in a 1-form, as elements of ``A``."""
        idx = [self.ring.index[g.name] for g in self.A.gens]
        didx = [self.ring.index[dname(g.name)] for g in self.A.gens]
        out: dict = {}
        for m, c in p.terms.items():
            fs = [j for j, i in enumerate(didx) if m[i]]
            if len(fs) != 1 or m[didx[fs[0]]] != 1:
                raise PresentationError("not a 1-form")
            j = fs[0]
            out.setdefault(j, {})[tuple(m[i] for i in idx)] = c
        return {j: Poly(self.A.ring, t) for j, t in out.items()}

    # -- operators ----------------------------------------------------
    def d(self, p) -> Poly:
        return apply_derivation(self.embed(p), self._d_images, 1, self._dcache)

    def D(self, p) -> Poly:
        return apply_derivation(self.embed(p), self._D_images, 1, self._Dcache)

    def total(self, p) -> Poly:
        p = self.embed(p)
        return self.d(p) + self.D(p)

    def _vf_images(self, X: VectorField) -> dict:
        imgs = {}
        for name, v in X.values.items():
            imgs[self.ring.index[dname(name)]] = self.embed(v)
        return imgs

    def iota(self, X: VectorField, p) -> Poly:
        return apply_derivation(self.embed(p), self._vf_images(X), X.degree - 1)

    def lie(self, X: VectorField, p) -> Poly:
        """``Lie_X = [ι_X, d] = ι_X d - (-1)^{k-1} d ι_X``."""
        p = self.embed(p)
        a = self.iota(X, self.d(p))
        b = self.d(self.iota(X, p))
        return a - b if (X.degree - 1) % 2 == 0 else a + b

    def pullback(self, images: Mapping[str, Poly], source: "DeRham") -> Callable[[Poly], Poly]:
        """Extend an algebra map ``source.A -> self.A`` to de Rham algebras."""
        imgs = {}
        for i, g in enumerate(source.A.gens):
            v = self.embed(images[g.name]) if g.name in images else self.ring.gen(g.name)
            imgs[source.ring.index[g.name]] = v
            imgs[source.ring.index[dname(g.name)]] = self.d(v)
        cache: dict = {}

        def pb(p: Poly) -> Poly:
            return substitute(source.embed(p), imgs, self.ring, cache)

        return pb

    # -- vector fields ------------------------------------------------
    def euler(self, weights: Mapping[str, int] | None = None, names: Iterable[str] | None = None,
              name: str = "E") -> VectorField:
        """Weight Euler field ``E(dz) = w(z) z``; default weights are 1 on ``names``."""
        if weights is None:
            weights = {n: 1 for n in (names or [])}
        vals = {n: self.A.gen(n).scale(w) for n, w in weights.items() if w}
        return VectorField(vals, 0, name)

    def twist_field(self, t: Mapping[str, Poly], name: str = "xi") -> VectorField:
        """Degree-1 vector field with ``ι(dy) = t_y``."""
        return VectorField({k: self.A(v) for k, v in t.items()}, 1, name)


def commutator(op1: Callable, deg1: int, op2: Callable, deg2: int) -> Callable:
    """Graded commutator ``[op1, op2] = op1 op2 - (-1)^{deg1 deg2} op2 op1``."""
    s = -1 if (deg1 * deg2) % 2 else 1

    def op(p):
        return op1(op2(p)) - op2(op1(p)).scale(s)

    return op


def operator_relations(dr: DeRham, dr_bar: DeRham, E: VectorField, xi: VectorField) -> dict:
    """Residual operators of the Cartan-type relations; each must vanish.

    ``dr`` is the twisted side and ``dr_bar`` the untwisted one on the same
    generators; ``D_bar`` is taken from ``dr_bar`` and transported.
    """
    ring = dr.ring

    def d(p):
        return dr.d(p)

    def Dbar(p):
        return dr_bar.D(p.to_ring(dr_bar.ring)).to_ring(ring)

    def iE(p):
        return dr.iota(E, p)

    def LE(p):
        return dr.lie(E, p)

    def ix(p):
        return dr.iota(xi, p)

    def Lx(p):
        return dr.lie(xi, p)

    kE, kx = E.degree, xi.degree
    zero = commutator(iE, kE - 1, ix, kx - 1)
    return {
        "[d, iota_E] = Lie_E": lambda p: commutator(d, 1, iE, kE - 1)(p) - LE(p),
        "[iota_E, Lie_xi] = iota_xi": lambda p: commutator(iE, kE - 1, Lx, kx)(p) - ix(p),
        "[Lie_E, Lie_xi] = -Lie_xi": lambda p: commutator(LE, kE, Lx, kx)(p) + Lx(p),
        "[iota_E, iota_xi] = 0": zero,
        "[D_bar, iota_E] = 0": commutator(Dbar, 1, iE, kE - 1),
        "[D_bar, d] = 0": commutator(Dbar, 1, d, 1),
        "D = D_bar + Lie_xi": lambda p: dr.D(p) - Dbar(p) - Lx(p),
    }


# ---------------------------------------------------------------------------
# elements


@dataclass
class DeRhamElement:
    """A truncated element of ``F^p``: a polynomial form plus bookkeeping."""

    poly: Poly
    p_floor: int = 0
    max_wedge: int | None = None
    clipped: bool = False

    def components(self, dr: DeRham) -> dict:
        return dr.components(self.poly)

    def check_floor(self, dr: DeRham) -> bool:
        return all(k >= self.p_floor for k in dr.components(self.poly))

    def truncate(self, dr: DeRham) -> "DeRhamElement":
        if self.max_wedge is None:
            return self
        keep = self.poly.component(lambda m: dr.form_degree(m) <= self.max_wedge)
        return DeRhamElement(keep, self.p_floor, self.max_wedge,
                             self.clipped or len(keep.terms) != len(self.poly.terms))


def apply_operator(dr: DeRham, op: str, w, X: VectorField | None = None,
                   max_wedge: int | None = None) -> DeRhamElement:
    """Apply ``d``, ``D``, ``d+D``, ``iota`` or ``lie`` and truncate."""
    p = dr.embed(w)
    floor = w.p_floor if isinstance(w, DeRhamElement) else 0
    if op == "d":
        out, floor = dr.d(p), floor + 1
    elif op == "D":
        out = dr.D(p)
    elif op in ("d+D", "total"):
        out = dr.total(p)
    elif op == "iota":
        out, floor = dr.iota(X, p), max(floor - 1, 0)
    elif op == "lie":
        out = dr.lie(X, p)
    else:
        raise ValueError(f"unknown operator {op!r}")
    return DeRhamElement(out, floor, max_wedge).truncate(dr)


# ---------------------------------------------------------------------------
# weights and filtrations


def fiber_weight(dr: DeRham, m, fiber: Sequence[str]) -> int:
    """Number of fiber factors (``y`` or ``d(y)``) in a monomial."""
    idx = set()
    for n in fiber:
        idx.add(dr.ring.index[n])
        idx.add(dr.ring.index[dname(n)])
    return sum(m[i] for i in idx)


def weight_decompose(dr: DeRham, w, fiber: Sequence[str]) -> dict:
    """Split by fiber weight; ``Lie_E`` acts by the weight on each piece."""
    p = dr.embed(w)
    out: dict = {}
    for m, c in p.terms.items():
        out.setdefault(fiber_weight(dr, m, fiber), {})[m] = c
    return {k: Poly(dr.ring, v) for k, v in sorted(out.items())}


@dataclass(frozen=True)
class FiltrationLabel:
    filt: int  # number of fiber d-generators
    filt2: int  # weight in fiber variables (the second flavour)


def filtration_label(dr: DeRham, w, fiber: Sequence[str]) -> dict:
    """Per-term labels for the two increasing filtrations."""
    p = dr.embed(w)
    fi = [dr.ring.index[n] for n in fiber]
    dfi = [dr.ring.index[dname(n)] for n in fiber]
    out = {}
    for m in p.terms:
        out[m] = FiltrationLabel(sum(m[i] for i in dfi), sum(m[i] for i in fi))
    return out


# ---------------------------------------------------------------------------
# the e^xi map


def exp_xi(dr: DeRham, w, xi: VectorField, method: str = "substitution",
           max_terms: int = 64) -> Poly:
    """``e^ξ = exp(-ι_ξ)``: transport from the twisted to the untwisted side.

    ``method="series"`` sums ``(-ι_ξ)^k / k!``; it terminates because
    ``ι_ξ`` lowers form degree.  ``method="substitution"`` applies the algebra
    map ``dy -> dy - ξ(dy)``.  Both are exact; they are computed
    independently so that each can check the other.
    """
    p = dr.embed(w)
    if xi.degree != 1:
        raise PresentationError("e^xi needs a degree-1 twist field")
    if method == "series":
        out = dr.ring.zero()
        term = p
        for k in range(max_terms):
            if not term.terms:
                return out
            out = out + term.scale(Fraction((-1) ** k, factorial(k)))
            term = dr.iota(xi, term)
        raise PresentationError("e^xi series did not terminate within max_terms")
    imgs = {}
    for name, v in xi.values.items():
        i = dr.ring.index[dname(name)]
        imgs[i] = dr.ring.gen(dname(name)) - dr.embed(v)
    return substitute(p, imgs, dr.ring)


def check_intertwining(dr_twisted: DeRham, xi: VectorField, w) -> bool:
    """``(d + D_A - Lie_ξ) e^ξ = e^ξ (d + D_A)`` on one element."""
    p = dr_twisted.embed(w)
    e = exp_xi(dr_twisted, p, xi)
    lhs = dr_twisted.total(e) - dr_twisted.lie(xi, e)
    rhs = exp_xi(dr_twisted, dr_twisted.total(p), xi)
    return lhs == rhs


# ---------------------------------------------------------------------------
# form slices


class FormComplex(SlicedComplex):
    """Slices of a de Rham algebra with a chosen differential.

    ``forms`` is the set of allowed form degrees (``range(p, P)`` for a
    truncated ``F^p``, a single value for ``⋀^p``).  Slices are labelled by
    a weight vector; every generator must carry a vector of the same
    length, and the differential must be homogeneous for it.
    """

    def __init__(self, dr: DeRham, op: Callable, forms: Sequence[int],
                 weights: Mapping[str, tuple], labels: Sequence[tuple]):
        self.dr = dr
        self.op = op
        self.forms = list(forms)
        self.exact = True
        self._labels = list(labels)
        self.wvec = []
        for g in dr.ring.gens:
            base = g.name[2:-1] if g.form else g.name
            self.wvec.append(_as_vec(weights[base]))
        self._cells: dict = {}
        self._cache: dict = {}

    def labels(self):
        return self._labels

    def cells(self, degree, label):
        key = (degree, label)
        hit = self._cells.get(key)
        if hit is None:
            hit = []
            for p in self.forms:
                hit.extend(enumerate_monomials(self.dr.ring, degree, tuple(label), self.wvec,
                                               None, p))
            self._cells[key] = hit
        return hit

    def diff(self, key):
        hit = self._cache.get(key)
        if hit is None:
            img = self.op(self.dr.ring.monomial(key))
            fs = set(self.forms)
            hit = {m: c for m, c in img.terms.items() if self.dr.form_degree(m) in fs}
            self._cache[key] = hit
        return hit

    def element(self, vec):
        return Poly(self.dr.ring, {m: Fraction(c) for m, c in vec.items() if c})

    def coords(self, elem):
        return dict(elem.terms)

    def label_of(self, m):
        return tuple(sum(e * v[c] for e, v in zip(m, self.wvec) if e)
                     for c in range(len(self.wvec[0])))

    def degree_of(self, m):
        return self.dr.ring.mono_degree(m)


def _span_cycles(C: FormComplex, degree, label):
    cells = C.cells(degree, label)
    cols: dict = {}
    for i, k in enumerate(cells):
        for kk, v in C.diff(k).items():
            cols.setdefault(kk, {})[i] = v
    z = nullspace(list(cols.values()), range(len(cells)))
    return [{cells[i]: c for i, c in v.items()} for v in z]


def _boundary_echelon(C: FormComplex, degree, label) -> Echelon:
    e = Echelon()
    for k in C.cells(degree - 1, label):
        e.add(C.diff(k))
    return e


@dataclass
class GradedPieceReport:
    lam: int
    p: int
    i: int
    direct: dict = field(default_factory=dict)  # mu -> dim H^i(F^p)_{lam,mu}
    model: dict = field(default_factory=dict)  # mu -> dim ker(d on H)
    agree: bool = True


def graded_piece_model(dr: DeRham, fiber: Sequence[str], p: int, i: int, lam: int,
                       base_weights: Mapping[str, int], max_mu: int) -> GradedPieceReport:
    """Compare both sides of the graded-piece description for ``λ != 0``.

    Direct side: ``dim H^i(F^p)`` in fiber weight ``λ`` and base weight
    ``μ``.  Model side: ``dim ker(d: H^{i-p}(⋀^p) -> H^{i-p}(⋀^{p+1}))`` in
    the same bidegree.  ``dr`` must be the untwisted (weight-graded) side.
    ``base_weights`` grades every generator (fiber ones included) so that
    the bigraded slices are finite.
    """
    if lam == 0:
        raise ValueError("λ = 0 is the base part; use the base de Rham complex instead")
    fib = set(fiber)
    weights = {g.name: (1 if g.name in fib else 0, base_weights[g.name]) for g in dr.A.gens}
    from .cohom import is_weight_homogeneous

    if not is_weight_homogeneous(dr.A, weights):
        raise PresentationError("D is not homogeneous for (fiber weight, base weight)")
    ring = dr.ring
    n_forms = len(dr.form_index)
    top = p + n_forms + lam + max_mu + 1
    rep = GradedPieceReport(lam, p, i)
    labels = [(lam, mu) for mu in range(max_mu + 1)]
    F = FormComplex(dr, dr.total, range(p, top + 1), weights, labels)
    Wp = FormComplex(dr, dr.D, [p], weights, labels)
    Wq = FormComplex(dr, dr.D, [p + 1], weights, labels)
    from .cohom import slice_cohomology

    for lab in labels:
        # the truncation at form degree ``top`` is exact: the bigraded piece
        # has no monomials beyond it
        assert not F.cells(i, lab) or max(dr.form_degree(m) for m in F.cells(i, lab)) < top
        direct = slice_cohomology(F, i, lab, reps=False).dim
        zp = _span_cycles(Wp, i, lab)
        bp = _boundary_echelon(Wp, i, lab)
        hp = len(zp) - bp.rank
        bq = _boundary_echelon(Wq, i + 1, lab)
        base_rank = bq.rank
        for z in zp:
            bq.add(dr.d(Poly(ring, z)).terms)
        # the image of H^p in H^{p+1} has dimension rank(dZ + B) - rank(B);
        # boundaries of ⋀^p map to boundaries, so this is the induced rank
        induced = bq.rank - base_rank
        model = hp - induced
        rep.direct[lab[1]] = direct
        rep.model[lab[1]] = model
        if direct != model:
            rep.agree = False
    return rep


# ---------------------------------------------------------------------------
# primitives


@dataclass
class PrimitiveResult:
    ok: bool
    f: Poly | None = None
    certificate: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok


def find_primitive(dr: DeRham, gamma, spec: SliceSpec | None = None,
                   max_polydeg: int | None = None) -> PrimitiveResult:
    """Solve ``(d + D) F = γ`` for a form ``F`` whose function part is ``f``.

    The ansatz runs over all monomials of the right total degree with form
    degree below the top form degree of ``γ`` and polynomial degree at most
    ``max_polydeg`` (default: one more than that of ``γ``).  The returned
    ``f`` has zero constant term.  On failure the certificate records the
    slice in which no primitive exists.
    """
    g = dr.embed(gamma)
    if not g.terms:
        return PrimitiveResult(True, dr.A.ring.zero())
    deg = g.degree
    if deg is None:
        raise PresentationError("γ must be homogeneous")
    if dr.total(g).terms:
        raise PresentationError("γ is not closed under d + D")
    forms = sorted(dr.components(g))
    top = forms[-1]
    cap = max_polydeg if max_polydeg is not None else (g.polydeg() + 1)
    if spec is not None and spec.max_polydeg is not None:
        cap = max(cap, spec.max_polydeg)
    cells = []
    for p in range(0, top):
        cells.extend(enumerate_monomials(dr.ring, deg - 1, None, None, cap, p))
    e = Echelon(track=True)
    for m in cells:
        e.add(dr.total(dr.ring.monomial(m)).terms)
    sol = e.express(g.terms)
    if sol is None:
        return PrimitiveResult(False, None, {"degree": deg, "max_polydeg": cap,
                                             "cells": len(cells), "reason": "class nonzero in slice"})
    F = Poly(dr.ring, {cells[i]: c for i, c in sol.items() if c})
    f = dr.restrict(F)
    const = f.constant_term()
    if const:
        f = f - const
    return PrimitiveResult(True, f)


# ---------------------------------------------------------------------------
# sampling


def random_form(dr: DeRham, rng: random.Random, degree: int, forms: Sequence[int],
                max_polydeg: int = 3, terms: int = 4, span: int = 3) -> Poly:
    """Random homogeneous form of the given total degree."""
    cells = []
    for p in forms:
        cells.extend(enumerate_monomials(dr.ring, degree, None, None, max_polydeg, p))
    if not cells:
        return dr.ring.zero()
    out = {}
    for _ in range(terms):
        m = rng.choice(cells)
        c = Fraction(rng.randint(-span, span), rng.randint(1, 2))
        if c:
            out[m] = out.get(m, 0) + c
    return Poly(dr.ring, {m: c for m, c in out.items() if c})
