"""Cohomology of truncated graded slices by exact elimination.

Every complex we meet is infinite dimensional over Q, so cohomology is
computed on finite slices.  A slice is cut out by cohomological degree and
a weight: either a genuine grading preserved by the differential (then the
slice is a direct summand and the answer is exact), or a bound on
polynomial degree (then the slice is only a filtration piece and the result
is flagged ``approximate``).  In the approximate case we report

    dim Z(C_{<=N}) - dim (D(C_{<=N}) ∩ C_{<=N})

which agrees with the true cohomology once ``N`` is large enough on every
example we tested, but is not a theorem.

Complexes are anything implementing :class:`SlicedComplex`.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Callable, Mapping, Sequence

from .gca import GradedRing, Poly, PresentationError, SemifreeCdga
from .linalg import Echelon, bareiss_rank, left_kernel, nullspace


@dataclass(frozen=True)
class SliceSpec:
    """Truncation parameters; every axis must be finite."""

    window: tuple = (0, 0)
    max_polydeg: int | None = None
    max_weight: int | None = None
    weights: Mapping | None = None  # override: generator name -> int or tuple
    form: int | None = None  # restrict to one form degree (de Rham rings)

    def __post_init__(self):
        lo, hi = self.window
        if lo > hi:
            raise ValueError(f"empty window {self.window}")
        if self.max_polydeg is None and self.max_weight is None:
            raise ValueError("a slice needs max_polydeg or max_weight")


# ---------------------------------------------------------------------------
# monomial enumeration


def _as_vec(w) -> tuple:
    if w is None:
        return ()
    if isinstance(w, int):
        return (w,)
    return tuple(w)


def enumerate_monomials(ring: GradedRing, degree: int, weight: tuple | None = None,
                        weights: Sequence[tuple] | None = None, max_polydeg: int | None = None,
                        form: int | None = None, allow: Callable | None = None):
    """Monomials of total ``degree`` with exact ``weight`` vector.

    ``weights`` gives one nonnegative vector per generator.  Exponents are
    bounded through the (negated) internal degree, the form count, the
    weights and ``max_polydeg``; if nothing bounds a generator the slice is
    infinite and :class:`ValueError` is raised.
    """
    has_form = any(g.form for g in ring.gens)
    if form is not None:
        forms = [form]
    elif not has_form:
        forms = [0]
    else:
        # each form generator is odd (at most once) or carries weight/polydeg
        extra = max_polydeg if max_polydeg is not None else sum(weight or (0,))
        forms = range(0, sum(1 for g in ring.gens if g.form) + extra + 1)
    vecs = []
    for i, g in enumerate(ring.gens):
        v = [-g.degree, g.form]
        if weights is not None:
            v.extend(weights[i])
        vecs.append(v)
    out = []
    for p in forms:
        internal = degree - p
        if internal > 0:
            continue
        target = [-internal, p] + (list(weight) if weights is not None else [])
        _dfs(ring, vecs, target, max_polydeg, out, allow)
    return out


def _dfs(ring, vecs, target, cap, out, allow):
    n = ring.n
    k = len(target)
    # suffix support: which components can still be filled from index i on
    supp = [[False] * k for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        supp[i] = [supp[i + 1][c] or vecs[i][c] > 0 for c in range(k)]
    exps = [0] * n
    odd = ring.odd

    def rec(i, rem, cap_rem):
        if any(r < 0 for r in rem):
            return
        if i == n:
            if not any(rem):
                m = tuple(exps)
                if allow is None or allow(m):
                    out.append(m)
            return
        for c in range(k):
            if rem[c] and not supp[i][c]:
                return
        v = vecs[i]
        bound = 1 if odd[i] else None
        for c in range(k):
            if v[c] < 0:
                raise ValueError("grading vectors must be nonnegative")
            if v[c] > 0:
                b = rem[c] // v[c]
                bound = b if bound is None else min(bound, b)
        if cap_rem is not None:
            bound = cap_rem if bound is None else min(bound, cap_rem)
        if bound is None:
            raise ValueError(f"slice unbounded in generator {ring.gens[i].name}; "
                             "give it a positive weight or set max_polydeg")
        for e in range(bound, -1, -1):
            exps[i] = e
            rec(i + 1, [r - e * x for r, x in zip(rem, v)],
                None if cap_rem is None else cap_rem - e)
        exps[i] = 0

    rec(0, list(target), cap)


# ---------------------------------------------------------------------------
# weight detection


def is_weight_homogeneous(A: SemifreeCdga, weights: Mapping) -> bool:
    w = [_as_vec(weights[g.name]) for g in A.gens]
    for i, g in enumerate(A.gens):
        for m in A.diffs[g.name].terms:
            tot = tuple(sum(e * wj[c] for e, wj in zip(m, w) if e) for c in range(len(w[i])))
            if tot != w[i]:
                return False
    return True


def find_weights(A: SemifreeCdga, positive_all: bool = True) -> dict | None:
    """Search for nonnegative integer weights making D homogeneous.

    Degree-0 generators always get weight at least 1 so that slices are
    finite.  Uses a linear program to find a rational point and then
    checks the rounded integer weights exactly.
    """
    gens = A.gens
    n = len(gens)
    if n == 0:
        return {}
    rows = []
    for i, g in enumerate(gens):
        for m in A.diffs[g.name].terms:
            r = [float(e) for e in m]
            r[i] -= 1.0
            rows.append(r)
    from scipy.optimize import linprog

    for strict in ((True, False) if positive_all else (False,)):
        lb = [1.0 if (strict or g.degree == 0) else 0.0 for g in gens]
        res = linprog(c=[1.0] * n, A_eq=rows or None, b_eq=[0.0] * len(rows) if rows else None,
                      bounds=list(zip(lb, [None] * n)), method="highs")
        if res.status != 0:
            continue
        fr = [Fraction(x).limit_denominator(1000) for x in res.x]
        den = 1
        for f in fr:
            den = lcm(den, f.denominator)
        w = {g.name: int(f * den) for g, f in zip(gens, fr)}
        if is_weight_homogeneous(A, w) and all(w[g.name] > 0 for g in gens if g.degree == 0):
            return w
    return None


# ---------------------------------------------------------------------------
# the sliced-complex protocol


class SlicedComplex:
    """Finite pieces of a graded complex.

    Subclasses define :meth:`cells` (keys spanning the degree ``i`` piece
    of a slice) and :meth:`diff` (image of a key as a sparse dict).  When
    ``exact`` is false each label names a cumulative filtration piece.
    """

    exact: bool = True

    def labels(self) -> list:
        raise NotImplementedError

    def cells(self, degree: int, label) -> list:
        raise NotImplementedError

    def diff(self, key) -> dict:
        raise NotImplementedError

    def element(self, vec: Mapping):
        """Turn a sparse coordinate vector into a user-facing element."""
        return dict(vec)

    def coords(self, elem) -> dict:
        """Inverse of :meth:`element`."""
        return dict(elem)

    def label_of(self, key):
        raise NotImplementedError

    def degree_of(self, key) -> int:
        raise NotImplementedError


class AlgebraComplex(SlicedComplex):
    """Monomial slices of a free ring with a differential operator.

    ``op`` maps a Poly to a Poly (e.g. ``A.D``, or ``D + d`` on forms).
    ``allow`` restricts the basis (quotients and filtrations); images are
    projected onto allowed monomials, which is the quotient differential
    when the disallowed span is a subcomplex.
    """

    def __init__(self, ring: GradedRing, op: Callable[[Poly], Poly], spec: SliceSpec,
                 weights: Mapping | None = None, exact: bool | None = None,
                 allow: Callable | None = None, form: int | None = None):
        self.ring = ring
        self.op = op
        self.spec = spec
        self.allow = allow
        self.form = form if form is not None else spec.form
        self._cache: dict = {}
        self._cells: dict = {}
        if weights is not None and spec.max_weight is not None:
            self.wvec = [_as_vec(weights[g.name])[:1] for g in ring.gens]
            self.bound = spec.max_weight
            self.polymode = False
        else:
            if spec.max_polydeg is None:
                raise ValueError("no weights available; set max_polydeg")
            self.wvec = [(1,) for _ in ring.gens]
            self.bound = spec.max_polydeg
            self.polymode = True
        self.exact = bool(exact)

    def labels(self):
        if self.exact:
            return list(range(self.bound + 1))
        return [f"<={self.bound}"]

    def cells(self, degree, label):
        key = (degree, label)
        hit = self._cells.get(key)
        if hit is not None:
            return hit
        if self.exact:
            res = self._enum(degree, label)
        else:
            res = []
            for w in range(self.bound + 1):
                res.extend(self._enum(degree, w))
        self._cells[key] = res
        return res

    def _enum(self, degree, w):
        return enumerate_monomials(self.ring, degree, (w,), self.wvec, None,
                                   self.form, self.allow)

    def diff(self, key):
        hit = self._cache.get(key)
        if hit is None:
            img = self.op(self.ring.monomial(key))
            hit = {m: c for m, c in img.terms.items() if self.allow is None or self.allow(m)}
            self._cache[key] = hit
        return hit

    def element(self, vec):
        return Poly(self.ring, {m: Fraction(c) for m, c in vec.items() if c})

    def coords(self, elem):
        return dict(elem.terms)

    def weight_of(self, m) -> int:
        return sum(e * v[0] for e, v in zip(m, self.wvec) if e)

    def label_of(self, m):
        return self.weight_of(m) if self.exact else self.labels()[0]

    def degree_of(self, m):
        return self.ring.mono_degree(m)


def algebra_complex(A: SemifreeCdga, spec: SliceSpec, allow=None) -> AlgebraComplex:
    w = spec.weights
    if w is None:
        w = A.weights() or find_weights(A)
    if w is not None and spec.max_weight is not None:
        exact = is_weight_homogeneous(A, w)
        if not exact and spec.max_polydeg is None:
            raise PresentationError("weights are not preserved by D and no max_polydeg given")
        if exact:
            return AlgebraComplex(A.ring, A.D, spec, w, True, allow)
    ones = {g.name: 1 for g in A.gens}
    exact = is_weight_homogeneous(A, ones)
    return AlgebraComplex(A.ring, A.D, spec, None, exact, allow)


def slice(X, spec: SliceSpec) -> SlicedComplex:
    """Sliced complex for a presentation, a module or a prepared complex."""
    if isinstance(X, SlicedComplex):
        return X
    if isinstance(X, SemifreeCdga):
        return algebra_complex(X, spec)
    if hasattr(X, "sliced"):
        return X.sliced(spec)
    raise TypeError(f"cannot slice {type(X).__name__}")


# ---------------------------------------------------------------------------
# cohomology


@dataclass
class SliceCohomology:
    degree: int
    weight: object
    dim: int
    representatives: list
    exact: bool
    chain_dim: int = 0

    def to_dict(self):
        return {"degree": self.degree, "weight": self.weight, "dim": self.dim,
                "representatives": [str(r) for r in self.representatives],
                "exact": self.exact}


@dataclass
class CohomologyReport:
    slices: list = field(default_factory=list)
    exact: bool = True

    def dim(self, degree: int, weight=None) -> int:
        return sum(s.dim for s in self.slices
                   if s.degree == degree and (weight is None or s.weight == weight))

    def dims(self) -> dict:
        out: dict = {}
        for s in self.slices:
            out[s.degree] = out.get(s.degree, 0) + s.dim
        return out

    def representatives(self, degree: int, weight=None) -> list:
        return [r for s in self.slices if s.degree == degree
                and (weight is None or s.weight == weight) for r in s.representatives]

    def to_json(self) -> str:
        return json.dumps({"exact": self.exact, "slices": [s.to_dict() for s in self.slices]},
                          indent=None, sort_keys=True)


def _boundaries(C: SlicedComplex, degree, label, inside: set):
    """Echelon of ``D(C^{i-1}) ∩ C^i`` within the slice."""
    imgs = [C.diff(k) for k in C.cells(degree - 1, label)]
    e = Echelon()
    if all(set(r) <= inside for r in imgs):
        for r in imgs:
            e.add(r)
        return e
    outside = [{k: v for k, v in r.items() if k not in inside} for r in imgs]
    for combo in left_kernel(outside):
        row: dict = {}
        for idx, c in combo.items():
            for k, v in imgs[idx].items():
                if k in inside:
                    row[k] = row.get(k, 0) + c * v
        e.add(row)
    return e


def slice_cohomology(C: SlicedComplex, degree: int, label, reps: bool = True,
                     crosscheck: bool = False) -> SliceCohomology:
    cells = C.cells(degree, label)
    inside = set(cells)
    imgs = [C.diff(k) for k in cells]
    cols: dict = {}
    for i, r in enumerate(imgs):
        for k, v in r.items():
            cols.setdefault(k, {})[i] = v
    # cycles: vectors c over cells with sum c_i D(cell_i) = 0
    z = nullspace(list(cols.values()), range(len(cells)))
    B = _boundaries(C, degree, label, inside)
    dim = len(z) - B.rank
    out = []
    if reps or crosscheck:
        for v in z:
            vec = {cells[i]: c for i, c in v.items()}
            if B.add(vec):
                out.append(C.element(vec))
        if len(out) != dim:
            raise AssertionError("cycle/boundary bookkeeping mismatch")
    if crosscheck and cells:
        keys = sorted(cols)
        dense = [[imgs[i].get(k, 0) for i in range(len(cells))] for k in keys]
        rk = bareiss_rank(dense) if dense else 0
        if len(cells) - rk != len(z):
            raise AssertionError("independent rank computation disagrees")
    return SliceCohomology(degree, label, dim, out if reps else [], C.exact, len(cells))


def cohomology(X, spec: SliceSpec, reps: bool = True, crosscheck: bool = False) -> CohomologyReport:
    C = slice(X, spec)
    rep = CohomologyReport(exact=C.exact)
    lo, hi = spec.window
    for i in range(lo, hi + 1):
        for lab in C.labels():
            rep.slices.append(slice_cohomology(C, i, lab, reps, crosscheck))
    return rep


@dataclass
class BoundaryResult:
    ok: bool
    primitive: object = None
    class_coords: list = field(default_factory=list)

    def __bool__(self):
        return self.ok


def solve_boundary(X, target, spec: SliceSpec) -> BoundaryResult:
    """Find ``z`` with ``D z = target`` inside the slice."""
    C = slice(X, spec)
    vec = C.coords(target)
    if not vec:
        return BoundaryResult(True, C.element({}))
    # closedness
    dt: dict = {}
    for k, v in vec.items():
        for kk, vv in C.diff(k).items():
            dt[kk] = dt.get(kk, 0) + v * vv
    if any(dt.values()):
        raise ValueError("target is not closed")
    groups: dict = {}
    for k, v in vec.items():
        groups.setdefault((C.degree_of(k), C.label_of(k)), {})[k] = v
    prim: dict = {}
    coords = []
    ok = True
    for (deg, lab), part in sorted(groups.items(), key=lambda t: str(t[0])):
        cells = C.cells(deg - 1, lab)
        e = Echelon(track=True)
        for k in cells:
            e.add(C.diff(k))
        sol = e.express(part)
        if sol is None:
            ok = False
            # class coordinates against the slice's representatives
            hs = slice_cohomology(C, deg, lab)
            rows = [C.coords(r) for r in hs.representatives] + [C.diff(k) for k in cells]
            ee = Echelon(track=True)
            for r in rows:
                ee.add(r)
            c = ee.express(part) or {}
            coords.append({"degree": deg, "weight": lab,
                           "coords": [str(c.get(j, 0)) for j in range(len(hs.representatives))],
                           "representatives": [str(r) for r in hs.representatives]})
            continue
        for idx, c in sol.items():
            k = cells[idx]
            prim[k] = prim.get(k, 0) + c
    if not ok:
        return BoundaryResult(False, None, coords)
    return BoundaryResult(True, C.element({k: v for k, v in prim.items() if v}))


def random_cycle(C: SlicedComplex, degree: int, label, rng: random.Random, span: int = 3):
    """A random cycle in one slice (zero if the cycle space is trivial)."""
    cells = C.cells(degree, label)
    cols: dict = {}
    for i, k in enumerate(cells):
        for kk, v in C.diff(k).items():
            cols.setdefault(kk, {})[i] = v
    z = nullspace(list(cols.values()), range(len(cells)))
    vec: dict = {}
    for v in z:
        c = rng.randint(-span, span)
        for i, x in v.items():
            vec[cells[i]] = vec.get(cells[i], 0) + c * x
    return C.element({k: v for k, v in vec.items() if v})


def random_element(C: SlicedComplex, degree: int, label, rng: random.Random, span: int = 3,
                   density: float = 0.6):
    cells = C.cells(degree, label)
    vec = {k: Fraction(rng.randint(-span, span)) for k in cells if rng.random() < density}
    return C.element({k: v for k, v in vec.items() if v})


def euler_characteristic(C: SlicedComplex, lo: int, hi: int, label) -> int:
    return sum((-1) ** i * len(C.cells(i, label)) for i in range(lo, hi + 1))
