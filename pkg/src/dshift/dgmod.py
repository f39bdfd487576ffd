"""Finite semifree dg-modules over a presentation.

A :class:`DgModule` has an ordered basis ``b_1..b_r`` with integer degrees
and a matrix ``M`` of base elements, ``D b_i = sum_j M[i][j] b_j`` with
coefficients on the left.  Elements are dicts ``j -> Poly``.  The Leibniz
rule is ``D(a b) = D(a) b + (-1)^{|a|} a D(b)``.

Sign conventions (fixed once, used everywhere):

* ``M[n]`` has basis ``s^n b_i`` in degree ``deg b_i - n`` and
  ``D(s^n b) = (-1)^n s^n D(b)``, ``a s^n b = (-1)^{n|a|} s^n(a b)``.
* The dual with values in ``A[n]`` has basis ``b_j^v`` in degree
  ``-n - deg b_j`` and pairing ``<b_j^v, b_i> = delta_ij``;
  ``D(phi) = D o phi - (-1)^{|phi|} phi o D``.
* ``cone(f: M -> N)`` has basis ``s b_i`` followed by ``N``'s basis and
  ``D(s b) = -s D(b) + f(b)``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .cohom import SlicedComplex, SliceSpec, enumerate_monomials, find_weights, _as_vec
from .gca import (AlgebraMap, Generator, GradedRing, Poly, PresentationError, Report,
                  SemifreeCdga)
from .linalg import Echelon, rank


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def _deg(p: Poly) -> int:
    d = p.degree
    if d is None:
        raise PresentationError(f"coefficient {p} is not homogeneous")
    return d


@dataclass(frozen=True)
class BasisElement:
    name: str
    degree: int
    weight: int | None = None


class DgModule:
    """Semifree module ``(A^r, D)`` given by a differential matrix."""

    def __init__(self, base: SemifreeCdga, basis: Sequence, diff: Mapping | Sequence | None = None,
                 name: str = ""):
        self.base = base
        self.name = name
        bs = []
        for b in basis:
            if isinstance(b, BasisElement):
                bs.append(b)
            elif isinstance(b, tuple):
                bs.append(BasisElement(*b))
            else:
                raise TypeError(f"bad basis entry {b!r}")
        names = [b.name for b in bs]
        if len(set(names)) != len(names):
            raise PresentationError(f"duplicate basis names {names}")
        self.basis = tuple(bs)
        self.index = {b.name: i for i, b in enumerate(bs)}
        r = len(bs)
        rows: list = [dict() for _ in range(r)]
        if diff is not None:
            items = diff.items() if isinstance(diff, Mapping) else enumerate(diff)
            for i, row in items:
                i = self.index[i] if isinstance(i, str) else i
                for j, v in row.items():
                    j = self.index[j] if isinstance(j, str) else j
                    v = base(v)
                    if v.terms:
                        rows[i][j] = v
        self.diff = rows

    # -- basics -------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.basis)

    def degrees(self) -> list:
        return [b.degree for b in self.basis]

    def __repr__(self):
        return f"DgModule({self.name or '?'}: {[(b.name, b.degree) for b in self.basis]})"

    def zero(self) -> dict:
        return {}

    def basis_vector(self, j) -> dict:
        j = self.index[j] if isinstance(j, str) else j
        return {j: self.base.ring.one()}

    def D(self, elem: Mapping) -> dict:
        """Differential of an element ``{j: coefficient}``."""
        A = self.base
        out: dict = {}
        for j, a in elem.items():
            if not a.terms:
                continue
            da = A.D(a)
            if da.terms:
                out[j] = out.get(j, A.ring.zero()) + da
            s = _sign(_deg(a))
            for k, m in self.diff[j].items():
                out[k] = out.get(k, A.ring.zero()) + (a * m).scale(s)
        return {k: v for k, v in out.items() if v.terms}

    def elem_degree(self, elem: Mapping) -> int | None:
        ds = {self.base.ring.mono_degree(m) + self.basis[j].degree
              for j, a in elem.items() for m in a.terms}
        return ds.pop() if len(ds) == 1 else None

    def check(self) -> Report:
        rep = Report("dg_module")
        for i, row in enumerate(self.diff):
            for j, m in row.items():
                want = self.basis[i].degree - self.basis[j].degree + 1
                if m.degree != want:
                    rep.fail(f"entry ({self.basis[i].name},{self.basis[j].name}) = {m} "
                             f"has degree {m.degree}, expected {want}")
        if rep.ok:
            for i in range(self.rank):
                dd = self.D(self.D(self.basis_vector(i)))
                if dd:
                    rep.fail(f"D^2 {self.basis[i].name} != 0")
        return rep

    def format(self, presentation: str = "A") -> str:
        from .textio import format_poly

        lines = [f"module over {presentation} {{"]
        for b in self.basis:
            lines.append(f"  basis {b.name} : {b.degree};")
        for i, b in enumerate(self.basis):
            row = self.diff[i]
            if row:
                terms = " + ".join(f"({format_poly(v)})*{self.basis[j].name}"
                                   for j, v in sorted(row.items()))
                lines.append(f"  D {b.name} = {terms};")
        lines.append("}")
        return "\n".join(lines) + "\n"

    def sliced(self, spec: SliceSpec) -> "ModuleComplex":
        return ModuleComplex(self, spec)

    def evaluate(self, point: Mapping[str, Fraction]) -> list:
        """Constant matrix of ``M tensor k(p)``.

        Negative-degree generators go to zero and degree-zero generators to
        ``point``.
        """
        A = self.base
        vals = []
        for g in A.gens:
            vals.append(Fraction(point.get(g.name, 0)) if g.degree == 0 else None)
        out = []
        for row in self.diff:
            r = {}
            for j, m in row.items():
                c = Fraction(0)
                for mono, v in m.terms.items():
                    t = v
                    for i, e in enumerate(mono):
                        if e:
                            if vals[i] is None:
                                t = 0
                                break
                            t *= vals[i] ** e
                    c += t
                if c:
                    r[j] = c
            out.append(r)
        return out


class DgMap:
    """Module map ``b_i -> sum_k F[i][k] b'_k`` of degree ``shift``.

    The chain-map identity is ``D F = (-1)^shift F D`` and
    ``F(a m) = (-1)^{shift |a|} a F(m)``.
    """

    def __init__(self, source: DgModule, target: DgModule, matrix, shift: int = 0,
                 check: bool = False):
        self.source = source
        self.target = target
        self.shift = shift
        A = target.base
        rows: list = [dict() for _ in range(source.rank)]
        items = matrix.items() if isinstance(matrix, Mapping) else enumerate(matrix)
        for i, row in items:
            i = source.index[i] if isinstance(i, str) else i
            for k, v in row.items():
                k = target.index[k] if isinstance(k, str) else k
                v = A(v)
                if v.terms:
                    rows[i][k] = v
        self.matrix = rows
        if check:
            rep = self.check()
            if not rep.ok:
                raise PresentationError("; ".join(rep.violations))

    def __call__(self, elem: Mapping) -> dict:
        A = self.target.base
        out: dict = {}
        for i, a in elem.items():
            if not a.terms:
                continue
            s = _sign(self.shift * _deg(a))
            for k, f in self.matrix[i].items():
                out[k] = out.get(k, A.ring.zero()) + (a * f).scale(s)
        return {k: v for k, v in out.items() if v.terms}

    def check(self) -> Report:
        rep = Report("dg_map")
        S, T = self.source, self.target
        for i, row in enumerate(self.matrix):
            for k, f in row.items():
                want = S.basis[i].degree + self.shift - T.basis[k].degree
                if f.degree != want:
                    rep.fail(f"entry ({S.basis[i].name},{T.basis[k].name}) has degree "
                             f"{f.degree}, expected {want}")
        if not rep.ok:
            return rep
        for i in range(S.rank):
            e = S.basis_vector(i)
            lhs = T.D(self(e))
            rhs = self(S.D(e))
            if self.shift % 2:
                rhs = {k: -v for k, v in rhs.items()}
            diff = _sub(lhs, rhs)
            if diff:
                rep.fail(f"chain-map failure at {S.basis[i].name}")
        return rep

    def compose(self, other: "DgMap") -> "DgMap":
        """``other`` after ``self``."""
        rows = [other(self(self.source.basis_vector(i))) for i in range(self.source.rank)]
        return DgMap(self.source, other.target, dict(enumerate(rows)), self.shift + other.shift)

    def scale(self, c) -> "DgMap":
        return DgMap(self.source, self.target,
                     {i: {k: v.scale(c) for k, v in r.items()} for i, r in enumerate(self.matrix)},
                     self.shift)

    def equals(self, other: "DgMap") -> bool:
        return (self.shift == other.shift and
                all(_sub(a, b) == {} for a, b in zip(self.matrix, other.matrix)))


def _sub(a: Mapping, b: Mapping) -> dict:
    out = dict(a)
    for k, v in b.items():
        out[k] = out[k] - v if k in out else -v
    return {k: v for k, v in out.items() if v.terms}


def identity(M: DgModule) -> DgMap:
    one = M.base.ring.one()
    return DgMap(M, M, {i: {i: one} for i in range(M.rank)})


def zero_map(M: DgModule, N: DgModule, shift: int = 0) -> DgMap:
    return DgMap(M, N, {}, shift)


def free_module(A: SemifreeCdga, degrees: Sequence[int], names: Sequence[str] | None = None,
                name: str = "") -> DgModule:
    names = names or [f"e{i}" for i in range(len(degrees))]
    return DgModule(A, [BasisElement(n, d) for n, d in zip(names, degrees)], {}, name=name)


# ---------------------------------------------------------------------------
# constructions


def shift(M: DgModule, n: int, prefix: str = "s") -> DgModule:
    """``M[n]``: basis ``s^n b`` in degree ``deg b - n``."""
    tag = prefix if n == 1 else (f"{prefix}{n}" if n else "")
    basis = [BasisElement(tag + b.name if tag else b.name, b.degree - n, b.weight)
             for b in M.basis]
    rows = {}
    for i, row in enumerate(M.diff):
        rows[i] = {j: m.scale(_sign(n) * _sign(n * _deg(m))) for j, m in row.items()}
    return DgModule(M.base, basis, rows, name=f"{M.name}[{n}]")


def cone(f: DgMap, with_maps: bool = False):
    """Mapping cone of a degree-0 chain map."""
    if f.shift:
        raise PresentationError("cone needs a degree-0 map")
    S, T = f.source, f.target
    sS = shift(S, 1)
    r = S.rank
    basis = list(sS.basis) + list(T.basis)
    rows: dict = {}
    for i in range(r):
        row = {j: m for j, m in sS.diff[i].items()}
        for k, v in f.matrix[i].items():
            row[r + k] = v
        rows[i] = row
    for k in range(T.rank):
        rows[r + k] = {r + j: m for j, m in T.diff[k].items()}
    C = DgModule(S.base, basis, rows, name=f"cone({S.name}->{T.name})")
    if not with_maps:
        return C
    one = S.base.ring.one()
    inc = DgMap(T, C, {k: {r + k: one} for k in range(T.rank)})
    proj = DgMap(C, sS, {i: {i: one} for i in range(r)})
    return C, inc, proj


def direct_sum(M: DgModule, N: DgModule) -> DgModule:
    r = M.rank
    rows = {i: dict(row) for i, row in enumerate(M.diff)}
    for k, row in enumerate(N.diff):
        rows[r + k] = {r + j: v for j, v in row.items()}
    return DgModule(M.base, list(M.basis) + list(N.basis), rows, name=f"{M.name}+{N.name}")


def tensor(M: DgModule, N: DgModule) -> DgModule:
    if M.base.ring != N.base.ring:
        raise PresentationError("tensor over different bases")
    basis = []
    idx = {}
    for i, b in enumerate(M.basis):
        for k, c in enumerate(N.basis):
            idx[(i, k)] = len(basis)
            w = None if b.weight is None or c.weight is None else b.weight + c.weight
            basis.append(BasisElement(f"{b.name}.{c.name}", b.degree + c.degree, w))
    rows: dict = {}
    for (i, k), pos in idx.items():
        row: dict = {}
        for j, m in M.diff[i].items():
            q = idx[(j, k)]
            row[q] = row.get(q, M.base.ring.zero()) + m
        sb = _sign(M.basis[i].degree)
        for l, n in N.diff[k].items():
            q = idx[(i, l)]
            row[q] = row.get(q, M.base.ring.zero()) + n.scale(sb * _sign(M.basis[i].degree * _deg(n)))
        rows[pos] = {q: v for q, v in row.items() if v.terms}
    return DgModule(M.base, basis, rows, name=f"{M.name}(x){N.name}")


def base_change(M: DgModule, phi: AlgebraMap) -> DgModule:
    rows = {i: {j: phi(v) for j, v in row.items()} for i, row in enumerate(M.diff)}
    return DgModule(phi.target, M.basis, rows, name=f"{M.name}_{phi.target.name}")


def base_change_map(f: DgMap, phi: AlgebraMap) -> DgMap:
    S, T = base_change(f.source, phi), base_change(f.target, phi)
    return DgMap(S, T, {i: {k: phi(v) for k, v in row.items()} for i, row in enumerate(f.matrix)},
                 f.shift)


# ---------------------------------------------------------------------------
# duality


@dataclass(frozen=True)
class DualityContext:
    """``P = k[-d]`` and the sign making standard forms symmetric."""

    d: int
    lambdaP: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("d must be at least 1")
        if self.lambdaP not in (1, -1):
            raise ValueError("lambdaP must be +1 or -1")


def dual(M: DgModule, n: int = 0, suffix: str = "^v") -> DgModule:
    """``Hom_A(M, A[n])`` with the dual basis."""
    basis = [BasisElement(b.name + suffix, -n - b.degree,
                          None if b.weight is None else -b.weight) for b in M.basis]
    rows: dict = {j: {} for j in range(M.rank)}
    for k, row in enumerate(M.diff):
        for j, m in row.items():
            # D(b_j^v) picks up M[k][j] on b_k^v
            dj = basis[j].degree
            rows[j][k] = m.scale(-_sign(dj * (1 + _deg(m))))
    return DgModule(M.base, basis, rows, name=f"{M.name}^v")


def dual_map(f: DgMap, n: int = 0, source_dual: DgModule | None = None,
             target_dual: DgModule | None = None) -> DgMap:
    """Transpose ``f^v: N^v -> M^v`` of a degree-0 map ``f: M -> N``."""
    if f.shift:
        raise PresentationError("dual_map needs a degree-0 map")
    Mv = target_dual or dual(f.source, n)
    Nv = source_dual or dual(f.target, n)
    rows: dict = {k: {} for k in range(f.target.rank)}
    for i, row in enumerate(f.matrix):
        for k, v in row.items():
            rows[k][i] = v.scale(_sign(Nv.basis[k].degree * _deg(v)))
    return DgMap(Nv, Mv, rows)


def dagger(M: DgModule, ctx: DualityContext) -> DgModule:
    """``M^dagger = Hom(M, P^{-1})``; a basis element of degree m goes to -d-m."""
    return dual(M, ctx.d, suffix="^+")


def evaluation_map(M: DgModule, n: int = 0) -> DgMap:
    """Natural map ``M -> (M^v)^v``, ``m -> (phi -> (-1)^{|m||phi|} phi(m))``."""
    Mvv = dual(dual(M, n), n)
    one = M.base.ring.one()
    return DgMap(M, Mvv, {j: {j: one.scale(_sign(b.degree * (1 + n)))}
                          for j, b in enumerate(M.basis)})


# ---------------------------------------------------------------------------
# wedge powers


def _aux_ring(M: DgModule) -> tuple:
    A = M.base
    syms = []
    taken = set(A.names)
    for b in M.basis:
        nm = f"[{b.name}]"
        while nm in taken:
            nm += "'"
        taken.add(nm)
        syms.append(Generator(nm, b.degree, b.weight, form=1))
    ring = GradedRing(list(A.gens) + syms)
    return ring, syms


def wedge_power(M: DgModule, p: int) -> DgModule:
    """``Sym^p(M[-1])[p]``: exterior power with the derivation differential.

    Basis symbols carry parity ``degree + 1``; admissible monomials of word
    length ``p`` are exactly the nonzero monomials of the free
    graded-commutative algebra on those symbols.
    """
    if p < 0:
        raise ValueError("p must be nonnegative")
    A = M.base
    ring, syms = _aux_ring(M)
    nA = A.ring.n
    sym_ring = GradedRing(syms)
    # enumerate word-length-p monomials in the symbols (finite: odd ones once,
    # even ones bounded by p)
    monos = []

    def rec(i, left, cur):
        if i == len(syms):
            if left == 0:
                monos.append(tuple(cur))
            return
        top = min(left, 1) if sym_ring.odd[i] else left
        for e in range(top, -1, -1):
            cur.append(e)
            rec(i + 1, left - e, cur)
            cur.pop()

    rec(0, p, [])
    basis = []
    pos = {}
    for m in monos:
        deg = sum(e * s.degree for e, s in zip(m, syms))
        nm = "^".join(f"{M.basis[i].name}" + (f"^{e}" if e > 1 else "")
                      for i, e in enumerate(m) if e) or "1"
        wt = None
        if all(b.weight is not None for b in M.basis):
            wt = sum(e * b.weight for e, b in zip(m, M.basis))
        pos[m] = len(basis)
        basis.append(BasisElement(nm, deg, wt))
    # derivation images of the symbols
    images = {}
    for i, row in enumerate(M.diff):
        img = ring.zero()
        for j, c in row.items():
            img = img + c.to_ring(ring) * ring.gen(syms[j].name)
        images[nA + i] = img
    for i, g in enumerate(A.gens):
        f = A.diffs[g.name]
        if f.terms:
            images[i] = f.to_ring(ring)
    from .gca import apply_derivation

    rows: dict = {}
    for m, k in pos.items():
        full = (0,) * nA + m
        img = apply_derivation(ring.monomial(full), images, 1)
        row: dict = {}
        for mono, c in img.terms.items():
            a_part, s_part = mono[:nA], mono[nA:]
            # a_part has total degree of an algebra element, placed on the left already
            q = pos[s_part]
            row.setdefault(q, {})
            row[q][a_part] = row[q].get(a_part, 0) + c
        rows[k] = {q: Poly(A.ring, {a: v for a, v in t.items() if v}) for q, t in row.items()}
    W = DgModule(A, basis, rows, name=f"wedge^{p}({M.name})")
    return W


# ---------------------------------------------------------------------------
# module slices


class ModuleComplex(SlicedComplex):
    """Slices of ``M`` by degree and weight; keys are ``(monomial, j)``."""

    def __init__(self, M: DgModule, spec: SliceSpec):
        self.M = M
        self.spec = spec
        A = M.base
        w = spec.weights or A.weights() or find_weights(A)
        bw = [b.weight for b in M.basis]
        self._cells: dict = {}
        self._cache: dict = {}
        if w is not None and spec.max_weight is not None and all(x is not None for x in bw):
            self.wvec = [_as_vec(w[g.name])[:1] for g in A.gens]
            self.bw = bw
            self.bound = spec.max_weight
            self.exact = self._homogeneous()
        else:
            if spec.max_polydeg is None:
                raise ValueError("module slices need basis weights and max_weight, or max_polydeg")
            self.wvec = [(1,) for _ in A.gens]
            self.bw = [0] * M.rank
            self.bound = spec.max_polydeg
            self.exact = False
        self.polymode = not self.exact

    def _homogeneous(self) -> bool:
        A = self.M.base
        for i, g in enumerate(A.gens):
            for m in A.diffs[g.name].terms:
                if self._w(m) != self.wvec[i][0]:
                    return False
        for i, row in enumerate(self.M.diff):
            for j, c in row.items():
                for m in c.terms:
                    if self._w(m) + self.bw[j] != self.bw[i]:
                        return False
        return True

    def _w(self, m):
        return sum(e * v[0] for e, v in zip(m, self.wvec) if e)

    def labels(self):
        if self.exact:
            lo = min(self.bw, default=0)
            return list(range(min(lo, 0), self.bound + 1))
        return [f"<={self.bound}"]

    def cells(self, degree, label):
        key = (degree, label)
        hit = self._cells.get(key)
        if hit is not None:
            return hit
        A = self.M.base
        out = []
        for j, b in enumerate(self.M.basis):
            if self.exact:
                ws = [label - self.bw[j]]
            else:
                ws = range(self.bound + 1)
            for w in ws:
                if w < 0:
                    continue
                for m in enumerate_monomials(A.ring, degree - b.degree, (w,), self.wvec):
                    out.append((m, j))
        self._cells[key] = out
        return out

    def diff(self, key):
        hit = self._cache.get(key)
        if hit is None:
            m, j = key
            img = self.M.D({j: self.M.base.ring.monomial(m)})
            hit = {(mm, k): c for k, p in img.items() for mm, c in p.terms.items()}
            self._cache[key] = hit
        return hit

    def element(self, vec):
        A = self.M.base
        out: dict = {}
        for (m, j), c in vec.items():
            if c:
                out.setdefault(j, {})[m] = Fraction(c)
        return {j: Poly(A.ring, t) for j, t in out.items()}

    def coords(self, elem):
        return {(m, j): c for j, p in elem.items() for m, c in p.terms.items()}

    def label_of(self, key):
        m, j = key
        return self._w(m) + self.bw[j] if self.exact else self.labels()[0]

    def degree_of(self, key):
        m, j = key
        return self.M.base.ring.mono_degree(m) + self.M.basis[j].degree


# ---------------------------------------------------------------------------
# Tor amplitude


def augmentation_points(A: SemifreeCdga, rng: random.Random | None = None, tries: int = 40):
    """Rational points of ``Spec H^0`` usable as residue fields.

    A point assigns values to degree-0 generators; it is valid when every
    degree -1 differential vanishes there.  The origin is tried first,
    then small random points.
    """
    rng = rng or random.Random(0)
    zero_names = [g.name for g in A.gens if g.degree == 0]

    def valid(pt):
        for g in A.gens:
            if g.degree == -1:
                f = A.diffs[g.name]
                val = Fraction(0)
                for m, c in f.terms.items():
                    t = c
                    for i, e in enumerate(m):
                        if e:
                            gi = A.gens[i]
                            t *= pt.get(gi.name, Fraction(0)) ** e if gi.degree == 0 else 0
                    val += t
                if val:
                    return False
        return True

    pts = []
    origin = {n: Fraction(0) for n in zero_names}
    if valid(origin):
        pts.append(origin)
    for _ in range(tries):
        pt = {n: Fraction(rng.randint(-3, 3), rng.randint(1, 2)) for n in zero_names}
        if valid(pt) and pt not in pts:
            pts.append(pt)
            if len(pts) >= 2:
                break
    # solve single-variable relations t*f - 1 = 0 style: try unit values
    if not pts:
        for vals in _small_grid(len(zero_names)):
            pt = dict(zip(zero_names, vals))
            if valid(pt):
                pts.append(pt)
                break
    return pts


def _small_grid(n):
    import itertools

    cands = [Fraction(x) for x in (0, 1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2))]
    return itertools.product(cands, repeat=n) if n <= 4 else iter(())


def _point_cohomology(M: DgModule, mat: list) -> dict:
    """Dimensions of ``H^i(M tensor k(p))`` by the rank oracle."""
    degs = M.degrees()
    out = {}
    for i in sorted(set(degs)):
        cells = [j for j, d in enumerate(degs) if d == i]
        rk_out = rank([{k: v for k, v in mat[j].items()} for j in cells])
        rk_in = rank([mat[j] for j, d in enumerate(degs) if d == i - 1])
        h = len(cells) - rk_out - rk_in
        if h:
            out[i] = h
    return out


def minimalize(M: DgModule, mat: list) -> dict:
    """Strip invertible constant entries; returns residual ranks per degree.

    This is the unit-elimination route: each nonzero constant entry between
    adjacent degrees cancels one basis element on each side.
    """
    alive = set(range(M.rank))
    mat = [dict(r) for r in mat]
    degs = M.degrees()
    changed = True
    while changed:
        changed = False
        for i in sorted(alive):
            for j, v in list(mat[i].items()):
                if j in alive and v:
                    # Gaussian elimination: remove i and j, fix up the rest
                    for k in alive:
                        if k != i and j in mat[k] and mat[k][j]:
                            c = mat[k][j] / v
                            for jj, vv in mat[i].items():
                                nv = mat[k].get(jj, 0) - c * vv
                                if nv:
                                    mat[k][jj] = nv
                                else:
                                    mat[k].pop(jj, None)
                    alive.discard(i)
                    alive.discard(j)
                    for k in alive:
                        mat[k].pop(i, None)
                        mat[k].pop(j, None)
                    changed = True
                    break
            if changed:
                break
    out: dict = {}
    for i in alive:
        out[degs[i]] = out.get(degs[i], 0) + 1
    return out


@dataclass
class TorAmplitude:
    interval: tuple | None
    points: list
    per_point: list

    @property
    def zero(self) -> bool:
        return self.interval is None

    def __str__(self):
        return "zero module" if self.interval is None else f"[{self.interval[0]}, {self.interval[1]}]"

    def to_dict(self):
        return {"amplitude": None if self.interval is None else list(self.interval),
                "zero_module": self.interval is None,
                "points": [{k: str(v) for k, v in p.items()} for p in self.points],
                "dims": [{str(k): v for k, v in d.items()} for d in self.per_point]}


def tor_amplitude(M: DgModule, rng: random.Random | None = None, oracle: bool = True) -> TorAmplitude:
    """Range of degrees where ``M tensor k(p)`` has cohomology.

    Probed at the origin and at one further rational point of ``Spec H^0``.
    This is a semi-decision: it is exact for modules whose Tor amplitude is
    detected at those points.
    """
    pts = augmentation_points(M.base, rng)
    if not pts:
        raise PresentationError("base has no rational augmentation to probe")
    per = []
    lo = hi = None
    for pt in pts:
        mat = M.evaluate(pt)
        dims = minimalize(M, mat)
        if oracle:
            check = _point_cohomology(M, mat)
            if check != dims:
                raise AssertionError(f"unit elimination {dims} disagrees with rank oracle {check}")
        per.append(dims)
        for d in dims:
            lo = d if lo is None else min(lo, d)
            hi = d if hi is None else max(hi, d)
    return TorAmplitude(None if lo is None else (lo, hi), pts, per)


# ---------------------------------------------------------------------------
# module text format


def parse_module(text: str, A: SemifreeCdga) -> DgModule:
    """Parse ``module over NAME { basis e : 0; ...; D e = x*f; }``."""
    import re

    from .textio import ParseError, parse_poly

    m = re.match(r"\s*module\s+over\s+(\S+)\s*\{(.*)\}\s*$", text, re.S)
    if not m:
        raise ParseError("expected 'module over NAME { ... }'", 1, 1)
    body = m.group(2)
    basis = []
    eqs = []
    for st in [s.strip() for s in body.split(";")]:
        if not st:
            continue
        b = re.fullmatch(r"basis\s+([A-Za-z_][\w']*)\s*:\s*([-+]?\d+)(?:\s+weight\s+(\d+))?", st)
        if b:
            basis.append(BasisElement(b[1], int(b[2]), int(b[3]) if b[3] else None))
            continue
        e = re.fullmatch(r"D\s+([A-Za-z_][\w']*)\s*=\s*(.+)", st, re.S)
        if e:
            eqs.append((e[1], e[2]))
            continue
        raise ParseError(f"unknown module statement {st!r}")
    syms = [Generator(b.name, b.degree) for b in basis]
    ring = GradedRing(list(A.gens) + syms)
    nA = A.ring.n
    rows: dict = {}
    names = [b.name for b in basis]
    for nm, expr in eqs:
        if nm not in names:
            raise ParseError(f"differential for unknown basis element {nm}")
        p = parse_poly(expr, ring)
        row: dict = {}
        for mono, c in p.terms.items():
            sym = [i for i, e in enumerate(mono[nA:]) if e]
            if len(sym) != 1 or mono[nA + sym[0]] != 1:
                raise ParseError(f"D {nm}: term is not linear in basis elements")
            row.setdefault(sym[0], {})[mono[:nA]] = c
        rows[names.index(nm)] = {j: Poly(A.ring, t) for j, t in row.items()}
    return DgModule(A, basis, rows)


# ---------------------------------------------------------------------------
# quasi-isomorphism lifting


def _entry_basis(ring: GradedRing, degree: int, max_polydeg: int) -> list:
    if degree > 0:
        return []
    return enumerate_monomials(ring, degree, None, None, max_polydeg, 0)


def _defect_vector(rows_out: dict, tag, i, elem: Mapping):
    for k, v in elem.items():
        for m, c in v.terms.items():
            rows_out[(tag, i, k, m)] = rows_out.get((tag, i, k, m), 0) + c


def lift_quis(phi_alg: AlgebraMap, M: DgModule, N: DgModule, f: DgMap, max_polydeg: int = 2,
              spec: SliceSpec | None = None) -> DgMap:
    """Lift a map ``f: M_A -> N_A`` along ``phi_alg: B -> A`` up to homotopy.

    Solves one linear system for a chain map ``g: M -> N`` over ``B`` and a
    homotopy ``h`` over ``A`` with ``phi(g) - f = D h + h D``.  Entries are
    searched among monomials of polynomial degree at most ``max_polydeg``.
    When ``spec`` is given, ``H^0 B -> H^0 A`` is first checked to be an
    isomorphism on the weight slices, since otherwise no lift need exist.
    """
    B, A = phi_alg.source, phi_alg.target
    if spec is not None:
        from .cotangent import _map_rank
        from .cohom import AlgebraComplex, is_weight_homogeneous, slice_cohomology
        w = spec.weights or A.weights() or find_weights(A)
        if w is None or spec.max_weight is None:
            raise PresentationError("the H^0 check needs weights and max_weight")
        sp = SliceSpec((-1, 0), max_weight=spec.max_weight, weights=w)
        CA = AlgebraComplex(A.ring, A.D, sp, w, is_weight_homogeneous(A, w))
        wb = {g.name: w.get(g.name, 0) for g in B.gens}
        CB = AlgebraComplex(B.ring, B.D, sp, wb, CA.exact)
        conv = A.ring.converter(B.ring)
        for lab in CA.labels():
            hb = slice_cohomology(CB, 0, lab, reps=False).dim
            ha = slice_cohomology(CA, 0, lab, reps=False).dim
            r = _map_rank(CB, CA, conv, 0, lab)
            if not (hb == ha == r):
                raise PresentationError(f"H^0 B -> H^0 A is not an isomorphism in weight {lab}")
    MA, NA = base_change(M, phi_alg), base_change(N, phi_alg)
    unknowns = []  # (kind, i, k, monomial)
    for i, b in enumerate(M.basis):
        for k, c in enumerate(N.basis):
            for m in _entry_basis(B.ring, b.degree - c.degree, max_polydeg):
                unknowns.append(("g", i, k, m))
            for m in _entry_basis(A.ring, b.degree - c.degree - 1, max_polydeg):
                unknowns.append(("h", i, k, m))
    rows = []
    for kind, i, k, m in unknowns:
        vec: dict = {}
        if kind == "g":
            g = DgMap(M, N, {i: {k: B.ring.monomial(m)}})
            for j in range(M.rank):
                e = M.basis_vector(j)
                _defect_vector(vec, "chain", j, _sub(N.D(g(e)), g(M.D(e))))
                _defect_vector(vec, "homotopy", j, base_change_map(g, phi_alg)(MA.basis_vector(j)))
        else:
            h = DgMap(MA, NA, {i: {k: A.ring.monomial(m)}}, shift=-1)
            for j in range(M.rank):
                e = MA.basis_vector(j)
                dh = NA.D(h(e))
                hd = h(MA.D(e))
                tot: dict = dict(dh)
                for kk, v in hd.items():
                    tot[kk] = tot[kk] + v if kk in tot else v
                _defect_vector(vec, "homotopy", j, {kk: -v for kk, v in tot.items()})
        rows.append({key: c for key, c in vec.items() if c})
    target: dict = {}
    for j in range(M.rank):
        _defect_vector(target, "homotopy", j, f(MA.basis_vector(j)))
    e = Echelon(track=True)
    for r in rows:
        e.add(r)
    sol = e.express({k: v for k, v in target.items() if v})
    if sol is None:
        raise PresentationError(f"no lift with entries of polynomial degree <= {max_polydeg}")
    mat: dict = {}
    for idx, c in sol.items():
        kind, i, k, m = unknowns[idx]
        if kind == "g" and c:
            row = mat.setdefault(i, {})
            row[k] = row.get(k, B.ring.zero()) + B.ring.monomial(m).scale(c)
    g = DgMap(M, N, mat)
    rep = g.check()
    if not rep.ok:
        raise AssertionError("lifted map failed the chain-map check: " + "; ".join(rep.violations))
    return g


def calibrate(d: int) -> DualityContext:
    """Pick the sign for which the standard form on ``T^*[d] Spec k[x]`` is symmetric."""
    from .shifted import standard_symmetry_sign

    s = standard_symmetry_sign(d)
    if s is None:
        raise AssertionError(f"no sign makes the standard form symmetric for d={d}")
    return DualityContext(d, s)
