"""Shifted symmetric complexes, Lagrangians and the middle quadratic block.

A symmetric complex is a free module ``M`` with a map ``φ: M^+ -> M``, where
``M^+ = Hom(M, A[d])``, that is a quasi-isomorphism and satisfies
``φ^+ = λ_P · ev ∘ φ``.  Lagrangians are coordinate ones: a subset ``N`` of
the basis spanning a subcomplex, such that ``φ`` maps the annihilator of
``N`` isomorphically onto ``N``.  Witt-zero witnesses are always inputs.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .cohom import SliceSpec, find_weights, slice_cohomology
from .dgmod import (BasisElement, DgMap, DgModule, DualityContext, cone, dagger, direct_sum,
                    dual_map, evaluation_map)
from .gca import PresentationError, Report
from .linalg import Echelon, det


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


@dataclass
class SymmetricComplex:
    M: DgModule
    phi: DgMap
    ctx: DualityContext

    @property
    def d(self) -> int:
        return self.ctx.d


def _iso_blocks(phi: DgMap) -> tuple:
    """Exact isomorphism test through the diagonal degree blocks."""
    A = phi.target.base
    S, T = phi.source, phi.target
    dets = {}
    for dg in sorted({b.degree for b in S.basis} | {b.degree for b in T.basis}):
        rows = [i for i, b in enumerate(S.basis) if b.degree == dg]
        cols = [j for j, b in enumerate(T.basis) if b.degree == dg]
        if len(rows) != len(cols):
            return False, {dg: "rank mismatch"}
        if not rows:
            continue
        D = det([[phi.matrix[i].get(j, A.ring.zero()) for j in cols] for i in rows])
        dets[dg] = str(D)
        if not D.terms or D.polydeg() != 0:
            return False, dets
    return True, dets


def cone_cohomology(phi: DgMap, spec: SliceSpec, lo: int, hi: int) -> list:
    """Nonzero slices ``(degree, label, dim)`` of the cone of ``phi``."""
    C = cone(phi)
    A = C.base
    w = spec.weights or A.weights() or find_weights(A)
    sp = SliceSpec((lo, hi), max_polydeg=spec.max_polydeg, max_weight=spec.max_weight, weights=w)
    X = C.sliced(sp)
    bad = []
    for i in range(lo, hi + 1):
        for lab in X.labels():
            h = slice_cohomology(X, i, lab, reps=False).dim
            if h:
                bad.append((i, lab, h))
    return bad


def is_quis(phi: DgMap, spec: SliceSpec | None = None) -> tuple:
    """``(ok, method, details)``: exact isomorphism first, cone slices second."""
    iso, dets = _iso_blocks(phi)
    if iso:
        return True, "isomorphism", {"block_determinants": {str(k): v for k, v in dets.items()}}
    if spec is None:
        return False, "isomorphism", {"block_determinants": {str(k): v for k, v in dets.items()}}
    degs = [b.degree for b in phi.source.basis] + [b.degree for b in phi.target.basis] or [0]
    bad = cone_cohomology(phi, spec, min(degs) - 1, max(degs) + 1)
    return not bad, "cone slices", {"cone_cohomology": [list(map(str, b)) for b in bad]}


def is_symmetric(phi: DgMap, ctx: DualityContext) -> bool:
    lhs = dual_map(phi, ctx.d)
    rhs = phi.compose(evaluation_map(phi.target, ctx.d)).scale(ctx.lambdaP)
    return lhs.equals(rhs)


def check_symmetric(M: DgModule, phi: DgMap, ctx: DualityContext,
                    spec: SliceSpec | None = None) -> Report:
    rep = Report("symmetric")
    if phi.source.rank != M.rank or phi.target.rank != M.rank:
        rep.fail("φ must map M^+ to M")
        return rep
    chain = phi.check()
    if not chain.ok:
        for v in chain.violations:
            rep.fail(v)
        return rep
    ok, method, details = is_quis(phi, spec)
    rep.data.update(details)
    rep.data["quis_method"] = method
    if not ok:
        rep.fail("φ is not a quasi-isomorphism")
    if not is_symmetric(phi, ctx):
        rep.fail(f"φ is not symmetric for λ_P = {ctx.lambdaP}")
    return rep


def hyperbolic(N: DgModule, ctx: DualityContext) -> SymmetricComplex:
    """``N ⊕ N^+`` with the form pairing the two summands."""
    Np = dagger(N, ctx)
    M = direct_sum(N, Np)
    Mp = dagger(M, ctx)
    r = N.rank
    one = N.base.ring.one()
    rows = {}
    for i, b in enumerate(N.basis):
        rows[i] = {r + i: one}
        rows[r + i] = {i: one.scale(ctx.lambdaP * _sign(b.degree * (1 + ctx.d)))}
    return SymmetricComplex(M, DgMap(Mp, M, rows), ctx)


def rank_one(A, degree: int, ctx: DualityContext, c=1, name: str = "q") -> SymmetricComplex:
    """Rank-one form ``c·q^2`` on ``A·q``, symmetric only in the middle degree."""
    M = DgModule(A, [BasisElement(name, degree)], {}, name=name)
    return SymmetricComplex(M, DgMap(dagger(M, ctx), M, {0: {0: A(c)}}), ctx)


def orthogonal_sum(a: SymmetricComplex, b: SymmetricComplex) -> SymmetricComplex:
    if a.ctx != b.ctx:
        raise PresentationError("orthogonal sum needs a common duality context")
    M = direct_sum(a.M, b.M)
    r = a.M.rank
    rows = {i: dict(row) for i, row in enumerate(a.phi.matrix)}
    for k, row in enumerate(b.phi.matrix):
        rows[r + k] = {r + j: v for j, v in row.items()}
    return SymmetricComplex(M, DgMap(dagger(M, a.ctx), M, rows), a.ctx)


# ---------------------------------------------------------------------------
# Lagrangians


def sub_module(M: DgModule, idx: Sequence[int], name: str = "") -> DgModule:
    """Span of a basis subset; it must be closed under ``D``."""
    keep = list(idx)
    pos = {j: p for p, j in enumerate(keep)}
    rows = {}
    for p, i in enumerate(keep):
        row = {}
        for j, v in M.diff[i].items():
            if j not in pos:
                raise PresentationError(f"{M.basis[i].name} leaves the span under D")
            row[pos[j]] = v
        rows[p] = row
    return DgModule(M.base, [M.basis[i] for i in keep], rows, name=name or f"{M.name}|sub")


@dataclass
class LagrangianData:
    """A coordinate Lagrangian ``N ⊂ M`` (basis indices) with its checks."""

    sym: SymmetricComplex
    indices: list
    N: DgModule | None = None
    swaps: list = field(default_factory=list)
    report: Report | None = None

    @property
    def names(self) -> list:
        return [self.sym.M.basis[i].name for i in self.indices]


def check_lagrangian(sym: SymmetricComplex, idx: Sequence[int]) -> Report:
    """``N`` closed, isotropic (``φ`` sends the annihilator into ``N``) and
    nondegenerate (that restriction is an isomorphism)."""
    rep = Report("lagrangian")
    M, phi = sym.M, sym.phi
    idx = sorted(idx)
    try:
        N = sub_module(M, idx)
    except PresentationError as e:
        rep.fail(str(e))
        return rep
    rep.data["N"] = [b.name for b in N.basis]
    inside = set(idx)
    outside = [j for j in range(M.rank) if j not in inside]
    if len(outside) != len(idx):
        rep.fail("a Lagrangian has half the rank")
        return rep
    for j in outside:
        for k in phi.matrix[j]:
            if k not in inside:
                rep.fail(f"not isotropic: φ({phi.source.basis[j].name}) meets {M.basis[k].name}")
    if not rep.ok:
        return rep
    sub = DgMap(sub_module_dual(phi.source, outside), N,
                {p: {idx.index(k): v for k, v in phi.matrix[j].items()}
                 for p, j in enumerate(outside)})
    iso, dets = _iso_blocks(sub)
    rep.data["block_determinants"] = {str(k): v for k, v in dets.items()}
    if not iso:
        rep.fail("the annihilator does not map isomorphically onto N")
    return rep


def sub_module_dual(Mp: DgModule, outside: Sequence[int]) -> DgModule:
    """Annihilator of a coordinate subcomplex inside ``M^+``."""
    return sub_module(Mp, outside, name=f"{Mp.name}|ann")


def partner(sym: SymmetricComplex, idx: Sequence[int], i: int) -> int | None:
    """The basis element outside ``N`` paired with ``N``'s element ``i`` by a unit."""
    inside = set(idx)
    for j in range(sym.M.rank):
        if j in inside:
            continue
        v = sym.phi.matrix[j].get(i)
        if v is not None and v.terms and v.polydeg() == 0:
            return j
    return None


def _partner_block(sym: SymmetricComplex, idx: Sequence[int], block: Sequence[int]):
    """Elements outside ``N`` whose constant pairings with ``block`` form an invertible matrix."""
    inside = set(idx)
    ech = Echelon()
    out = []
    for j in range(sym.M.rank):
        if j in inside:
            continue
        row = {}
        for i in block:
            v = sym.phi.matrix[j].get(i)
            if v is not None and v.terms and v.polydeg() == 0:
                row[i] = v.constant_term()
        if row and ech.add(row):
            out.append(j)
            if len(out) == len(block):
                return out
    return None


def connectivity_floor(d: int) -> int:
    """``N^+`` must vanish in degrees ``>= -⌊(d-1)/2⌋``."""
    return -((d - 1) // 2)


def dual_cohomology_ok(N: DgModule, ctx: DualityContext, spec: SliceSpec | None = None) -> tuple:
    """Check ``H^i(N^+) = 0`` for ``i >= -⌊(d-1)/2⌋``.

    Syntactic when every basis element of ``N^+`` sits below the floor;
    otherwise computed on slices when ``spec`` is given.
    """
    floor = connectivity_floor(ctx.d)
    Np = dagger(N, ctx)
    top = max((b.degree for b in Np.basis), default=floor - 1)
    if top < floor:
        return True, {}
    if spec is None:
        return False, {"reason": f"N^+ has basis elements in degree {top} >= {floor}"}
    w = spec.weights or N.base.weights() or find_weights(N.base)
    sp = SliceSpec((floor, top), max_polydeg=spec.max_polydeg, max_weight=spec.max_weight,
                   weights=w)
    X = Np.sliced(sp)
    bad = {}
    for i in range(floor, top + 1):
        for lab in X.labels():
            h = slice_cohomology(X, i, lab, reps=False).dim
            if h:
                bad[f"{i}@{lab}"] = h
    return not bad, bad


def surgery_to_lagrangian(sym: SymmetricComplex, witness: Sequence, spec: SliceSpec | None = None,
                          max_steps: int = 64) -> LagrangianData:
    """Validate a Lagrangian witness and push it into the connectivity window.

    ``witness`` lists basis names (or indices) of ``N``.  Each step swaps the
    deepest element of ``N`` below the window with its partner; the swap is
    kept only if the result is again a Lagrangian.
    """
    M = sym.M
    idx = sorted(M.index[w] if isinstance(w, str) else w for w in witness)
    rep = check_lagrangian(sym, idx)
    if not rep.ok:
        raise PresentationError("witness is not a Lagrangian: " + "; ".join(rep.violations))
    lo = -(sym.d // 2)
    swaps = []
    for _ in range(max_steps):
        deep = [i for i in idx if M.basis[i].degree < lo]
        if not deep:
            break
        k = min(M.basis[i].degree for i in deep)
        block = [i for i in deep if M.basis[i].degree == k]
        part = _partner_block(sym, idx, block)
        if part is None:
            raise PresentationError("no unit partners for "
                                    + ", ".join(M.basis[i].name for i in block))
        new = sorted([i for i in idx if i not in block] + part)
        r2 = check_lagrangian(sym, new)
        if not r2.ok:
            raise PresentationError("swapping " + ", ".join(M.basis[i].name for i in block)
                                    + " breaks the Lagrangian: " + "; ".join(r2.violations))
        swaps.extend((M.basis[i].name, M.basis[j].name) for i, j in zip(block, part))
        idx, rep = new, r2
    else:
        raise PresentationError("surgery did not terminate")
    N = sub_module(M, idx, name="N")
    ok, details = dual_cohomology_ok(N, sym.ctx, spec)
    rep.data["connectivity"] = {"ok": ok, **details}
    if not ok:
        rep.fail("connectivity bound fails after surgery")
    return LagrangianData(sym, idx, N, swaps, rep)


# ---------------------------------------------------------------------------
# the middle quadratic block


@dataclass
class QuadraticSplit:
    middle: SymmetricComplex | None
    rest: SymmetricComplex
    middle_indices: list
    report: Report


def _restrict(sym: SymmetricComplex, idx: Sequence[int]) -> SymmetricComplex:
    M = sub_module(sym.M, idx)
    Mp = dagger(M, sym.ctx)
    pos = {j: p for p, j in enumerate(idx)}
    rows = {}
    for p, j in enumerate(idx):
        rows[p] = {pos[k]: v for k, v in sym.phi.matrix[j].items() if k in pos}
    return SymmetricComplex(M, DgMap(Mp, M, rows), sym.ctx)


def split_off_quadratic(sym: SymmetricComplex, spec: SliceSpec | None = None) -> QuadraticSplit:
    """Split ``M = P_mid ⊕ M'`` along self-paired middle-degree elements.

    An element ``q`` of degree ``-d/2`` is self-paired when ``φ(q^+)`` is a
    unit multiple of ``q`` and no other element pairs with ``q``.  The middle
    block can only be nonzero when ``d ≡ 2 mod 4``; for ``d ≡ 0 mod 4`` the
    middle pairing is antisymmetric and has no diagonal.
    """
    d = sym.d
    M, phi = sym.M, sym.phi
    rep = Report("quadratic_split")
    mid: list = []
    if d % 4 == 2:
        for i, b in enumerate(M.basis):
            if b.degree != -d // 2:
                continue
            v = phi.matrix[i].get(i)
            if v is None or not v.terms or v.polydeg() != 0:
                continue
            if set(phi.matrix[i]) != {i}:
                continue
            if any(i in phi.matrix[j] for j in range(M.rank) if j != i):
                continue
            if M.diff[i] or any(i in M.diff[j] for j in range(M.rank)):
                continue
            mid.append(i)
    rest_idx = [i for i in range(M.rank) if i not in set(mid)]
    rest = _restrict(sym, rest_idx)
    middle = _restrict(sym, mid) if mid else None
    for name, part in (("middle", middle), ("rest", rest)):
        if part is None:
            continue
        r = check_symmetric(part.M, part.phi, sym.ctx, spec)
        rep.data[name] = r.to_dict()
        if not r.ok:
            rep.fail(f"{name} block is not symmetric: " + "; ".join(r.violations))
    rep.data["middle_basis"] = [M.basis[i].name for i in mid]
    return QuadraticSplit(middle, rest, mid, rep)
