"""Cotangent complexes of presentations and the connectivity criterion.

For a semifree presentation the cotangent complex needs no cofibrant
replacement: ``L_A`` is free on the ``dz_i`` with ``D(dz_i) = -d(f_i)``.
Relative versions are only formed along prefix inclusions ``B ⊂ A`` (the
generators of ``B`` are the first generators of ``A``).
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .cohom import (AlgebraComplex, _boundaries, SliceSpec, algebra_complex, find_weights,
                    is_weight_homogeneous, slice_cohomology)
from .derham import DeRham, dname
from .dgmod import BasisElement, DgMap, DgModule
from .gca import PresentationError, Report, SemifreeCdga, check_presentation
from .linalg import Echelon, nullspace


@dataclass
class CotangentComplex:
    module: DgModule
    derham: DeRham

    def d(self, a) -> dict:
        """Universal derivation ``A -> L_A`` as a module element."""
        return self.derham.one_form_coeffs(self.derham.d(a))

    @property
    def basis(self):
        return self.module.basis


def _weights(A: SemifreeCdga) -> dict:
    w = A.weights() or find_weights(A)
    return w or {}


def cotangent_complex(A: SemifreeCdga, validate: bool = True) -> CotangentComplex:
    if validate:
        rep = check_presentation(A)
        if not rep.ok:
            raise PresentationError("invalid presentation: " + "; ".join(rep.violations))
    dr = DeRham(A)
    w = _weights(A)
    basis = [BasisElement(dname(g.name), g.degree, w.get(g.name)) for g in A.gens]
    rows = {}
    for i, g in enumerate(A.gens):
        f = A.diffs[g.name]
        if f.terms:
            rows[i] = dr.one_form_coeffs(-dr.d(f))
    return CotangentComplex(DgModule(A, basis, rows, name=f"L_{A.name or 'A'}"), dr)


def _check_prefix(B: SemifreeCdga, A: SemifreeCdga):
    nb = len(B.gens)
    if tuple(A.gens[:nb]) != tuple(B.gens):
        raise PresentationError("B is not a prefix sub-presentation of A")
    for g in B.gens:
        if A.diffs[g.name] != B.diffs[g.name].to_ring(A.ring):
            raise PresentationError(f"differential of {g.name} differs between B and A")


@dataclass
class CotangentTriangle:
    LB_A: DgModule  # L_B tensor A
    LA: DgModule
    LAB: DgModule  # L_{A/B}
    inclusion: DgMap
    projection: DgMap


def relative_cotangent_triangle(B: SemifreeCdga, A: SemifreeCdga) -> CotangentTriangle:
    """``L_B ⊗ A -> L_A -> L_{A/B}`` for a prefix inclusion."""
    _check_prefix(B, A)
    LA = cotangent_complex(A).module
    nb = len(B.gens)
    one = A.ring.one()
    LB_A = DgModule(A, LA.basis[:nb], {i: dict(LA.diff[i]) for i in range(nb)},
                    name="L_B(x)A")
    rows = {}
    for i in range(nb, LA.rank):
        rows[i - nb] = {j - nb: v for j, v in LA.diff[i].items() if j >= nb}
    LAB = DgModule(A, LA.basis[nb:], rows, name="L_A/B")
    inc = DgMap(LB_A, LA, {i: {i: one} for i in range(nb)})
    proj = DgMap(LA, LAB, {i: {i - nb: one} for i in range(nb, LA.rank)})
    return CotangentTriangle(LB_A, LA, LAB, inc, proj)


# ---------------------------------------------------------------------------
# the connectivity criterion


def _map_rank(CB: AlgebraComplex, CA: AlgebraComplex, conv, degree, label) -> int:
    """Rank of ``H^i(B) -> H^i(A)`` in one slice."""
    cells = CB.cells(degree, label)
    cols: dict = {}
    for idx, k in enumerate(cells):
        for kk, v in CB.diff(k).items():
            cols.setdefault(kk, {})[idx] = v
    z = nullspace(list(cols.values()), range(len(cells)))
    e = Echelon()
    for k in CA.cells(degree - 1, label):
        e.add(CA.diff(k))
    base = e.rank
    for v in z:
        e.add({conv(cells[i]): c for i, c in v.items()})
    return e.rank - base


@dataclass
class ConnectivityReport:
    d: int
    cond_i: bool
    cond_ii: bool
    agree: bool
    moreover: bool | None
    details: dict = field(default_factory=dict)
    exact: bool = True

    def to_dict(self):
        return {"d": self.d, "condition_i": self.cond_i, "condition_ii": self.cond_ii,
                "agree": self.agree, "moreover_isomorphism": self.moreover,
                "exact": self.exact, "details": self.details}


def check_connectivity(B: SemifreeCdga, A: SemifreeCdga, d: int, spec: SliceSpec) -> ConnectivityReport:
    """Evaluate both sides of the connectivity equivalence on slices.

    (i) ``H^0 B -> H^0 A`` onto and ``H^i(L_{A/B}) = 0`` for ``i >= -d+1``;
    (ii) ``H^i B -> H^i A`` iso for ``i > -d+1`` and onto at ``-d+1``.
    When they hold, also compare ``H^{-d}(A/B)`` with ``H^{-d}(L_{A/B})``.
    Condition (ii) is computed from map ranks, not from the quotient, so
    the two sides use independent eliminations.
    """
    if d < 1:
        raise ValueError("d must be at least 1")
    _check_prefix(B, A)
    w = spec.weights or A.weights() or find_weights(A)
    if w is None or spec.max_weight is None:
        raise PresentationError("connectivity checks need a weight grading and max_weight")
    sp = SliceSpec((-d, 0), max_weight=spec.max_weight, weights=w)
    exact = is_weight_homogeneous(A, w)
    wb = {g.name: w[g.name] for g in B.gens}
    CA = algebra_complex(A, sp)
    CB = AlgebraComplex(B.ring, B.D, sp, wb, exact)
    conv = A.ring.converter(B.ring)
    nb = len(B.gens)
    quotient = AlgebraComplex(A.ring, A.D, sp, w, exact,
                              allow=lambda m: any(m[nb:]))
    tri = relative_cotangent_triangle(B, A)
    LAB = tri.LAB
    LABw = DgModule(A, [BasisElement(b.name, b.degree, w[b.name[2:-1]]) for b in LAB.basis],
                    LAB.diff, name=LAB.name)
    LC = LABw.sliced(sp)
    details: dict = {"H_LAB": {}, "rank_H": {}, "dims_B": {}, "dims_A": {}}
    labels = CA.labels()
    # (i)
    ci = True
    for lab in labels:
        hA = slice_cohomology(CA, 0, lab, reps=False).dim
        r0 = _map_rank(CB, CA, conv, 0, lab)
        if r0 != hA:
            ci = False
    for i in range(-d + 1, 1):
        tot = sum(slice_cohomology(LC, i, lab, reps=False).dim for lab in LC.labels())
        details["H_LAB"][i] = tot
        if tot:
            ci = False
    # (ii)
    cii = True
    for i in range(-d + 1, 1):
        dB = dA = rk = 0
        for lab in labels:
            hb = slice_cohomology(CB, i, lab, reps=False).dim
            ha = slice_cohomology(CA, i, lab, reps=False).dim
            r = _map_rank(CB, CA, conv, i, lab)
            dB += hb
            dA += ha
            rk += r
            if r != ha or (i > -d + 1 and r != hb):
                cii = False
        details["dims_B"][i], details["dims_A"][i], details["rank_H"][i] = dB, dA, rk
    more = None
    if ci and cii:
        per = {str(lab): _moreover_slice(CA, quotient, LC, nb, d, lab, labels) for lab in labels}
        more = all(a == b for a, b in per.values())
        details["moreover"] = per
    return ConnectivityReport(d, ci, cii, ci == cii, more, details, exact)


def _moreover_slice(CA, Q, LC, nb, d, lab, labels):
    """``(dim (H^0A ⊗ H^{-d}K)_w, dim H^{-d}(L_{A/B})_w)`` for one weight.

    ``K`` is modelled by the quotient ``A/B`` (monomials using a generator
    outside ``B``).  Since ``K`` has no cohomology above ``-d``,
    ``H^{-d}(A ⊗_B K) = H^0A ⊗_{H^0B} H^{-d}K``, which is ``H^{-d}K`` modulo
    ``I·H^{-d}K`` with ``I = ker(H^0B -> H^0A)``.
    """
    hk = slice_cohomology(Q, -d, lab, reps=False).dim
    bd = _boundaries(Q, -d, lab, set(Q.cells(-d, lab)))
    base = bd.rank
    for w1 in labels:
        if w1 > lab:
            continue
        cells0 = CA.cells(0, w1)
        ideal = _boundaries(CA, 0, w1, {m for m in cells0 if not any(m[nb:])})
        if not ideal.rank:
            continue
        reps = slice_cohomology(Q, -d, lab - w1).representatives
        for row in ideal.pivots.values():
            i = CA.element(row)
            for z in reps:
                bd.add((i * z).terms)
    hl = slice_cohomology(LC, -d, lab, reps=False).dim if lab in LC.labels() else 0
    return (hk - (bd.rank - base), hl)


def is_finitely_presented_criterion(A: SemifreeCdga) -> Report:
    """Finite presentation of ``H^0`` and perfectness of ``L_A``.

    Both hold syntactically for a finite cell presentation: ``H^0(A)`` is
    the polynomial ring on the degree-0 generators modulo the images of the
    degree -1 differentials, and ``L_A`` is finite free.
    """
    rep = Report("finitely_presented")
    v = check_presentation(A)
    if not v.ok:
        rep.fail("not a valid presentation")
        return rep
    rep.data["H0_generators"] = [g.name for g in A.gens if g.degree == 0]
    rep.data["H0_relations"] = [str(A.diffs[g.name]) for g in A.gens if g.degree == -1]
    rep.data["cotangent_rank"] = len(A.gens)
    rep.data["criterion"] = "H0 finitely presented and L_A perfect"
    return rep
