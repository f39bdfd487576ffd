"""Exact linear algebra over Q on sparse row dictionaries.

Matrices are lists of rows; a row is a ``dict`` from column key to
nonzero :class:`~fractions.Fraction`.  Column keys only need to be hashable
and sortable within one call.  Every routine is exact.

:func:`bareiss_rank` is an independent dense fraction-free rank over the
integers; it is used to cross-check the sparse elimination.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Hashable, Iterable, Sequence

Row = dict


def _clean(row):
    return {k: Fraction(v) for k, v in row.items() if v}


class Echelon:
    """Incremental reduced row echelon form.

    ``add`` reduces a row against the current basis and stores it if it is
    new.  Optional bookkeeping records each stored row as a combination of
    the inputs, which :meth:`express` uses to solve ``sum c_i r_i = v``.
    """

    def __init__(self, track: bool = False):
        self.pivots: dict = {}  # pivot column -> row (pivot coeff 1)
        self.track = track
        self.combos: dict = {}  # pivot column -> combination of input indices
        self.n_in = 0

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Row, combo: dict | None = None):
        # stored rows contain no foreign pivot columns, so one pass suffices
        row = dict(row)
        for k in [k for k in row if k in self.pivots]:
            p = self.pivots[k]
            c = row[k]
            for kk, vv in p.items():
                v = row.get(kk, 0) - c * vv
                if v:
                    row[kk] = v
                else:
                    row.pop(kk, None)
            if combo is not None:
                for kk, vv in self.combos[k].items():
                    v = combo.get(kk, 0) - c * vv
                    if v:
                        combo[kk] = v
                    else:
                        combo.pop(kk, None)
        return row, combo

    def add(self, row: Row) -> bool:
        idx = self.n_in
        self.n_in += 1
        combo = {idx: Fraction(1)} if self.track else None
        row, combo = self.reduce(_clean(row), combo)
        if not row:
            return False
        piv = min(row)
        c = row[piv]
        row = {k: v / c for k, v in row.items()}
        if combo is not None:
            combo = {k: v / c for k, v in combo.items()}
        # keep rows fully reduced against the new pivot
        for k, p in self.pivots.items():
            if piv in p:
                f = p[piv]
                for kk, vv in row.items():
                    v = p.get(kk, 0) - f * vv
                    if v:
                        p[kk] = v
                    else:
                        p.pop(kk, None)
                if self.track:
                    cc = self.combos[k]
                    for kk, vv in combo.items():
                        v = cc.get(kk, 0) - f * vv
                        if v:
                            cc[kk] = v
                        else:
                            cc.pop(kk, None)
        self.pivots[piv] = row
        if self.track:
            self.combos[piv] = combo
        return True

    def contains(self, row: Row) -> bool:
        r, _ = self.reduce(_clean(row))
        return not r

    def express(self, row: Row):
        """Coefficients ``c`` with ``sum c_i input_i = row``, or ``None``."""
        if not self.track:
            raise ValueError("Echelon built without tracking")
        combo: dict = {}
        r, combo = self.reduce(_clean(row), combo)
        if r:
            return None
        return {k: -v for k, v in combo.items()}


def rank(rows: Iterable[Row]) -> int:
    e = Echelon()
    for r in rows:
        e.add(r)
    return e.rank


def row_space(rows: Iterable[Row]) -> Echelon:
    e = Echelon()
    for r in rows:
        e.add(r)
    return e


def nullspace(rows: Sequence[Row], columns: Sequence[Hashable]) -> list:
    """Basis of ``{v : rows . v = 0}`` as dicts over ``columns``."""
    e = Echelon()
    for r in rows:
        e.add(r)
    piv = set(e.pivots)
    free = [c for c in columns if c not in piv]
    basis = []
    for f in free:
        v = {f: Fraction(1)}
        for p, row in e.pivots.items():
            c = row.get(f)
            if c:
                v[p] = -c
        basis.append(v)
    return basis


def left_kernel(rows: Sequence[Row]) -> list:
    """Basis of ``{c : sum c_i rows_i = 0}`` as dicts over row indices."""
    cols: dict = {}
    for i, r in enumerate(rows):
        for k, v in r.items():
            if v:
                cols.setdefault(k, {})[i] = Fraction(v)
    return nullspace(list(cols.values()), range(len(rows)))


def solve(rows: Sequence[Row], target: Row):
    """Find ``c`` with ``sum c_i rows_i = target`` or return ``None``."""
    e = Echelon(track=True)
    for r in rows:
        e.add(r)
    return e.express(target)


def bareiss_rank(matrix: Sequence[Sequence]) -> int:
    """Rank of a dense rational matrix by fraction-free elimination."""
    if not matrix:
        return 0
    rows = []
    for r in matrix:
        fr = [Fraction(x) for x in r]
        den = 1
        for x in fr:
            den = lcm(den, x.denominator)
        rows.append([int(x * den) for x in fr])
    m, n = len(rows), len(rows[0])
    r = 0
    prev = 1
    for c in range(n):
        piv = next((i for i in range(r, m) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, m):
            for j in range(c + 1, n):
                rows[i][j] = (rows[r][c] * rows[i][j] - rows[i][c] * rows[r][j]) // prev
            rows[i][c] = 0
        prev = rows[r][c]
        r += 1
        if r == m:
            break
    return r


def to_dense(rows: Sequence[Row], columns: Sequence[Hashable]) -> list:
    return [[r.get(c, Fraction(0)) for c in columns] for r in rows]


def det(matrix: Sequence[Sequence]):
    """Determinant by Laplace expansion along the sparsest row.

    Entries may be any ring elements supporting ``+ - *`` and a zero test
    through ``bool``; this is used for polynomial matrices of small size.
    """
    n = len(matrix)
    if n == 0:
        return 1
    if n == 1:
        return matrix[0][0]
    best = min(range(n), key=lambda i: sum(1 for x in matrix[i] if x))
    total = None
    for j, a in enumerate(matrix[best]):
        if not a:
            continue
        minor = [row[:j] + row[j + 1:] for i, row in enumerate(matrix) if i != best]
        term = a * det(minor)
        if (best + j) % 2:
            term = -term
        total = term if total is None else total + term
    if total is None:
        return matrix[0][0] * 0
    return total
