"""Exact graded-commutative polynomial arithmetic over the rationals.

A :class:`GradedRing` is the free graded-commutative algebra on an ordered
list of generators.  Elements are :class:`Poly` objects: sparse maps from
exponent tuples to nonzero :class:`~fractions.Fraction` coefficients.  A
monomial is always stored in generator order; the Koszul sign produced by
reordering is applied at multiplication time.

Generators carry a cohomological ``degree`` and a ``form`` degree (0 for
algebra generators, 1 for de Rham generators ``d(z)``).  Parity is decided
by the total degree ``degree + form``, which is the convention of the
Hodge-filtered de Rham complex with differential ``D + d``.

:class:`SemifreeCdga` is a cell-attachment presentation
``k[z_1, ..., z_n | D z_i = f_i]``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

Monomial = tuple


class PresentationError(ValueError):
    """Raised when data does not describe a valid presentation or morphism."""


@dataclass(frozen=True)
class Generator:
    name: str
    degree: int
    weight: int | None = None
    form: int = 0

    @property
    def total(self) -> int:
        return self.degree + self.form

    @property
    def odd(self) -> bool:
        return self.total % 2 == 1


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class GradedRing:
    """Free graded-commutative algebra over Q on ordered generators."""

    def __init__(self, gens: Sequence[Generator]):
        self.gens = tuple(gens)
        names = [g.name for g in self.gens]
        if len(set(names)) != len(names):
            raise PresentationError(f"duplicate generator names in {names}")
        self.index = {g.name: i for i, g in enumerate(self.gens)}
        self.n = len(self.gens)
        self.odd = tuple(g.odd for g in self.gens)
        self.odd_mask = sum(1 << i for i, o in enumerate(self.odd) if o)
        self.total_degrees = tuple(g.total for g in self.gens)
        self._unit = (0,) * self.n
        self._mul_cache: dict = {}
        self._conv_cache: dict = {}

    # -- identity -----------------------------------------------------
    def key(self):
        return self.gens

    def __eq__(self, other):
        return isinstance(other, GradedRing) and self.gens == other.gens

    def __hash__(self):
        return hash(self.gens)

    def __repr__(self):
        return f"GradedRing({', '.join(g.name for g in self.gens)})"

    # -- constructors -------------------------------------------------
    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {self._unit: Fraction(1)})

    def const(self, c) -> "Poly":
        c = Fraction(c)
        return Poly(self, {self._unit: c} if c else {})

    def gen(self, name: str) -> "Poly":
        i = self.index.get(name)
        if i is None:
            raise PresentationError(f"unknown generator {name!r}")
        e = [0] * self.n
        e[i] = 1
        return Poly(self, {tuple(e): Fraction(1)})

    def monomial(self, exps: Monomial, coeff=1) -> "Poly":
        c = Fraction(coeff)
        return Poly(self, {tuple(exps): c} if c else {})

    def generator(self, name: str) -> Generator:
        return self.gens[self.index[name]]

    # -- monomial arithmetic ------------------------------------------
    def mono_mask(self, m: Monomial) -> int:
        mask = 0
        for i in _bits(self.odd_mask):
            if m[i]:
                mask |= 1 << i
        return mask

    def mono_degree(self, m: Monomial) -> int:
        return sum(e * d for e, d in zip(m, self.total_degrees) if e)

    def mono_mul(self, a: Monomial, b: Monomial):
        """Return ``(sign, monomial)`` for ``a*b``; sign 0 means the product vanishes."""
        key = (a, b)
        hit = self._mul_cache.get(key)
        if hit is not None:
            return hit
        ma = self.mono_mask(a)
        mb = self.mono_mask(b)
        if ma & mb:
            res = (0, None)
        else:
            swaps = 0
            for j in _bits(mb):
                swaps += bin(ma >> (j + 1)).count("1")
            res = (-1 if swaps & 1 else 1, tuple(x + y for x, y in zip(a, b)))
        if len(self._mul_cache) < 400000:
            self._mul_cache[key] = res
        return res

    def converter(self, other: "GradedRing") -> Callable[[Monomial], Monomial]:
        """Map monomials of ``other`` into this ring by generator name."""
        hit = self._conv_cache.get(other)
        if hit is not None:
            return hit
        try:
            pos = [self.index[g.name] for g in other.gens]
        except KeyError as exc:
            raise PresentationError(f"generator {exc} missing from {self!r}") from None
        for g in other.gens:
            mine = self.gens[self.index[g.name]]
            if mine.total % 2 != g.total % 2:
                raise PresentationError(f"parity of {g.name} differs between rings")
        monotone = all(p < q for p, q in zip(pos, pos[1:]))
        n = self.n

        def conv(m: Monomial) -> Monomial:
            e = [0] * n
            for i, x in enumerate(m):
                if x:
                    e[pos[i]] = x
            return tuple(e)

        conv.monotone = monotone  # type: ignore[attr-defined]
        self._conv_cache[other] = conv
        return conv

    def parse(self, text: str) -> "Poly":
        from .textio import parse_poly

        return parse_poly(text, self)


class Poly:
    """Element of a :class:`GradedRing`; immutable by convention."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: GradedRing, terms: Mapping[Monomial, Fraction]):
        self.ring = ring
        self.terms = dict(terms)
        self._hash = None

    # -- basic protocol -----------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, Poly):
            return NotImplemented
        if other.ring != self.ring:
            if not self.terms and not other.terms:
                return True
            return self._cross_eq(other)
        return self.terms == other.terms

    def _cross_eq(self, other: "Poly") -> bool:
        try:
            return self == other.to_ring(self.ring)
        except PresentationError:
            return False

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        from .textio import format_poly

        return format_poly(self)

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring is self.ring or other.ring == self.ring:
                return other
            raise PresentationError(
                f"generator-universe mismatch: {self.ring!r} vs {other.ring!r}")
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        raise TypeError(f"cannot combine Poly with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m, 0) + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = Fraction(c)
        if not c:
            return self.ring.zero()
        return Poly(self.ring, {m: v * c for m, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        ring = self.ring
        out: dict = {}
        mul = ring.mono_mul
        for a, ca in self.terms.items():
            for b, cb in other.terms.items():
                s, m = mul(a, b)
                if s:
                    v = out.get(m, 0) + s * ca * cb
                    if v:
                        out[m] = v
                    else:
                        del out[m]
        return Poly(ring, out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    # -- gradings -----------------------------------------------------
    def degrees(self) -> set:
        return {self.ring.mono_degree(m) for m in self.terms}

    @property
    def degree(self) -> int | None:
        """Total degree if homogeneous, else ``None`` (the mixed flag)."""
        ds = self.degrees()
        if not ds:
            return None
        return ds.pop() if len(ds) == 1 else None

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def parity(self) -> int:
        d = self.degree
        if d is None:
            if not self.terms:
                return 0
            raise PresentationError(f"parity of mixed-degree element {self}")
        return d % 2

    def form_degrees(self) -> set:
        fm = [i for i, g in enumerate(self.ring.gens) if g.form]
        return {sum(m[i] for i in fm) for m in self.terms}

    def component(self, pred: Callable[[Monomial], bool]) -> "Poly":
        return Poly(self.ring, {m: c for m, c in self.terms.items() if pred(m)})

    def constant_term(self) -> Fraction:
        return self.terms.get(self.ring._unit, Fraction(0))

    def support(self) -> set:
        """Names of generators that occur."""
        used = set()
        for m in self.terms:
            for i, e in enumerate(m):
                if e:
                    used.add(self.ring.gens[i].name)
        return used

    def polydeg(self) -> int:
        return max((sum(m) for m in self.terms), default=0)

    # -- change of ring -----------------------------------------------
    def to_ring(self, ring: GradedRing) -> "Poly":
        if ring is self.ring or ring == self.ring:
            return Poly(ring, self.terms) if ring is not self.ring else self
        try:
            conv = ring.converter(self.ring)
        except PresentationError:
            # some unused generator is missing; only used ones must exist
            conv = None
        if getattr(conv, "monotone", False):
            return Poly(ring, {conv(m): c for m, c in self.terms.items()})
        out = ring.zero()
        for m, c in self.terms.items():
            term = ring.const(c)
            for i, e in enumerate(m):
                if e:
                    term = term * ring.gen(self.ring.gens[i].name) ** e
            out = out + term
        return out

    def items(self):
        return self.terms.items()


# ---------------------------------------------------------------------------
# derivations and algebra maps on a ring


def _unit_mono(n, i, e):
    m = [0] * n
    m[i] = e
    return tuple(m)


def apply_derivation(p: Poly, images: Mapping[int, Poly], degree: int,
                     cache: dict | None = None) -> Poly:
    """Extend generator images to a graded derivation of the given degree.

    ``images`` maps generator index to its image (missing entries are zero).
    The sign rule is ``X(ab) = X(a) b + (-1)^{|X||a|} a X(b)``.
    """
    ring = p.ring
    out = ring.zero()
    for m, c in p.terms.items():
        val = cache.get(m) if cache is not None else None
        if val is None:
            val = _derive_monomial(ring, m, images, degree)
            if cache is not None:
                cache[m] = val
        if val.terms:
            out = out + val.scale(c)
    return out


def _derive_monomial(ring: GradedRing, m: Monomial, images, degree) -> Poly:
    n = ring.n
    acc: dict = {}
    odd_deriv = degree % 2
    prefix = [0] * n
    prefix_deg = 0
    for i, e in enumerate(m):
        if not e:
            continue
        img = images.get(i)
        if img is not None and img.terms:
            suffix = list(m)
            suffix[: i + 1] = [0] * (i + 1)
            pre = tuple(prefix)
            mid = _unit_mono(n, i, e - 1)
            sign = -1 if (odd_deriv and prefix_deg % 2) else 1
            coeff = sign * e
            # prefix * z_i^(e-1) * X(z_i) * suffix
            s1, left = ring.mono_mul(pre, mid)
            suf = tuple(suffix)
            for b, cb in img.terms.items():
                s2, lm = ring.mono_mul(left, b)
                if not s2:
                    continue
                s3, full = ring.mono_mul(lm, suf)
                if not s3:
                    continue
                v = acc.get(full, 0) + coeff * s1 * s2 * s3 * cb
                if v:
                    acc[full] = v
                else:
                    del acc[full]
        prefix[i] = e
        prefix_deg += e * ring.total_degrees[i]
    return Poly(ring, acc)


def substitute(p: Poly, images: Mapping[int, Poly], target: GradedRing,
               cache: dict | None = None) -> Poly:
    """Apply the algebra morphism sending generator ``i`` to ``images[i]``.

    Generators without an image must exist in ``target`` and map to themselves.
    Images must have the parity of their generator.
    """
    ring = p.ring
    out = target.zero()
    for m, c in p.terms.items():
        val = cache.get(m) if cache is not None else None
        if val is None:
            val = target.one()
            for i, e in enumerate(m):
                if not e:
                    continue
                img = images.get(i)
                if img is None:
                    img = target.gen(ring.gens[i].name)
                for _ in range(e):
                    val = val * img
                if not val.terms:
                    break
            if cache is not None:
                cache[m] = val
        if val.terms:
            out = out + val.scale(c)
    return out


# ---------------------------------------------------------------------------
# presentations


@dataclass
class Report:
    """Outcome of a check: ``ok`` plus human-readable violations and data."""

    name: str
    ok: bool = True
    violations: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def fail(self, msg: str):
        self.ok = False
        self.violations.append(msg)

    def __bool__(self):
        return self.ok

    def to_dict(self) -> dict:
        return {"check": self.name, "ok": self.ok,
                "violations": list(self.violations), "data": self.data}


class SemifreeCdga:
    """Cell-attachment presentation ``k[z_1..z_n | D z_i = f_i]``.

    ``diffs`` maps generator names to polynomials (or strings in the text
    grammar) in earlier generators.  Missing entries mean ``D z = 0``.
    Construction does not validate; call :func:`check_presentation`.
    """

    def __init__(self, gens: Sequence[Generator], diffs: Mapping[str, object] | None = None,
                 name: str = ""):
        for g in gens:
            if g.form:
                raise PresentationError("algebra generators have form degree 0")
        self.ring = GradedRing(gens)
        self.name = name
        raw = dict(diffs or {})
        unknown = set(raw) - set(self.ring.index)
        if unknown:
            raise PresentationError(f"differential given for unknown generators {sorted(unknown)}")
        self.diffs: dict[str, Poly] = {}
        for g in self.ring.gens:
            f = raw.get(g.name, 0)
            if isinstance(f, str):
                f = self.ring.parse(f)
            elif not isinstance(f, Poly):
                f = self.ring.const(f)
            else:
                f = f.to_ring(self.ring)
            self.diffs[g.name] = f
        self._images = {i: self.diffs[g.name] for i, g in enumerate(self.ring.gens)
                        if self.diffs[g.name].terms}
        self._dcache: dict = {}

    @property
    def gens(self) -> tuple:
        return self.ring.gens

    @property
    def names(self) -> list:
        return [g.name for g in self.ring.gens]

    def gen(self, name: str) -> Poly:
        return self.ring.gen(name)

    def __call__(self, text) -> Poly:
        if isinstance(text, Poly):
            return text.to_ring(self.ring)
        if isinstance(text, (int, Fraction)):
            return self.ring.const(text)
        return self.ring.parse(text)

    def D(self, a: Poly) -> Poly:
        return apply_differential(self, a)

    def __eq__(self, other):
        return (isinstance(other, SemifreeCdga) and self.ring == other.ring
                and self.diffs == other.diffs)

    def __hash__(self):
        return hash(self.ring)

    def __repr__(self):
        from .textio import format_presentation

        return format_presentation(self)

    def weights(self) -> dict | None:
        if all(g.weight is not None for g in self.gens):
            return {g.name: g.weight for g in self.gens}
        return None

    def sub_presentation(self, names: Iterable[str], name: str = "") -> "SemifreeCdga":
        keep = set(names)
        gens = [g for g in self.gens if g.name in keep]
        sub = SemifreeCdga(gens, {}, name=name)
        diffs = {}
        for g in gens:
            f = self.diffs[g.name]
            if not f.support() <= keep:
                raise PresentationError(
                    f"D{g.name} uses generators outside the sub-presentation")
            diffs[g.name] = f.to_ring(sub.ring)
        return SemifreeCdga(gens, diffs, name=name)

    def extend(self, gens: Sequence[Generator], diffs: Mapping[str, object],
               name: str = "") -> "SemifreeCdga":
        """Attach new cells after the existing ones."""
        allg = list(self.gens) + list(gens)
        big = GradedRing(allg)
        d = {k: v.to_ring(big) for k, v in self.diffs.items()}
        for k, v in diffs.items():
            if isinstance(v, str):
                v = big.parse(v)
            elif isinstance(v, Poly):
                v = v.to_ring(big)
            else:
                v = big.const(v)
            d[k] = v
        return SemifreeCdga(allg, d, name=name)

    def with_weights(self, weights: Mapping[str, int | None]) -> "SemifreeCdga":
        gens = [Generator(g.name, g.degree, weights.get(g.name), g.form) for g in self.gens]
        new = SemifreeCdga(gens, {}, name=self.name)
        return SemifreeCdga(gens, {k: v.to_ring(new.ring) for k, v in self.diffs.items()},
                            name=self.name)

    def reordered(self, order: Sequence[str]) -> "SemifreeCdga":
        if sorted(order) != sorted(self.names):
            raise PresentationError("reordering must be a permutation of the generators")
        gens = [self.ring.generator(n) for n in order]
        tmp = SemifreeCdga(gens, {}, name=self.name)
        return SemifreeCdga(gens, {k: self.diffs[k].to_ring(tmp.ring) for k in order},
                            name=self.name)


def mul(a: Poly, b: Poly) -> Poly:
    """Graded-commutative product; raises on generator-universe mismatch."""
    if a.ring != b.ring:
        raise PresentationError("generator-universe mismatch")
    return a * b


def apply_differential(A: SemifreeCdga, a: Poly) -> Poly:
    a = a.to_ring(A.ring) if a.ring is not A.ring else a
    return apply_derivation(a, A._images, 1, A._dcache)


def check_presentation(A: SemifreeCdga) -> Report:
    rep = Report("presentation")
    seen: set = set()
    for g in A.gens:
        if g.degree > 0:
            rep.fail(f"{g.name}: positive degree {g.degree}")
        f = A.diffs[g.name]
        if f.terms:
            if f.degree is None:
                rep.fail(f"D{g.name}: not homogeneous")
            elif f.degree != g.degree + 1:
                rep.fail(f"D{g.name}: degree {f.degree}, expected {g.degree + 1}")
            late = f.support() - seen
            if late:
                rep.fail(f"D{g.name}: non-triangular, uses {sorted(late)}")
        seen.add(g.name)
    w = A.weights()
    if w is not None:
        for g in A.gens:
            for m in A.diffs[g.name].terms:
                mw = sum(e * A.gens[i].weight for i, e in enumerate(m) if e)
                if mw != g.weight:
                    rep.fail(f"D{g.name}: weight {mw} term, expected {g.weight}")
                    break
    for g in A.gens:
        dd = A.D(A.diffs[g.name])
        if dd.terms:
            rep.fail(f"D^2 {g.name} = {dd} != 0")
    return rep


class AlgebraMap:
    """Morphism of presentations given by generator images."""

    def __init__(self, source: SemifreeCdga, target: SemifreeCdga,
                 images: Mapping[str, object] | None = None, check: bool = True):
        self.source = source
        self.target = target
        imgs = {}
        raw = dict(images or {})
        for i, g in enumerate(source.gens):
            v = raw.get(g.name)
            if v is None:
                if g.name in target.ring.index:
                    v = target.gen(g.name)
                else:
                    raise PresentationError(f"no image for generator {g.name}")
            v = target(v)
            imgs[i] = v
        self.images = imgs
        self._cache: dict = {}
        if check:
            rep = self.check()
            if not rep.ok:
                raise PresentationError("; ".join(rep.violations))

    def image(self, name: str) -> Poly:
        return self.images[self.source.ring.index[name]]

    def __call__(self, a) -> Poly:
        a = self.source(a)
        return substitute(a, self.images, self.target.ring, self._cache)

    pushforward = __call__

    def check(self) -> Report:
        rep = Report("algebra_map")
        for i, g in enumerate(self.source.gens):
            v = self.images[i]
            if v.terms and v.degree != g.degree:
                rep.fail(f"degree mismatch: {g.name} (deg {g.degree}) -> {v}")
        if not rep.ok:
            return rep
        for i, g in enumerate(self.source.gens):
            lhs = self.target.D(self.images[i])
            rhs = self(self.source.diffs[g.name])
            if lhs != rhs:
                rep.fail(f"chain-map failure at {g.name}: D(phi z) = {lhs}, phi(Dz) = {rhs}")
        return rep

    def compose(self, other: "AlgebraMap") -> "AlgebraMap":
        """``other`` after ``self``."""
        return AlgebraMap(self.source, other.target,
                          {g.name: other(self.images[i]) for i, g in enumerate(self.source.gens)})


def identity_map(A: SemifreeCdga) -> AlgebraMap:
    return AlgebraMap(A, A, {n: A.gen(n) for n in A.names})


def localize(A: SemifreeCdga, f, t: str = "t", xi: str = "xi_loc") -> SemifreeCdga:
    """Zariski open embedding ``A -> A[t, xi | D xi = t f - 1]``."""
    f = A(f)
    if f.terms and f.degree != 0:
        raise PresentationError(f"localize needs a degree-0 element, got {f}")
    while t in A.ring.index:
        t += "'"
    while xi in A.ring.index:
        xi += "'"
    tmp = A.extend([Generator(t, 0), Generator(xi, -1)], {})
    rel = tmp.gen(t) * f.to_ring(tmp.ring) - 1
    return A.extend([Generator(t, 0), Generator(xi, -1)], {xi: rel},
                    name=(A.name + "_loc") if A.name else "")
