"""Fixture presentations and random instance generators.

Everything here is deterministic given a :class:`random.Random`.  Random
Darboux instances are produced by transport of structure: start from a
twisted cotangent model ``A' = T^*[d]_{df} B``, pick an algebra
automorphism ``τ`` with explicit inverse ``ρ`` and set
``D_A = τ D_{A'} ρ`` and ``ω = τ_* ω^std``.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .cohom import enumerate_monomials, find_weights
from .derham import DeRham
from .dgmod import BasisElement, DgModule
from .gca import Generator, Poly, SemifreeCdga, check_presentation, substitute
from .linalg import nullspace
from .shifted import ShiftedCotangent, fiber_name, shifted_cotangent


def _alg(gens, diffs=None, name=""):
    return SemifreeCdga([Generator(*g) for g in gens], diffs or {}, name=name)


def fixture_bases() -> dict:
    """Small base presentations used throughout the tests."""
    return {
        "point": _alg([], name="point"),
        "line": _alg([("x", 0)], name="line"),
        "plane": _alg([("x1", 0), ("x2", 0)], name="plane"),
        "fat_point": _alg([("x", 0), ("zeta", -1)], {"zeta": "x^2"}, name="fat_point"),
        "koszul": _alg([("x1", 0), ("x2", 0), ("z1", -1), ("z2", -1)],
                       {"z1": "x1^2", "z2": "x2^2"}, name="koszul"),
        "deep": _alg([("x", 0), ("z1", -1), ("z2", -1), ("eta", -2)],
                     {"z1": "x^2", "z2": "x^3", "eta": "x*z1 - z2"}, name="deep"),
    }


# cocycles of degree 1 - d, by base and d
_POTENTIALS = {
    ("line", 1): ["1/3*x^3", "x^4 - 2*x^2"],
    ("plane", 1): ["x1*x2", "x1^3 - x1*x2^2"],
    ("fat_point", 1): ["x^3"],
    ("koszul", 1): ["x1*x2"],
    ("deep", 1): ["x^4"],
    ("koszul", 2): ["x2^2*z1 - x1^2*z2"],
    ("deep", 2): ["x*z2 - x^2*z1"],
    ("deep", 3): ["x^2*eta + z1*z2"],
}


def cotangent_weights(T: ShiftedCotangent) -> dict:
    """Base weights for every generator of an untwisted ``T^*[d] B``.

    Base generators get a positive grading of ``B``; ``y_z`` gets ``c - w(z)``
    with ``c`` the largest base weight, which keeps ``D`` homogeneous.
    """
    w = T.base.weights() or find_weights(T.base) or {}
    c = max(w.values(), default=0)
    out = dict(w)
    for z in w:
        out[fiber_name(z)] = c - w[z]
    return out


def fixture_potentials(base: str, d: int) -> list:
    return ["0"] + _POTENTIALS.get((base, d), [])


def cotangent_fixtures(ds=(1, 2, 3, 4)) -> list:
    """``(base name, d, f, model)`` for every fixture where ``T^*[d]`` exists."""
    out = []
    for name, B in fixture_bases().items():
        for d in ds:
            if any(-d - g.degree > 0 for g in B.gens):
                continue
            for f in fixture_potentials(name, d):
                out.append((name, d, f, shifted_cotangent(B, d, None if f == "0" else f)))
    return out


# ---------------------------------------------------------------------------
# random presentations


def random_cocycle(A: SemifreeCdga, degree: int, rng: random.Random, max_polydeg: int = 3,
                   picks: int = 2, span: int = 3, constant: bool = False) -> Poly:
    """A sparse random cocycle of the given degree (zero if none exist)."""
    cells = enumerate_monomials(A.ring, degree, None, None, max_polydeg, 0)
    if not constant:
        cells = [m for m in cells if any(m)]
    if not cells:
        return A.ring.zero()
    cols: dict = {}
    for i, m in enumerate(cells):
        for k, v in A.D(A.ring.monomial(m)).terms.items():
            cols.setdefault(k, {})[i] = v
    basis = nullspace(list(cols.values()), range(len(cells)))
    if not basis:
        return A.ring.zero()
    vec: dict = {}
    for v in rng.sample(basis, min(picks, len(basis))):
        c = Fraction(rng.choice([x for x in range(-span, span + 1) if x]))
        for i, x in v.items():
            vec[cells[i]] = vec.get(cells[i], 0) + c * x
    return Poly(A.ring, {m: c for m, c in vec.items() if c})


def random_presentation(rng: random.Random, n_gens: int, min_degree: int,
                        max_polydeg: int = 2, name: str = "", p_free: float = 0.0) -> SemifreeCdga:
    """Random valid presentation with ``n_gens`` cells of degrees in ``[min_degree, 0]``.

    Degrees are non-increasing.  A negative cell is left free with
    probability ``p_free`` and otherwise attached along a random cocycle.
    """
    degs = sorted((rng.randint(min_degree, 0) for _ in range(n_gens)), reverse=True)
    if degs and degs[0] < 0:
        degs[0] = 0
    A = SemifreeCdga([], {}, name=name)
    for i, dg in enumerate(degs):
        g = Generator(f"{'x' if dg == 0 else 'z'}{i}", dg)
        if dg == 0 or rng.random() < p_free:
            f = A.ring.zero()
        else:
            f = random_cocycle(A, dg + 1, rng, max_polydeg)
        A = A.extend([g], {g.name: f}, name=name)
    return A


def random_prefix_inclusion(rng: random.Random, max_cells: int = 4, min_degree: int = -3):
    """``(B, A)`` with ``B`` a prefix of a random ``A``.

    ``A`` is resampled until it admits a weight grading, since the
    connectivity checks slice by weight.
    """
    while True:
        n = rng.randint(1, max_cells)
        A = random_presentation(rng, n, min_degree)
        if A.weights() or find_weights(A):
            break
    k = rng.randint(0, n)
    B = A.sub_presentation([g.name for g in A.gens[:k]], name="B")
    return B, A


# ---------------------------------------------------------------------------
# random Darboux instances


@dataclass
class DarbouxInstance:
    d: int
    B: SemifreeCdga
    f: Poly
    model: ShiftedCotangent
    A: SemifreeCdga
    omega: Poly
    lagrangian: list
    planted_f: Poly  # τ(f), an element of A
    quadratic: dict = field(default_factory=dict)
    moves: list = field(default_factory=list)


def _compose(first: dict, second: dict, ring) -> dict:
    """Generator images of ``second ∘ first`` (both name -> Poly in ``ring``)."""
    imgs = {ring.index[k]: v for k, v in second.items()}
    return {k: substitute(v, imgs, ring) for k, v in first.items()}


def _identity(ring) -> dict:
    return {g.name: ring.gen(g.name) for g in ring.gens}


def random_automorphism(T: ShiftedCotangent, rng: random.Random, quadratic_term: bool = True):
    """``(τ, ρ, moves)`` on the generators of ``T.algebra``.

    Moves: unit rescaling of fibers, adding a multiple of a same-degree
    fiber, adding a base multiple of a higher-degree fiber, a linear change
    of the degree-0 base, and (when degrees allow) ``y -> y + c y' y''``.
    """
    A = T.algebra
    R = A.ring
    tau, rho = _identity(R), _identity(R)
    fib = list(T.fiber)
    base = [g.name for g in T.base.gens]
    moves = []

    def apply(fwd: dict, inv: dict, label: str):
        nonlocal tau, rho
        tau = _compose(tau, {**_identity(R), **fwd}, R)
        rho = _compose({**_identity(R), **inv}, rho, R)
        moves.append(label)

    deg = {g.name: g.degree for g in A.gens}
    for _ in range(rng.randint(1, 4)):
        kind = rng.choice(["scale", "same", "lower", "base"])
        if kind == "scale" and fib:
            y = rng.choice(fib)
            c = Fraction(rng.choice([-2, -1, 2, 3]))
            apply({y: R.gen(y).scale(c)}, {y: R.gen(y).scale(1 / c)}, f"scale {y} by {c}")
        elif kind == "same":
            pairs = [(a, b) for a in fib for b in fib if a != b and deg[a] == deg[b]]
            if pairs:
                a, b = rng.choice(pairs)
                c = Fraction(rng.choice([-1, 1, 2]))
                apply({a: R.gen(a) + R.gen(b).scale(c)}, {a: R.gen(a) - R.gen(b).scale(c)},
                      f"{a} += {c}*{b}")
        elif kind == "lower":
            pairs = [(a, b) for a in fib for b in fib if deg[b] > deg[a]]
            if pairs:
                a, b = rng.choice(pairs)
                mons = [m for m in enumerate_monomials(T.base.ring, deg[a] - deg[b], None, None, 2, 0)]
                if mons:
                    coeff = Poly(T.base.ring, {rng.choice(mons): Fraction(rng.choice([-1, 1, 2]))})
                    c = coeff.to_ring(R)
                    apply({a: R.gen(a) + c * R.gen(b)}, {a: R.gen(a) - c * R.gen(b)},
                          f"{a} += ({coeff})*{b}")
        elif kind == "base":
            zs = [z for z in base if deg[z] == 0]
            if len(zs) >= 2:
                a, b = rng.sample(zs, 2)
                c = Fraction(rng.choice([-1, 1, 2]))
                apply({a: R.gen(a) + R.gen(b).scale(c)}, {a: R.gen(a) - R.gen(b).scale(c)},
                      f"{a} += {c}*{b}")
    if quadratic_term:
        trip = [(a, b, e) for a in fib for b in fib for e in fib
                if b < e and a not in (b, e) and deg[b] + deg[e] == deg[a]
                and not (deg[b] % 2 == 0 and b == e)]
        if trip:
            a, b, e = rng.choice(trip)
            q = (R.gen(b) * R.gen(e)).scale(Fraction(rng.choice([-1, 1, 2])))
            if q.terms:
                apply({a: R.gen(a) + q}, {a: R.gen(a) - q}, f"{a} += {q}")
    return tau, rho, moves


def transport(T: ShiftedCotangent, tau: dict, rho: dict, extra_gens=(), name: str = "A"):
    """``(A, ω)`` with ``D_A = τ D ρ`` and ``ω = τ_* ω^std`` on reordered generators."""
    src = T.algebra
    R = src.ring
    base = [g.name for g in T.base.gens]
    fib = sorted(T.fiber, key=lambda n: (-R.generator(n).degree, T.fiber.index(n)))
    gens = [R.generator(n) for n in base + fib] + list(extra_gens)
    tmp = SemifreeCdga(gens, {})
    tau_idx = {R.index[k]: v for k, v in tau.items()}
    diffs = {}
    for g in src.gens:
        img = src.D(rho[g.name])
        diffs[g.name] = substitute(img, tau_idx, R).to_ring(tmp.ring)
    A = SemifreeCdga(gens, diffs, name=name)
    rep = check_presentation(A)
    if not rep.ok:
        raise AssertionError("transported presentation is invalid: " + "; ".join(rep.violations))
    dr = DeRham(A)
    pf = dr.pullback({k: v.to_ring(tmp.ring) for k, v in tau.items()}, T.derham)
    return A, pf(T.omega), dr


def random_base_in_window(rng: random.Random, d: int, max_gens: int = 3,
                          deep: bool = False) -> SemifreeCdga:
    """Random base whose cotangent model needs no surgery: ``deg z >= -⌊d/2⌋``.

    With ``deep`` the cells go down to degree ``-d``, so surgery may be needed.
    """
    n = rng.randint(1, max_gens)
    lo = -d if deep else -(d // 2)
    return random_presentation(rng, n, lo, max_polydeg=2, name="B", p_free=0.4)


def random_darboux_instance(rng: random.Random, d: int, max_gens: int = 3,
                            quadratic_block: bool = False, deep: bool = False) -> DarbouxInstance:
    B = random_base_in_window(rng, d, max_gens, deep)
    f = random_cocycle(B, 1 - d, rng, max_polydeg=4, picks=2)
    T = shifted_cotangent(B, d, f if f.terms else None)
    tau, rho, moves = random_automorphism(T, rng, quadratic_term=(d == 2))
    extra = []
    quad = {}
    if quadratic_block and d % 4 == 2:
        extra = [Generator("q", -d // 2)]
        quad = {"q": Fraction(rng.choice([1, 2, -1]))}
    A, omega, dr = transport(T, tau, rho, extra)
    for q, c in quad.items():
        omega = omega + (dr.dgen(q) * dr.dgen(q)).scale(c / 2)
    planted = substitute(f.to_ring(T.algebra.ring), {T.algebra.ring.index[k]: v
                                                     for k, v in tau.items()}, T.algebra.ring)
    planted = planted.to_ring(A.ring)
    return DarbouxInstance(d, B, f, T, A, omega, [g.name for g in B.gens], planted, quad, moves)


# ---------------------------------------------------------------------------
# random perfect complexes


def _vanishing_poly(rng: random.Random, A: SemifreeCdga, max_polydeg: int = 2) -> Poly:
    mons = [m for m in enumerate_monomials(A.ring, 0, None, None, max_polydeg, 0) if any(m)]
    p = A.ring.zero()
    for m in rng.sample(mons, min(len(mons), rng.randint(1, 2))):
        p = p + A.ring.monomial(m, rng.choice([-2, -1, 1, 3]))
    return p


def random_perfect_complex(rng: random.Random, A: SemifreeCdga, max_terms: int = 3,
                           scramble: int = 4):
    """``(M, expected)``: a random complex of free modules over ``A`` and its Tor amplitude.

    ``A`` must have ``D = 0`` and only degree-0 generators.  ``M`` is a
    direct sum of a free summand, ``A --f--> A``, a Koszul complex on
    ``(g, h)`` and a unit pair, with ``f, g, h`` vanishing at the origin,
    then scrambled by elementary changes of basis.  ``expected`` is the
    amplitude at the origin read off from the summands (``None`` for an
    acyclic result).
    """
    if any(g.degree for g in A.gens) or any(v.terms for v in A.diffs.values()):
        raise ValueError("base must be a polynomial ring in degree 0")
    R = A.ring
    basis, rows, live = [], {}, []

    def new(deg):
        basis.append(BasisElement(f"e{len(basis)}", deg))
        rows[len(basis) - 1] = {}
        return len(basis) - 1

    top = rng.randint(-2, 1)
    for _ in range(rng.randint(1, 3)):
        kind = rng.choice(["free", "principal", "koszul", "unit"] if max_terms >= 3
                          else ["free", "principal", "unit"])
        span = {"free": 1, "principal": 2, "koszul": 3, "unit": 2}[kind]
        s = top + rng.randint(0, max_terms - span)
        if kind == "free":
            new(s)
            live.append(s)
        elif kind == "principal":
            a, b = new(s), new(s + 1)
            rows[a][b] = _vanishing_poly(rng, A)
            live += [s, s + 1]
        elif kind == "unit":
            a, b = new(s), new(s + 1)
            rows[a][b] = R.one().scale(rng.choice([1, -1, 2]))
        else:
            g, h = _vanishing_poly(rng, A), _vanishing_poly(rng, A)
            a, b1, b2, c = new(s), new(s + 1), new(s + 1), new(s + 2)
            rows[a] = {b1: g, b2: h}
            rows[b1] = {c: h}
            rows[b2] = {c: -g}
            live += [s, s + 1, s + 2]
    degs = [b.degree for b in basis]
    for _ in range(scramble):
        pairs = [(i, j) for i in range(len(basis)) for j in range(len(basis))
                 if i != j and degs[i] == degs[j]]
        if not pairs:
            break
        i, j = rng.choice(pairs)
        c = rng.choice([R.one(), _vanishing_poly(rng, A, 1)])
        # new e_i = e_i + c e_j
        for k, v in rows[j].items():
            rows[i][k] = rows[i].get(k, R.zero()) + c * v
        for r in rows.values():
            if i in r:
                r[j] = r.get(j, R.zero()) - c * r[i]
        for r in rows.values():
            for k in [k for k, v in r.items() if not v.terms]:
                del r[k]
    M = DgModule(A, basis, rows, name="M")
    expected = (min(live), max(live)) if live else None
    return M, expected


__all__ = [
    "DarbouxInstance", "cotangent_fixtures", "cotangent_weights", "fixture_bases", "fixture_potentials",
    "random_automorphism", "random_base_in_window", "random_cocycle", "random_darboux_instance",
    "random_perfect_complex", "random_prefix_inclusion", "random_presentation", "transport",
]
