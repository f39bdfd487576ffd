"""Acceptance criteria 1-8.

Each test records one ``criterion N: PASS|FAIL`` line; the lines are
printed in the pytest terminal summary and by running this file directly.
"""
import random
import sys
import time

import pytest

from dshift import (SliceSpec, check_connectivity, darboux_pipeline, shifted_cotangent,
                    verify_symplectic)
from dshift.corpus import (cotangent_fixtures, cotangent_weights, fixture_bases,
                           random_darboux_instance, random_perfect_complex, random_prefix_inclusion)
from dshift.darboux import symmetric_complex
from dshift.derham import check_intertwining, graded_piece_model, operator_relations, random_form
from dshift.dgmod import dagger, dual, tor_amplitude
from dshift.witt import check_lagrangian, connectivity_floor, dual_cohomology_ok, surgery_to_lagrangian

RESULTS = {}


class Criterion:
    def __init__(self, n, limit):
        self.n, self.limit = n, limit

    def __enter__(self):
        self.t0 = time.perf_counter()
        self.info = ""
        return self

    def __exit__(self, exc_type, exc, tb):
        dt = time.perf_counter() - self.t0
        ok = exc_type is None and dt < self.limit
        why = "" if exc_type is None else f"; {exc_type.__name__}: {str(exc).splitlines()[0][:120]}"
        if exc_type is None and not ok:
            why = f"; over the {self.limit}s limit"
        RESULTS[self.n] = (f"criterion {self.n}: {'PASS' if ok else 'FAIL'} "
                           f"({self.info}; {dt:.1f}s < {self.limit}s{why})")
        if exc_type is None:
            assert ok, RESULTS[self.n]
        return False


def _pairs(ds):
    """(twisted model, untwisted model) for every fixture."""
    out = []
    for name, d, f, T in cotangent_fixtures(ds):
        Tbar = shifted_cotangent(T.base, d)
        out.append((f"{name}[{d}]{'' if f == '0' else ' f=' + f}", T, Tbar))
    return out


def test_criterion_1_operator_relations():
    with Criterion(1, 60) as c:
        rng = random.Random(1)
        algebras, n = set(), 0
        for label, T, Tbar in _pairs((1, 2, 3)):
            xi = T.twist or T.derham.twist_field({})
            rel = operator_relations(T.derham, Tbar.derham, T.euler, xi)
            assert len(rel) >= 6
            for _ in range(8):
                w = random_form(T.derham, rng, rng.randint(-3, 2), [0, 1, 2, 3])
                for name, op in rel.items():
                    r = op(w)
                    assert not r.terms, f"{name} fails on {label}: {r}"
                n += 1
            algebras.add(label)
        assert n >= 200 and len(algebras) >= 5
        c.info = f"{len(rel)} relations on {n} elements over {len(algebras)} algebras"


def test_criterion_2_intertwining():
    with Criterion(2, 60) as c:
        rng = random.Random(2)
        twists = [(lab, T) for lab, T, _ in _pairs((1, 2, 3)) if T.twist is not None]
        for label, T in twists:
            for _ in range(50):
                w = random_form(T.derham, rng, rng.randint(-3, 2), [0, 1, 2, 3])
                assert check_intertwining(T.derham, T.twist, w), label
        assert len(twists) >= 5
        c.info = f"50 elements on each of {len(twists)} twists"


def test_criterion_3_graded_pieces():
    with Criterion(3, 120) as c:
        runs = nonzero = 0
        for name, B in fixture_bases().items():
            for d in (1, 2, 3):
                if any(-d - g.degree > 0 for g in B.gens):
                    continue
                T = shifted_cotangent(B, d)
                w = cotangent_weights(T)
                for lam in (1, 2, 3):
                    for p in (1, 2):
                        # nonzero pieces can sit anywhere in [p-d-1, p+1]
                        for i in range(p - d - 1, p + 2):
                            r = graded_piece_model(T.derham, T.fiber, p, i, lam, w, 2)
                            assert r.agree, f"{name} d={d} λ={lam} p={p} i={i}: {r}"
                            runs += 1
                            nonzero += any(r.direct.values())
        assert nonzero > 0
        c.info = f"{runs} (λ, p, i) cases agree, {nonzero} nonzero"


def test_criterion_4_connectivity():
    with Criterion(4, 120) as c:
        rng = random.Random(4)
        n = held = 0
        for _ in range(30):
            B, A = random_prefix_inclusion(rng, max_cells=4, min_degree=-3)
            for d in (1, 2):
                r = check_connectivity(B, A, d, SliceSpec((-4, 0), max_weight=5))
                assert r.agree, (B, A, d, r.to_dict())
                if r.cond_i:
                    assert r.moreover, (B, A, d, r.to_dict())
                    held += 1
                n += 1
        c.info = f"{n} inclusions agree; Moreover checked on {held}"


def test_criterion_5_standard_forms():
    with Criterion(5, 60) as c:
        fx = cotangent_fixtures((1, 2, 3, 4))
        for name, d, f, T in fx:
            rep = _verify(T, d)
            assert rep.ok, (name, d, f, rep.to_dict())
        c.info = f"{len(fx)} models of {len(fixture_bases())} bases, d = 1..4"


def _verify(T, d):
    return verify_symplectic(T.algebra, T.omega, d, SliceSpec((-5, 1), max_polydeg=3))


def test_criterion_6_darboux():
    with Criterion(6, 600) as c:
        rng = random.Random(6)
        n = compared = quad = swapped = 0
        for k in range(24):
            d = 1 + k % 4
            inst = random_darboux_instance(rng, d, quadratic_block=(d == 2 and k % 8 == 1),
                                           deep=(k % 3 == 2))
            r = darboux_pipeline(inst.A, inst.omega, d, inst.lagrangian, max_polydeg=6)
            assert r.report.ok, r.report.violations
            assert r.quadratic == inst.quadratic
            quad += bool(r.quadratic)
            if r.swaps:
                swapped += 1
            else:
                delta = r.f.to_ring(inst.A.ring) - inst.planted_f
                assert delta.polydeg() <= 0, (str(r.f), str(inst.planted_f))
                compared += 1
            n += 1
        c.info = (f"{n} instances recovered exactly; f compared on {compared}, "
                  f"{swapped} needed surgery, {quad} with a middle block")


def test_criterion_7_surgery():
    with Criterion(7, 60) as c:
        runs = swaps = 0
        for name, d, f, T in cotangent_fixtures((1, 2, 3, 4)):
            sym = symmetric_complex(T.algebra, T.omega, d, T.derham)
            for side in (T.base.names, T.fiber):
                wit = [f"d({n})" for n in side]
                idx = [sym.M.index[w] for w in wit]
                if not check_lagrangian(sym, idx).ok:
                    continue
                L = surgery_to_lagrangian(sym, wit, SliceSpec((-6, 2), max_polydeg=3))
                ok, bad = dual_cohomology_ok(L.N, sym.ctx, SliceSpec((-6, 2), max_polydeg=3))
                assert L.report.ok and ok, (name, d, side, bad)
                assert all(b.degree < connectivity_floor(d) for b in _dagger_basis(L.N, sym.ctx))
                runs += 1
                swaps += bool(L.swaps)
        c.info = f"{runs} Lagrangians normalized, {swaps} by surgery"


def _dagger_basis(N, ctx):
    return dagger(N, ctx).basis


def test_criterion_8_tor_duality():
    with Criterion(8, 60) as c:
        rng = random.Random(8)
        bases = [fixture_bases()["line"], fixture_bases()["plane"]]
        n = 0
        for k in range(36):
            A = bases[k % 2]
            M, expected = random_perfect_complex(rng, A, max_terms=3)
            seed = rng.randrange(10**6)
            t = tor_amplitude(M, random.Random(seed), oracle=True)
            td = tor_amplitude(dual(M), random.Random(seed), oracle=True)
            assert t.interval == expected, (t.interval, expected)
            if expected is None:
                assert td.interval is None
            else:
                assert td.interval == (-expected[1], -expected[0])
            n += 1
        c.info = f"{n} complexes, amplitude and dual amplitude match the residue-field oracle"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
