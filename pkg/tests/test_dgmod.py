import itertools
import random

import pytest

from dshift import AlgebraMap, DgMap, DgModule, DualityContext, PresentationError, SliceSpec
from dshift.cohom import cohomology
from dshift.dgmod import (base_change, calibrate, cone, dagger, dual_map, free_module, identity,
                          lift_quis, shift, tor_amplitude, wedge_power, zero_map)

from conftest import alg

W = SliceSpec((-3, 2), max_polydeg=4)


def test_cone_of_zero_is_sum(kx):
    M = free_module(kx, [0], ["e"])
    N = free_module(kx, [0], ["f"])
    C = cone(zero_map(M, N))
    assert [(b.degree) for b in C.basis] == [-1, 0]
    assert not any(C.diff)


def test_cone_of_identity_acyclic(kx):
    M = DgModule(kx, [("a", -1), ("b", 0)], {0: {1: "x"}})
    dims = cohomology(cone(identity(M)), W).dims()
    assert set(dims.values()) == {0}


def test_cone_of_x(kx):
    M = free_module(kx, [0], ["e"])
    rep = cohomology(cone(DgMap(M, M, {0: {0: "x"}})), W)
    # H^0 = k[x]/(x): one class, represented by the constant on e
    assert rep.dims() == {-3: 0, -2: 0, -1: 0, 0: 1, 1: 0, 2: 0}
    (s,) = [s for s in rep.slices if s.dim]
    assert s.representatives == [{1: kx("1")}]


def test_dagger_degree(kx):
    ctx = DualityContext(1, 1)
    assert dagger(free_module(kx, [0], ["dx"]), ctx).basis[0].degree == -1


def test_dagger_involutive(kx):
    ctx = calibrate(1)
    M = DgModule(kx, [("a", -1), ("b", 0)], {0: {1: "x"}})
    Mpp = dagger(dagger(M, ctx), ctx)
    assert Mpp.degrees() == M.degrees()
    assert Mpp.diff == M.diff


def _sign_equivalent(L, R, match):
    """Is there ``s in {±1}^n`` with ``s_i L_ij s_j = R_{m(i) m(j)}``?"""
    n = L.rank
    for signs in itertools.product((1, -1), repeat=n):
        ok = True
        for i in range(n):
            want = {match[j]: v.scale(signs[i] * signs[j]) for j, v in L.diff[i].items()}
            if want != R.diff[match[i]]:
                ok = False
                break
        if ok:
            return True
    return False


def test_dagger_of_cone(kx):
    M = DgModule(kx, [("a", -1), ("b", 0)], {0: {1: "x"}}, name="M")
    N = DgModule(kx, [("c", -1), ("e", 0)], {0: {1: "x^2"}}, name="N")
    phi = DgMap(M, N, {0: {0: "x"}, 1: {1: "x^2"}})
    assert phi.check().ok
    ctx = DualityContext(1, 1)
    L = dagger(cone(phi), ctx)
    R = shift(cone(dual_map(phi, 1)), -1)
    assert sorted(L.degrees()) == sorted(R.degrees())
    # sa+ <-> a^v, sb+ <-> b^v, c+ <-> sc^v, e+ <-> se^v
    assert _sign_equivalent(L, R, {0: 2, 1: 3, 2: 0, 3: 1})


def test_wedge_powers(kx):
    assert wedge_power(free_module(kx, [0]), 0).rank == 1
    assert wedge_power(free_module(kx, [0, 0]), 2).rank == 1
    # e1 of degree -1 has even wedge parity, so e1^2 survives
    W2 = wedge_power(free_module(kx, [0, -1]), 2)
    assert sorted(W2.degrees()) == [-2, -1]


def test_tor_amplitude_examples(kx):
    assert tor_amplitude(DgModule(kx, [("a", -1), ("b", 0)], {0: {1: "x"}})).interval == (-1, 0)
    assert tor_amplitude(DgModule(kx, [("a", -1), ("b", 0)], {0: {1: "1"}})).zero
    for d in (1, 2, 3):
        assert tor_amplitude(shift(free_module(kx, [0]), d)).interval == (-d, -d)


def test_tor_amplitude_over_fat_point(fat):
    # A itself: the only augmentation is x = 0; A tensor k = k in degree 0
    assert tor_amplitude(free_module(fat, [0])).interval == (0, 0)


def test_calibration_frozen():
    # the standard form on T*[d] k[x] fixes the sign: +1 for odd d, -1 for even d
    assert [calibrate(d).lambdaP for d in (1, 2, 3, 4)] == [1, -1, 1, -1]
    assert calibrate(3) == calibrate(3)


def test_lift_unit(kx):
    phi = AlgebraMap(kx, kx, {"x": "x"})
    M = free_module(kx, [0])
    g = lift_quis(phi, M, M, DgMap(M, M, {0: {0: "3"}}))
    assert g.matrix == [{0: kx("3")}]


def test_lift_row_operation():
    B = alg("field Q; gen x : 0;")
    A = alg("field Q; gen x : 0; gen u : 0; gen xi : -1; D xi = u - x^2;")
    phi = AlgebraMap(B, A, {"x": "x"})
    basis = [("a1", -1), ("a2", -1), ("b1", 0), ("b2", 0)]
    M = DgModule(B, basis, {0: {2: "x", 3: "1"}, 1: {2: "x^2", 3: "x"}})
    # N differs by a1 -> a1 + x a2
    N = DgModule(B, basis, {0: {2: "x + x^3", 3: "1 + x^2"}, 1: {2: "x^2", 3: "x"}})
    f = DgMap(base_change(M, phi), base_change(N, phi),
              {0: {0: "1", 1: "-x"}, 1: {1: "1"}, 2: {2: "1"}, 3: {3: "1"}})
    assert f.check().ok
    g = lift_quis(phi, M, N, f, max_polydeg=3)
    assert g.check().ok
    dims = cohomology(cone(g), SliceSpec((-3, 1), max_polydeg=5)).dims()
    assert set(dims.values()) == {0}


def test_lift_needs_h0_iso():
    B = alg("field Q; gen x : 0 weight 1;")
    A = alg("field Q; gen x : 0 weight 1; gen xi : -1 weight 2; D xi = x^2;")
    phi = AlgebraMap(B, A, {"x": "x"})
    M = shift(free_module(B, [0]), 1)
    f = identity(base_change(M, phi))
    with pytest.raises(PresentationError, match="H\\^0"):
        lift_quis(phi, M, M, f, spec=SliceSpec((-1, 0), max_weight=3))


def test_shift_sign_square(kx):
    M = DgModule(kx, [("a", -1), ("b", 0)], {0: {1: "x"}})
    M2 = shift(shift(M, 1), 1)
    assert M2.degrees() == shift(M, 2).degrees()
    assert M2.diff == M.diff


def test_random_maps_chain(kx):
    rng = random.Random(3)
    M = DgModule(kx, [("a", -1), ("b", 0)], {0: {1: "x^2"}})
    for _ in range(5):
        c = rng.randint(-3, 3)
        f = DgMap(M, M, {0: {0: kx(str(c))}, 1: {1: kx(str(c))}})
        assert f.check().ok
