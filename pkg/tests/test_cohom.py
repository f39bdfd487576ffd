from dshift import SliceSpec
from dshift.cohom import (algebra_complex, cohomology, euler_characteristic, find_weights,
                          is_weight_homogeneous, solve_boundary)
from dshift.dgmod import DgModule

from conftest import alg

FAT_W = SliceSpec((-1, 0), max_weight=4, weights={"x": 1, "xi": 2})


def test_polynomial_slice_dims(kx):
    C = algebra_complex(kx, SliceSpec((-1, 0), max_polydeg=3))
    assert sum(len(C.cells(0, lab)) for lab in C.labels()) == 4
    assert sum(len(C.cells(-1, lab)) for lab in C.labels()) == 0
    assert C.exact


def test_weight_summands():
    # Sym over k[x] on y of weight 1, slices up to weight 2
    A = alg("field Q; gen x : 0 weight 0; gen y : -1 weight 1;")
    C = algebra_complex(A, SliceSpec((-2, 0), max_weight=2, max_polydeg=2))
    assert C.labels() == [0, 1, 2]


def test_exactness_flag(fat):
    assert is_weight_homogeneous(fat, {"x": 1, "xi": 2})
    assert not is_weight_homogeneous(fat, {"x": 1, "xi": 1})
    assert algebra_complex(fat, FAT_W).exact
    # a flat polydeg truncation does not preserve the differential here
    assert not algebra_complex(fat, SliceSpec((-1, 0), max_polydeg=3, weights={"x": 0, "xi": 0})).exact


def test_found_weights(fat):
    w = find_weights(fat)
    assert w is not None and 2 * w["x"] == w["xi"]


def test_two_term_complexes():
    K = alg("field Q;")
    sp = SliceSpec((-1, 0), max_polydeg=0)
    assert cohomology(DgModule(K, [("a", -1), ("b", 0)], {0: {1: "0"}}), sp).dims() == {-1: 1, 0: 1}
    assert cohomology(DgModule(K, [("a", -1), ("b", 0)], {0: {1: "1"}}), sp).dims() == {-1: 0, 0: 0}


def test_h0_of_fat_point(fat):
    rep = cohomology(fat, FAT_W)
    h0 = {s.weight: s.dim for s in rep.slices if s.degree == 0}
    assert h0 == {0: 1, 1: 1, 2: 0, 3: 0, 4: 0}
    assert rep.representatives(0, 1) and str(rep.representatives(0, 1)[0]) == "x"
    assert rep.dim(-1) == 0


def test_solve_boundary(fat, kx):
    r = solve_boundary(fat, fat("x^2"), FAT_W)
    assert r.ok and r.primitive == fat("xi")
    r1 = solve_boundary(kx, kx("1"), SliceSpec((-1, 0), max_polydeg=2))
    assert not r1.ok
    assert r1.class_coords[0]["representatives"] == ["1"]
    r0 = solve_boundary(kx, kx("0"), SliceSpec((-1, 0), max_polydeg=2))
    assert r0.ok and not r0.primitive.terms


def test_crosscheck_ranks(fat):
    rep = cohomology(fat, FAT_W, crosscheck=True)
    assert rep.dim(0) == 2


def test_euler_characteristic(fat):
    C = algebra_complex(fat, SliceSpec((-3, 0), max_weight=6, weights={"x": 1, "xi": 2}))
    # chi of each weight slice equals the alternating cell count; for weight 2: x^2 - xi = 0
    assert euler_characteristic(C, -3, 0, 2) == 0
