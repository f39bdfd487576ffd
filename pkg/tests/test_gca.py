from fractions import Fraction

import pytest

from dshift import (AlgebraMap, Generator, PresentationError, SemifreeCdga, apply_differential,
                    check_presentation, identity_map, localize, mul)
from dshift.gca import substitute

from conftest import alg


def test_even_square(kx):
    x = kx.gen("x")
    assert mul(x, x) == kx("x^2")


def test_odd_square_vanishes():
    A = alg("field Q; gen xi : -1;")
    xi = A.gen("xi")
    assert not mul(xi, xi).terms


def test_koszul_sign():
    A = alg("field Q; gen xi : -1; gen eta : -1;")
    xi, eta = A.gen("xi"), A.gen("eta")
    assert mul(eta, xi) == -mul(xi, eta)


def test_mixed_parity_commutes():
    A = alg("field Q; gen x : 0; gen xi : -1; gen e : -2;")
    for a, b in [("x", "xi"), ("x", "e"), ("xi", "e")]:
        assert A(f"{a}*{b}") == A(f"{b}*{a}")


def test_leibniz_example(fat):
    assert apply_differential(fat, fat("xi*x")) == fat("x^3")
    assert not apply_differential(fat, fat("1")).terms


def test_odd_leibniz_sign(fat):
    # D(xi*xi) = 0 even though D xi != 0
    A = alg("field Q; gen x : 0; gen a : -1; gen b : -1; D a = x; D b = x^2;")
    # D(a b) = x b - a x^2
    assert A.D(A("a*b")) == A("x*b - x^2*a")
    assert not A.D(A.D(A("a*b"))).terms


def test_double_differential_of_eta():
    # D(eta) = x*xi, so D(D eta) = x * D(xi) = x^3 with D xi = x^2; the
    # presentation is therefore not a cdga
    A = SemifreeCdga([Generator("x", 0), Generator("xi", -1), Generator("eta", -2)],
                     {"xi": "x^2", "eta": "x*xi"})
    assert A.D(A.D(A.gen("eta"))) == A("x^3")
    assert not check_presentation(A).ok


def test_check_presentation_examples(fat):
    assert check_presentation(fat).ok
    bad = SemifreeCdga([Generator("xi", -1)], {"xi": "xi"})
    rep = check_presentation(bad)
    assert not rep.ok
    assert any("degree" in v for v in rep.violations)
    bad2 = SemifreeCdga([Generator("x", 0), Generator("xi", -1), Generator("eta", -2)],
                        {"xi": "x", "eta": "xi"})
    rep2 = check_presentation(bad2)
    assert not rep2.ok


def test_algebra_maps(kx, fat):
    assert identity_map(fat).check().ok
    assert AlgebraMap(kx, fat, {"x": "x"}).check().ok
    with pytest.raises(PresentationError):
        AlgebraMap(kx, fat, {"x": "xi"}, check=True)


def test_algebra_map_composition(kx, fat):
    f = AlgebraMap(kx, kx, {"x": "2*x + 1"})
    g = AlgebraMap(kx, fat, {"x": "x"})
    h = f.compose(g) if f.target is g.source else g.compose(f)
    assert h(kx("x^2")) in (fat("4*x^2 + 4*x + 1"),)


def test_localize_shape(kx):
    L = localize(kx, "x")
    assert [(g.name, g.degree) for g in L.gens] == [("x", 0), ("t", 0), ("xi_loc", -1)]
    assert L.diffs["xi_loc"] == L("x*t - 1")
    assert check_presentation(L).ok


def test_localize_rejects_odd(fat):
    with pytest.raises(PresentationError):
        localize(fat, "xi")


def test_substitute_respects_signs():
    A = alg("field Q; gen a : -1; gen b : -1;")
    R = A.ring
    swap = {R.index["a"]: A.gen("b"), R.index["b"]: A.gen("a")}
    assert substitute(A("a*b"), swap, R) == A("b*a")
    assert substitute(A("a*b"), swap, R) == -A("a*b")


def test_weights_validated():
    bad = SemifreeCdga([Generator("x", 0, 1), Generator("xi", -1, 3)], {"xi": "x^2"})
    rep = check_presentation(bad)
    assert not rep.ok and any("weight" in v for v in rep.violations)
    A = SemifreeCdga([Generator("x", 0, 1), Generator("xi", -1, 2)], {"xi": "x^2"})
    assert A.weights() == {"x": 1, "xi": 2}


def test_fraction_coefficients(kx):
    p = kx("1/3*x^3")
    assert p.terms[(3,)] == Fraction(1, 3)
