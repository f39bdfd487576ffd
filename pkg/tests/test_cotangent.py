import random

import pytest

from dshift import PresentationError, SliceSpec, check_connectivity, cotangent_complex
from dshift.corpus import random_prefix_inclusion
from dshift.cotangent import is_finitely_presented_criterion, relative_cotangent_triangle

from conftest import alg

SP = SliceSpec((-3, 0), max_weight=6)


def test_line(kx):
    L = cotangent_complex(kx).module
    assert [(b.name, b.degree) for b in L.basis] == [("d(x)", 0)]
    assert L.diff == [{}]


def test_fat_point(fat):
    L = cotangent_complex(fat).module
    assert [(b.name, b.degree) for b in L.basis] == [("d(x)", 0), ("d(xi)", -1)]
    # D(d xi) = -d(x^2)
    assert L.diff[1] == {0: fat("-2*x")}


def test_plane():
    L = cotangent_complex(alg("field Q; gen x : 0; gen y : 0;")).module
    assert L.rank == 2 and not any(L.diff)


def test_universal_derivation(fat):
    # coefficients sit on the left and d(x) is odd in the de Rham algebra
    C = cotangent_complex(fat)
    assert C.d(fat("x^3*xi")) == {0: fat("-3*x^2*xi"), 1: fat("x^3")}


def test_relative_triangles(kx, fat):
    t = relative_cotangent_triangle(kx, fat)
    assert [b.name for b in t.LAB.basis] == ["d(xi)"] and t.LAB.diff == [{}]
    assert t.LAB.rank + t.LB_A.rank == t.LA.rank
    assert relative_cotangent_triangle(fat, fat).LAB.rank == 0
    K = alg("field Q;")
    t0 = relative_cotangent_triangle(K, fat)
    assert t0.LAB.diff == t0.LA.diff


def test_triangle_maps_are_chain(kx, fat):
    t = relative_cotangent_triangle(kx, fat)
    assert t.inclusion.check().ok and t.projection.check().ok


def test_prefix_required(kx):
    other = alg("field Q; gen y : 0;")
    with pytest.raises(PresentationError):
        relative_cotangent_triangle(kx, other)


def test_connectivity_examples(kx, fat):
    r = check_connectivity(kx, fat, 1, SP)
    assert r.cond_i and r.cond_ii and r.moreover
    r2 = check_connectivity(fat, fat, 2, SP)
    assert r2.cond_i and r2.cond_ii and r2.moreover
    r3 = check_connectivity(alg("field Q;"), kx, 1, SP)
    assert not r3.cond_i and not r3.cond_ii and r3.agree


def test_moreover_counts(kx, fat):
    # H^0 A tensor H^{-1} K against H^{-1} L_{A/B}: one class in weights 2 and 3
    r = check_connectivity(kx, fat, 1, SP)
    per = r.details["moreover"]
    assert {k: v for k, v in per.items() if v != (0, 0)} == {"2": (1, 1), "3": (1, 1)}


@pytest.mark.parametrize("seed", range(6))
def test_random_prefix_agreement(seed):
    B, A = random_prefix_inclusion(random.Random(seed))
    for d in (1, 2):
        r = check_connectivity(B, A, d, SliceSpec((-4, 0), max_weight=5))
        assert r.agree


def test_finitely_presented(kx, fat):
    assert is_finitely_presented_criterion(kx).ok
    rep = is_finitely_presented_criterion(fat)
    assert rep.ok and rep.data["H0_relations"] == ["x^2"]
