import pytest

from dshift import (DualityContext, PresentationError, SliceSpec, check_presentation,
                    shifted_cotangent, verify_symplectic)
from dshift.corpus import cotangent_fixtures, fixture_bases
from dshift.dgmod import BasisElement, DgModule
from dshift.shifted import TwistData, standard_symmetry_sign, sym_twisted
from dshift.textio import format_presentation

from conftest import alg

LINE = "field Q; gen x : 0;"
PLANE = "field Q; gen x1 : 0; gen x2 : 0;"


def test_line_d1():
    T = shifted_cotangent(alg(LINE), 1)
    assert [(g.name, g.degree) for g in T.algebra.gens] == [("x", 0), ("y_x", -1)]
    assert not T.algebra.diffs["y_x"].terms
    assert str(T.liouville) == "y_x*d(x)"
    assert T.omega == T.derham.d(T.liouville)
    assert T.fiber == ["y_x"]


def test_plane_d2():
    T = shifted_cotangent(alg(PLANE), 2)
    assert [g.name for g in T.algebra.gens] == ["x1", "x2", "y_x2", "y_x1"]
    assert {g.degree for g in T.algebra.gens[2:]} == {-2}
    assert str(T.omega) == "-d(x1)^d(y_x1) - d(x2)^d(y_x2)"
    assert verify_symplectic(T.algebra, T.omega, 2).ok


def test_twist_critical():
    T = shifted_cotangent(alg(LINE), 1, "1/3*x^3")
    assert format_presentation(T.algebra).splitlines()[-1] == "D y_x = x^2;"
    assert T.twist is not None and verify_symplectic(T.algebra, T.omega, 1).ok


def test_twist_product():
    T = shifted_cotangent(alg(PLANE), 1, "x1*x2")
    assert str(T.algebra.diffs["y_x1"]) == "x2"
    assert str(T.algebra.diffs["y_x2"]) == "x1"


def test_fat_point_fiber_differential():
    # the fiber of a degree -1 cell feeds back into the fiber of x
    T = shifted_cotangent(fixture_bases()["fat_point"], 1)
    assert [(g.name, g.degree) for g in T.algebra.gens] == [
        ("x", 0), ("zeta", -1), ("y_zeta", 0), ("y_x", -1)]
    assert str(T.algebra.diffs["y_x"]) == "2*x*y_zeta"
    assert check_presentation(T.algebra).ok
    rep = verify_symplectic(T.algebra, T.omega, 1)
    assert rep.ok and rep.method == "isomorphism"


def test_point():
    T = shifted_cotangent(alg("field Q;"), 3)
    assert not T.omega.terms and len(T.algebra.gens) == 0
    assert verify_symplectic(T.algebra, T.omega, 3).ok


def test_rejections():
    with pytest.raises(PresentationError, match="too deep"):
        shifted_cotangent(fixture_bases()["deep"], 1)
    with pytest.raises(PresentationError, match="degree"):
        shifted_cotangent(alg(LINE), 2, "x")
    with pytest.raises(PresentationError):
        shifted_cotangent(alg(LINE), 0)
    fat = fixture_bases()["fat_point"]
    with pytest.raises(PresentationError, match="cocycle"):
        shifted_cotangent(fat, 2, "zeta")


def test_symmetry_signs():
    assert [standard_symmetry_sign(d) for d in range(1, 5)] == [1, -1, 1, -1]


def test_zero_form_degenerate():
    T = shifted_cotangent(alg(LINE), 1)
    rep = verify_symplectic(T.algebra, T.derham.ring.zero(), 1)
    assert rep.closed and not rep.nondegenerate and not rep.ok


def test_wrong_lambda():
    T = shifted_cotangent(alg(LINE), 1)
    rep = verify_symplectic(T.algebra, T.omega, 1, ctx=DualityContext(1, -1))
    assert rep.nondegenerate and not rep.symmetric


def test_one_form_not_closed():
    T = shifted_cotangent(alg(LINE), 1)
    rep = verify_symplectic(T.algebra, T.liouville, 1)
    assert not rep.closed and "p_floor" in rep.details


def test_scaled_form_still_symplectic():
    T = shifted_cotangent(alg(PLANE), 1)
    assert verify_symplectic(T.algebra, T.omega * 3, 1).ok


@pytest.mark.parametrize("name,d,f,T", cotangent_fixtures(range(1, 3)),
                         ids=lambda v: v if isinstance(v, str) else None)
def test_fixtures_symplectic(name, d, f, T):
    rep = verify_symplectic(T.algebra, T.omega, d, SliceSpec((-3, 0), max_polydeg=3))
    assert rep.ok, rep.details


def test_sym_twisted_matches_cotangent():
    B = alg(LINE)
    M = DgModule(B, [BasisElement("y_x", -1)], [{}])
    A = sym_twisted(TwistData(B, M, {"y_x": B("x^2")}))
    T = shifted_cotangent(B, 1, "1/3*x^3")
    assert format_presentation(A) == format_presentation(T.algebra)


def test_twist_data_check():
    B = alg(LINE)
    M = DgModule(B, [BasisElement("y", -1)], [{}])
    assert TwistData(B, M, {"y": B("x")}).check().ok
    bad = TwistData(B, DgModule(B, [BasisElement("y", -2)], [{}]), {"y": B("x")})
    assert not bad.check().ok
