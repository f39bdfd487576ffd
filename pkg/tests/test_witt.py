import pytest

from dshift import DualityContext, PresentationError, SliceSpec
from dshift.dgmod import BasisElement, DgMap, DgModule, dagger
from dshift import parse_presentation, shifted_cotangent
from dshift.darboux import symmetric_complex
from dshift.witt import (check_lagrangian, check_symmetric, connectivity_floor, hyperbolic,
                         orthogonal_sum, rank_one, split_off_quadratic, surgery_to_lagrangian)

LAM = {1: 1, 2: -1, 3: 1, 4: -1, 6: -1}
SP = SliceSpec((-4, 1), max_polydeg=4)


def ctx(d):
    return DualityContext(d, LAM[d])


def free(kx, *degs, names=None):
    names = names or [f"e{i + 1}" for i in range(len(degs))]
    return DgModule(kx, [BasisElement(n, g) for n, g in zip(names, degs)], {})


@pytest.mark.parametrize("d", [1, 2, 3, 4])
@pytest.mark.parametrize("deg", [0, -1, -2])
def test_hyperbolic_symmetric(kx, d, deg):
    s = hyperbolic(free(kx, deg, names=["e"]), ctx(d))
    assert [(b.name, b.degree) for b in s.M.basis] == [("e", deg), ("e^+", -d - deg)]
    assert check_symmetric(s.M, s.phi, ctx(d)).ok


def test_zero_form_not_quis(kx):
    N = DgModule(kx, [BasisElement("a", -2), BasisElement("b", -1)], {0: {1: kx("x")}})
    c = ctx(2)
    rep = check_symmetric(N, DgMap(dagger(N, c), N, {}), c)
    assert rep.violations == ["φ is not a quasi-isomorphism"]


@pytest.mark.parametrize("d,ok", [(1, False), (2, True), (3, False), (4, False), (6, True)])
def test_rank_one(kx, d, ok):
    # a diagonal middle form is symmetric only for d = 2 mod 4
    s = rank_one(kx, -(d // 2), ctx(d), c=2)
    assert check_symmetric(s.M, s.phi, ctx(d)).ok is ok


def test_lagrangian_half_rank(kx):
    s = hyperbolic(free(kx, -2, names=["e"]), ctx(3))
    assert check_lagrangian(s, [0]).ok
    assert not check_lagrangian(s, []).ok
    with pytest.raises(PresentationError, match="half the rank"):
        surgery_to_lagrangian(s, [])


def test_surgery_single(kx):
    s = hyperbolic(free(kx, -2, names=["e"]), ctx(3))
    L = surgery_to_lagrangian(s, ["e"])
    assert L.swaps == [("e", "e^+")] and L.names == ["e^+"]
    assert L.report.ok and L.report.data["connectivity"]["ok"]
    # already inside the window
    assert surgery_to_lagrangian(s, ["e^+"]).swaps == []


def test_surgery_with_differential(kx):
    N = DgModule(kx, [BasisElement("a", -2), BasisElement("b", -1)], {0: {1: kx("x")}})
    s = hyperbolic(N, ctx(3))
    assert s.M.diff == [{1: kx("x")}, {}, {}, {2: kx("-x")}]
    assert check_symmetric(s.M, s.phi, ctx(3), SP).ok
    L = surgery_to_lagrangian(s, ["a", "b"], SP)
    assert L.swaps == [("a", "a^+")] and L.names == ["b", "a^+"]
    assert L.report.ok


def test_surgery_block(kx):
    s = hyperbolic(free(kx, -2, -2), ctx(3))
    L = surgery_to_lagrangian(s, ["e1", "e2"])
    assert L.names == ["e1^+", "e2^+"] and len(L.swaps) == 2


def test_surgery_block_needs_pairs(kx):
    # every partner of e1 also pairs with e2, so swapping e1 alone would
    # break isotropy; the block is swapped jointly
    c = ctx(3)
    N = free(kx, -2, -2)
    s = hyperbolic(N, c)
    rows = [dict(r) for r in s.phi.matrix]
    one = kx("1")
    two = kx("2")
    rows[0] = {2: one, 3: one}
    rows[1] = {2: one, 3: two}
    rows[2] = {0: one, 1: one}
    rows[3] = {0: one, 1: two}
    s.phi = DgMap(s.phi.source, s.phi.target, rows)
    assert check_symmetric(s.M, s.phi, c).ok
    assert not check_lagrangian(s, [1, 2]).ok and not check_lagrangian(s, [1, 3]).ok
    L = surgery_to_lagrangian(s, ["e1", "e2"])
    assert sorted(L.names) == ["e1^+", "e2^+"]


def test_floor():
    assert [connectivity_floor(d) for d in range(1, 6)] == [0, 0, -1, -1, -2]


def test_split_rank_one(kx):
    sp = split_off_quadratic(rank_one(kx, -1, ctx(2), c=3))
    assert sp.middle_indices == [0] and sp.rest.M.rank == 0 and sp.report.ok


def test_split_metabolic(kx):
    # e and e^+ share the middle degree but are not self-paired
    sp = split_off_quadratic(hyperbolic(free(kx, -1, names=["e"]), ctx(2)))
    assert sp.middle is None and sp.middle_indices == [] and sp.report.ok


def test_split_odd_d(kx):
    sp = split_off_quadratic(hyperbolic(free(kx, -1, names=["e"]), ctx(1)))
    assert sp.middle is None and sp.rest.M.rank == 2


def test_hyperbolic_over_point():
    # N = A[1] over A = k, d = 2: N itself is the Lagrangian
    k = parse_presentation("field Q;")
    s = hyperbolic(free(k, -1, names=["n"]), ctx(2))
    L = surgery_to_lagrangian(s, ["n"])
    assert L.names == ["n"] and L.swaps == [] and L.report.ok


def test_standard_form_base_lagrangian():
    T = shifted_cotangent(parse_presentation("field Q; gen x : 0;"), 1)
    sym = symmetric_complex(T.algebra, T.omega, 1, T.derham)
    L = surgery_to_lagrangian(sym, ["d(x)"])
    assert L.names == ["d(x)"] and L.report.ok


def test_rank_one_has_no_lagrangian(kx):
    s = rank_one(kx, -1, ctx(2))
    for wit in ([], ["q"]):
        with pytest.raises(PresentationError, match="not a Lagrangian"):
            surgery_to_lagrangian(s, wit)


def test_split_middle_plus_hyperbolic(kx):
    c = ctx(2)
    s = orthogonal_sum(rank_one(kx, -1, c, c=2), hyperbolic(free(kx, 0, names=["e"]), c))
    assert check_symmetric(s.M, s.phi, c).ok
    sp = split_off_quadratic(s)
    assert sp.middle_indices == [0] and sp.report.ok
    assert [b.name for b in sp.rest.M.basis] == ["e", "e^+"]
    assert surgery_to_lagrangian(sp.rest, ["e"]).report.ok
