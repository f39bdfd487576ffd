import random

from hypothesis import given, settings
from hypothesis import strategies as st

from dshift import check_presentation, format_presentation, parse_presentation, shifted_cotangent
from dshift.corpus import fixture_bases, random_presentation
from dshift.derham import DeRham, random_form
from dshift.gca import mul

seeds = st.integers(min_value=0, max_value=10**6)
FIX = fixture_bases()


def forms(dr, rng, n, form_degrees=(0, 1, 2)):
    return [random_form(dr, rng, rng.randint(-3, 1), list(form_degrees)) for _ in range(n)]


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(["fat_point", "koszul", "deep"]))
def test_graded_commutative_and_associative(seed, name):
    rng = random.Random(seed)
    dr = DeRham(FIX[name])
    a, b, c = forms(dr, rng, 3)
    if a.terms and b.terms:
        s = -1 if (a.degree * b.degree) % 2 else 1
        assert mul(a, b) == mul(b, a).scale(s)
    assert mul(mul(a, b), c) == mul(a, mul(b, c))


@settings(max_examples=40, deadline=None)
@given(seeds, st.sampled_from(["fat_point", "koszul", "deep"]))
def test_leibniz(seed, name):
    rng = random.Random(seed)
    dr = DeRham(FIX[name])
    a, b = forms(dr, rng, 2)
    if not a.terms:
        return
    s = -1 if a.degree % 2 else 1
    for op in (dr.D, dr.d, dr.total):
        assert op(mul(a, b)) == mul(op(a), b) + mul(a, op(b)).scale(s)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=4))
def test_random_presentation_roundtrip(seed, n):
    A = random_presentation(random.Random(seed), n, -3)
    assert check_presentation(A).ok
    text = format_presentation(A)
    assert format_presentation(parse_presentation(text)) == text


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(min_value=1, max_value=3))
def test_cotangent_squares_vanish(seed, d):
    rng = random.Random(seed)
    B = random_presentation(rng, rng.randint(1, 3), -d)
    T = shifted_cotangent(B, d)
    assert check_presentation(T.algebra).ok
    for w in forms(T.derham, rng, 3):
        assert not T.derham.total(T.derham.total(w)).terms
