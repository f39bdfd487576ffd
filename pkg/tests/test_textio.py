import pytest

from dshift import ParseError, format_presentation, parse_presentation
from dshift.derham import DeRham
from dshift.textio import format_poly, parse_form

CRIT = """field Q;
gen x : 0;
gen y : -1;
D y = x^2;
"""


def test_roundtrip_canonical():
    A = parse_presentation(CRIT)
    assert format_presentation(A) == CRIT
    assert format_presentation(parse_presentation(format_presentation(A))) == CRIT


def test_forward_reference():
    with pytest.raises(ParseError, match="forward reference") as e:
        parse_presentation("field Q; gen x : 0;\ngen y : -1;\nD y = z;\ngen z : -1;")
    assert e.value.line == 3


def test_positive_degree():
    with pytest.raises(ParseError, match="positive degree"):
        parse_presentation("field Q;\ngen x : 2;")


def test_missing_header():
    with pytest.raises(ParseError):
        parse_presentation("gen x : 0;")


def test_bad_token_location():
    with pytest.raises(ParseError) as e:
        parse_presentation("field Q;\ngen x : 0;\ngen y : -1;\nD y = x $ 2;")
    assert e.value.line == 4
    assert e.value.col > 0


def test_weights_in_grammar():
    A = parse_presentation("field Q; gen x : 0 weight 1; gen y : -1 weight 2; D y = x^2;")
    assert A.weights() == {"x": 1, "y": 2}
    assert "weight 2" in format_presentation(A)


def test_rational_literals():
    A = parse_presentation("field Q; gen x : 0;")
    assert format_poly(A("-3/6*x^2 + 2")) == "-1/2*x^2 + 2"


def test_form_grammar():
    A = parse_presentation(CRIT)
    dr = DeRham(A)
    w = parse_form("d(y)^d(x) + x^2*d(x)", dr.ring)
    assert dr.components(w)[1] == parse_form("x^2*d(x)", dr.ring)
    # d(y) is even (degree -1 plus one form), so it commutes with d(x)
    assert parse_form("d(y)^d(x)", dr.ring) == parse_form("d(x)^d(y)", dr.ring)
    assert not parse_form("d(x)^d(x)", dr.ring).terms
