import pytest

from dshift import parse_presentation


def alg(text):
    return parse_presentation(text)


@pytest.fixture
def kx():
    return alg("field Q; gen x : 0;")


@pytest.fixture
def fat():
    # k[x, xi | D xi = x^2]
    return alg("field Q; gen x : 0; gen xi : -1; D xi = x^2;")


@pytest.fixture
def crit():
    # derived critical locus of x^3/3
    return alg("field Q; gen x : 0; gen y : -1; D y = x^2;")


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
