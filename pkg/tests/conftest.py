import pytest

from noebeling.complex import make_complex
from noebeling.construction import build_tower


def edge():
    return make_complex("ab", ["ab"])


def triangle():
    return make_complex("abc", ["ab", "bc", "ca"])


def simplex2():
    return make_complex("abc", ["abc"])


SEEDS = {"edge": (edge, 1), "triangle": (triangle, 1), "simplex2": (simplex2, 2)}

_towers = {}


def tower(name, kappa=3, depth=2):
    """Session cache of towers; deeper requests reuse nothing, they rebuild."""
    key = (name, kappa, depth)
    if key not in _towers:
        seed, n = SEEDS[name]
        _towers[key] = build_tower(seed(), n, kappa, depth)
    return _towers[key]


@pytest.fixture
def edge_tower():
    return tower("edge")


@pytest.fixture
def triangle_tower():
    return tower("triangle")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
