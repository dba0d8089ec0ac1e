import math
from fractions import Fraction

from hypothesis import given, strategies as st

from noebeling.surd import Surd

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)


def test_half_powers():
    assert Surd.half_power(0) == 1
    assert Surd.half_power(2) == Fraction(1, 2)
    assert Surd.half_power(1) * Surd.half_power(1) == Fraction(1, 2)
    assert str(Surd.half_power(1)) == "1/2*sqrt2"


def test_series_bound():
    # 2 * sum 2**(-i/2) = 2 / (1 - 2**(-1/2))
    s = Surd(2) / (1 - Surd.half_power(1))
    assert s == Surd(4, 2)


@given(rationals, rationals, rationals, rationals)
def test_order_matches_floats(a, b, c, d):
    x, y = Surd(a, b), Surd(c, d)
    fx, fy = float(x), float(y)
    if not math.isclose(fx, fy, abs_tol=1e-9):
        assert (x < y) == (fx < fy)
    assert (x == y) == (a == c and b == d)


@given(rationals, rationals, rationals, rationals)
def test_field_ops(a, b, c, d):
    x, y = Surd(a, b), Surd(c, d)
    assert (x + y) - y == x
    if y != 0:
        assert (x / y) * y == x
