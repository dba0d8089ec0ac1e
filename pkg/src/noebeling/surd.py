"""Exact arithmetic in Q(sqrt 2).

Stage metrics use edge length 2**(-i/2), which is irrational for odd i.
Every length this package compares is a rational combination of such
scales, so values are kept as ``a + b*sqrt(2)`` with rational ``a, b``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering


@total_ordering
class Surd:
    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = Fraction(a)
        self.b = Fraction(b)

    @classmethod
    def coerce(cls, x) -> "Surd":
        if isinstance(x, Surd):
            return x
        return cls(x, 0)

    @classmethod
    def half_power(cls, i: int) -> "Surd":
        """Return 2**(-i/2) exactly."""
        if i % 2 == 0:
            return cls(Fraction(1, 2) ** (i // 2) if i >= 0 else 2 ** (-i // 2), 0)
        # 2**(-i/2) = 2**(-(i+1)/2) * sqrt(2)
        k = (i + 1) // 2
        return cls(0, Fraction(1, 2) ** k if k >= 0 else 2 ** (-k))

    def __add__(self, other):
        o = Surd.coerce(other)
        return Surd(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b)

    def __sub__(self, other):
        return self + (-Surd.coerce(other))

    def __rsub__(self, other):
        return Surd.coerce(other) - self

    def __mul__(self, other):
        o = Surd.coerce(other)
        return Surd(self.a * o.a + 2 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = Surd.coerce(other)
        norm = o.a * o.a - 2 * o.b * o.b
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        return self * Surd(o.a / norm, -o.b / norm)

    def sign(self) -> int:
        a, b = self.a, self.b
        if a >= 0 and b >= 0:
            return 0 if a == 0 and b == 0 else 1
        if a <= 0 and b <= 0:
            return -1
        # opposite signs: compare a**2 with 2*b**2
        if a > 0:
            return 1 if a * a > 2 * b * b else -1
        return 1 if 2 * b * b > a * a else -1

    def __eq__(self, other):
        if not isinstance(other, (Surd, int, Fraction)):
            return NotImplemented
        o = Surd.coerce(other)
        return self.a == o.a and self.b == o.b

    def __lt__(self, other):
        return (self - Surd.coerce(other)).sign() < 0

    def __hash__(self):
        return hash((self.a, self.b))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(2)

    def __repr__(self):
        return f"Surd({self.a}, {self.b})"

    def __str__(self):
        if self.b == 0:
            return str(self.a)
        if self.a == 0:
            return f"{self.b}*sqrt2"
        return f"{self.a}+{self.b}*sqrt2"
