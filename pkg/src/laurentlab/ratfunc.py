"""Exact rational functions over the Laurent polynomial ring.

Thin value type used where a quotient genuinely is not a Laurent
polynomial: backward (inverse-step) maps and symbolic identity checks.
Equality is cross-multiplication, so no canonical form is needed; the
constructor still divides out the polynomial GCD to keep iterated
substitutions from blowing up.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .factor import poly_gcd
from .poly import LaurentPoly, P_ONE, VarId, exact_div


@dataclass(frozen=True)
class RationalFunction:
    num: LaurentPoly
    den: LaurentPoly

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not self.num.is_zero():
            g = poly_gcd(self.num, self.den)
            if not g.is_unit():
                object.__setattr__(self, "num", exact_div(self.num, g))
                object.__setattr__(self, "den", exact_div(self.den, g))

    @staticmethod
    def from_poly(p: LaurentPoly) -> "RationalFunction":
        return RationalFunction(p, P_ONE)

    @staticmethod
    def const(n: int) -> "RationalFunction":
        return RationalFunction(LaurentPoly.const(n), P_ONE)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_unit()

    def as_poly(self) -> LaurentPoly:
        if not self.den.is_unit():
            return exact_div(self.num, self.den)  # raises if not exact
        return self.num * self.den.invert()

    def __add__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        return RationalFunction(self.num * other.den + other.num * self.den, self.den * other.den)

    def __sub__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        return RationalFunction(self.num * other.den - other.num * self.den, self.den * other.den)

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.num, self.den)

    def __mul__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        return RationalFunction(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "RationalFunction") -> "RationalFunction":
        other = _coerce(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        return RationalFunction(self.num * other.den, self.den * other.num)

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("zero has no inverse")
        return RationalFunction(self.den, self.num)

    def __pow__(self, k: int) -> "RationalFunction":
        if k < 0:
            return self.inverse() ** (-k)
        out = RationalFunction.from_poly(P_ONE)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def equals(self, other: "RationalFunction") -> bool:
        other = _coerce(other)
        return self.num * other.den == other.num * self.den

    def __eq__(self, other) -> bool:
        if not isinstance(other, (RationalFunction, LaurentPoly, int)):
            return NotImplemented
        return self.equals(other)

    def __hash__(self):
        raise TypeError("rational functions are not hashable (no canonical form)")

    def evaluate(self, values: Mapping[VarId, Fraction], params=None) -> Fraction:
        d = self.den.evaluate(values, params)
        if d == 0:
            raise ZeroDivisionError("denominator vanishes at the given point")
        return self.num.evaluate(values, params) / d

    def __repr__(self) -> str:
        if self.den.is_one():
            return repr(self.num)
        return "(%r) / (%r)" % (self.num, self.den)


def _coerce(x) -> RationalFunction:
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, LaurentPoly):
        return RationalFunction.from_poly(x)
    if isinstance(x, int):
        return RationalFunction.const(x)
    raise TypeError("cannot coerce %r to a rational function" % (x,))


def poly_substitute_rf(p: LaurentPoly, mapping: Mapping[VarId, RationalFunction]) -> RationalFunction:
    """Substitute rational functions for variables of a Laurent polynomial.

    Variables absent from the mapping stay symbolic.  A negative exponent
    on a mapped variable inverts its value (error if that value is zero).
    """
    total = RationalFunction.from_poly(LaurentPoly.zero())
    for m, c in p.terms.items():
        keep = []
        prod = RationalFunction.from_poly(LaurentPoly.const(c))
        for v, e in m:
            rf = mapping.get(v)
            if rf is None:
                keep.append((v, e))
            else:
                prod = prod * (rf ** e)
        if keep:
            prod = prod * RationalFunction.from_poly(LaurentPoly.monomial(tuple(keep)))
        total = total + prod
    return total
