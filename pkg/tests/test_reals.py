from __future__ import annotations

import math
from decimal import Decimal, getcontext
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ringdyn.reals import QuadraticReal, SymbolicReal, generator, parse_symbolic, symbolic_from_dict

getcontext().prec = 80
rationals = st.fractions(min_value=-50, max_value=50, max_denominator=40)
nonsquares = st.integers(2, 60).filter(lambda n: math.isqrt(n) ** 2 != n)


def decimal_value(a: Fraction, b: Fraction, D: int) -> Decimal:
    return Decimal(a.numerator) / a.denominator + Decimal(b.numerator) / b.denominator * Decimal(D).sqrt()


@given(rationals, rationals, nonsquares)
def test_floor_and_sign_match_decimal_oracle(a, b, D):
    q = QuadraticReal(a, b, D)
    v = decimal_value(a, b, D)
    assume(abs(v - v.to_integral_value()) > Decimal(10) ** -40)
    assert math.floor(q) == math.floor(v)
    assert q.sign() == (v > 0) - (v < 0)


@given(rationals, rationals, rationals, rationals, nonsquares)
def test_quadratic_field_arithmetic(a, b, c, d, D):
    x, y = QuadraticReal(a, b, D), QuadraticReal(c, d, D)
    assert (x + y) - y == x
    if y.sign():
        assert (x * y) / y == x


def test_presets():
    assert math.floor(generator("golden").exact()) == 1
    assert generator("phi") == generator("golden")
    assert generator("sqrt5").exact() == QuadraticReal(0, 1, 5)
    with pytest.raises(ValueError):
        generator("sqrt4")
    frac = SymbolicReal.gen("sqrt2").fixed_point_frac(64) / 2 ** 64
    assert abs(frac - (math.sqrt(2) - 1)) < 1e-15


def test_parse_and_round_trip():
    s = parse_symbolic("1/3 + 2*sqrt2 - golden/2")
    assert s.q0 == Fraction(1, 3)
    assert s.terms == {"golden": Fraction(-1, 2), "sqrt2": Fraction(2)}
    assert symbolic_from_dict(s.to_dict()) == s
    assert symbolic_from_dict("3/4") == SymbolicReal(Fraction(3, 4))
    with pytest.raises(TypeError):
        symbolic_from_dict(0.5)


@given(rationals, rationals, rationals)
def test_symbolic_mod1(q, c1, c2):
    s = SymbolicReal(q, {"sqrt2": c1, "sqrt3": c2})
    assert s.equal_mod1(s + 7)
    r = s.reduce_mod1()
    assert 0 <= r.q0 < 1
    assert (s - r).is_rational() and (s - r).q0.denominator == 1
    assert not (s - s).terms
