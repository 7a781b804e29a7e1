from __future__ import annotations

import math
import pickle
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentgrowth.errors import DomainError
from momentgrowth.xreal import XComplex, XReal, arith, exp_x, log1p_x, log_x, sqrt_x

small_fracs = st.fractions(min_value=-10**6, max_value=10**6, max_denominator=10**6)
positive = st.fractions(min_value=Fraction(1, 10**6), max_value=10**6, max_denominator=10**6)


def close(x: XReal, y, bits: int = 120) -> bool:
    y = y if isinstance(y, XReal) else XReal(y, x.prec)
    if y.is_zero():
        return x.is_zero() or abs(x).log2abs() < -bits
    return abs(x - y) <= abs(y) * XReal(2, x.prec) ** (-bits)


def test_exact_small_values():
    assert XReal(3) + XReal(4) == 7
    assert XReal(Fraction(1, 4)).to_fraction() == Fraction(1, 4)
    assert close(XReal("1/3") * 3, 1, 126)
    assert XReal(0).sign == 0 and XReal(-2).sign == -1


def test_huge_exponents_do_not_overflow():
    x = exp_x(XReal(10) ** 6)
    assert x.exponent > 10**6
    assert math.isinf(float(x))
    assert close(log_x(x), XReal(10) ** 6)
    assert (x * x).exponent in (2 * x.exponent, 2 * x.exponent + 1)


def test_to_text_switches_to_log2_form():
    x = XReal("log2:5000")
    assert x.to_text().startswith("log2:5000")
    assert XReal(x.to_text()) == x
    assert (-x).to_text().startswith("-log2:")
    assert XReal("1.5").to_text().startswith("1.5")


def test_record_round_trip_keeps_precision():
    x = XReal("2.718281828459045235360287471352662497757", 200)
    y = XReal.from_record(x.to_record())
    assert y == x and y.prec == 200
    z = XComplex(1.5, -2.25)
    assert XComplex.from_record(z.to_record()).re == z.re
    assert pickle.loads(pickle.dumps(x)) == x


def test_domain_errors():
    with pytest.raises(DomainError):
        log_x(XReal(-1))
    with pytest.raises(DomainError):
        sqrt_x(XReal(-4))
    with pytest.raises(DomainError):
        XReal(1) / XReal(0)
    with pytest.raises(DomainError):
        XReal(float("nan"))
    with pytest.raises(DomainError):
        arith(XReal(1), op="pow")


def test_log1p_extremes():
    tiny = XReal("log2:-400")
    assert close(log1p_x(tiny), tiny)
    big = XReal("log2:4000")
    assert close(log1p_x(big), log_x(big))
    assert close(log1p_x(XReal(1)), log_x(XReal(2)))


def test_complex_arithmetic():
    z = XComplex(1, 2)
    w = XComplex(3, -1)
    assert complex(z * w) == (1 + 2j) * (3 - 1j)
    assert float(z.abs2()) == 5.0
    assert complex(z.conj()) == 1 - 2j
    s = XComplex(-4, 0).sqrt()
    assert abs(complex(s) - 2j) < 1e-30


@given(small_fracs, small_fracs)
def test_add_mul_match_fractions(a, b):
    x, y = XReal(a), XReal(b)
    assert close(x + y, a + b, 100)
    assert close(x * y, a * b, 100)
    assert close(x - y, a - b, 100) or abs(a - b) < Fraction(1, 10**20)


@given(positive)
def test_log_exp_inverse(a):
    x = XReal(a)
    assert close(exp_x(log_x(x)), x, 110)
    assert close(sqrt_x(x) * sqrt_x(x), x, 120)


@settings(max_examples=50)
@given(st.integers(min_value=-10**9, max_value=10**9), st.integers(min_value=64, max_value=300))
def test_record_round_trip_property(k, prec):
    x = XReal(f"log2:{k}", prec) * 3
    assert XReal.from_record(x.to_record()) == x


@given(positive, positive)
def test_ordering_matches_fractions(a, b):
    assert (XReal(a) < XReal(b)) == (a < b)
    assert (XReal(a) == XReal(b)) == (a == b)
