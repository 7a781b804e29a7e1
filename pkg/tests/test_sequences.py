from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentgrowth.errors import ConfigurationError, DomainError, InsufficientDataError
from momentgrowth.sequences import (
    CoeffSpec,
    available_terms,
    classify_shape,
    coeffs,
    condition_sums,
    convergence_exponent,
    log_b_array,
    read_table_csv,
    spec_convergence_exponent,
    spec_convergence_type,
    trend_of,
)


def test_power_coefficients_are_exact():
    s = CoeffSpec.of("power", alpha=2)
    assert [s.b(n).to_fraction() for n in range(5)] == [1, 4, 9, 16, 25]
    assert s.b(-1) == 1
    assert coeffs(s, -1) == (0, 1)
    assert s.shifted(2).b(0) == 9


def test_q_inv_hermite_squares_are_rational():
    s = CoeffSpec.of("q_inv_hermite", q="1/2")
    got = [s.b_squared(n).to_fraction() for n in range(6)]
    assert got == [Fraction(2 ** (n + 1) - 1, 4) for n in range(6)]


def test_log_b_matches_extended_values():
    for s in (CoeffSpec.of("power", alpha="5/2"), CoeffSpec.of("chen_ismail"),
              CoeffSpec.of("geom_power", a=3, alpha=1), CoeffSpec.of("double_exp", alpha=1)):
        lb = log_b_array(s, 12)
        ext = np.array([s.b(n).ln_float() for n in range(12)])
        assert np.allclose(lb, ext, rtol=1e-12, atol=1e-12), s.label()


@pytest.mark.parametrize("family,params", [
    ("power", {"alpha": 1}),
    ("power", {"beta": 2, "alpha": 2}),
    ("geometric_q", {"q": 2}),
    ("nope", {}),
    ("super_geom", {"a": 2}),
])
def test_bad_specs_raise(family, params):
    with pytest.raises(ConfigurationError):
        CoeffSpec.of(family, **params)


def test_dict_round_trip():
    for s in (CoeffSpec.of("power", alpha="3/2", offset=3),
              CoeffSpec.of("paired_determinate", inner=CoeffSpec.of("power", alpha=3)),
              CoeffSpec.table([1, 2, 4], [0, "1/2", 0])):
        assert CoeffSpec.from_dict(s.to_dict()) == s


def test_table_csv(tmp_path):
    p = tmp_path / "t.csv"
    p.write_text("n,a,b\n0,0,1\n1,0,log2:3\n2,0.5,9\n")
    spec = CoeffSpec.from_dict({"family": "table", "params": {"table_csv": str(p)}})
    assert available_terms(spec) == 3
    assert spec.b(1) == 8 and spec.a(2) == Fraction(1, 2)
    p.write_text("n,a,b\n0,0,1\n2,0,3\n")
    with pytest.raises(ConfigurationError):
        read_table_csv(p)


def test_trend_of_classifies_model_sums():
    n = np.arange(1, 10_001, dtype=float)
    assert trend_of(np.cumsum(1 / n**2))[0] == "converging"
    assert trend_of(np.cumsum(1 / n))[0] == "diverging"
    assert trend_of(np.cumsum(0.5 ** n))[0] == "converging"
    assert trend_of(np.ones(8))[0] == "inconclusive"


def test_condition_sums_and_shape():
    carleman, bere = condition_sums(CoeffSpec.of("power", alpha=2), 10_000)
    assert carleman.trend == "converging" and bere.trend == "converging"
    # harmonic Carleman sum for b_n = n + 1
    assert condition_sums(CoeffSpec.table(range(1, 20_002)), 20_000)[0].trend == "diverging"
    assert classify_shape(CoeffSpec.of("double_exp", alpha=1)).tail_shape == "log_convex"
    assert classify_shape(CoeffSpec.of("geometric_q", q="1/2")).tail_shape == "geometric_borderline"
    assert classify_shape(CoeffSpec.of("power", alpha=2)).tail_shape == "log_concave"
    with pytest.raises(DomainError):
        classify_shape(CoeffSpec.of("power", alpha=2), N=4)


def test_convergence_exponents_against_closed_forms():
    # n(r) = floor(r^(1/p)) for b_n = (n+1)^p
    assert spec_convergence_exponent(CoeffSpec.of("power", alpha=2)).value == pytest.approx(0.5, abs=5e-3)
    # b_n = 2^n: exponent 1 at the log scale, 0 at the power scale
    gp = CoeffSpec.of("geom_power", a=2, alpha=1)
    assert spec_convergence_exponent(gp, "log").value == pytest.approx(1.0, abs=0.02)
    assert spec_convergence_exponent(gp, "raw").value < 0.05
    with pytest.raises(DomainError):
        convergence_exponent([1.0, -2.0, 3.0])
    with pytest.raises(InsufficientDataError):
        convergence_exponent([2.0, 3.0])


def test_convergence_type_of_squares():
    # n(r) = floor(sqrt r) so n(r)/r^(1/2) -> 1
    est = spec_convergence_type(CoeffSpec.of("power", alpha=2), 0.5)
    assert est.value == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(DomainError):
        spec_convergence_type(CoeffSpec.of("power", alpha=2), 0.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=1.2, max_value=5.0))
def test_power_exponent_is_reciprocal(p):
    vals = np.arange(1, 20_001, dtype=float) ** p
    assert convergence_exponent(vals).value == pytest.approx(1 / p, rel=0.02)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=50))
def test_offset_shifts_indices(k):
    s = CoeffSpec.of("power", alpha=3)
    assert s.shifted(k).b(0) == s.b(k)
    assert math.isclose(log_b_array(s.shifted(k), 1)[0], log_b_array(s, k + 1)[-1])
