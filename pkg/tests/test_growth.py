from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentgrowth.errors import ConfigurationError, DomainError, InsufficientDataError
from momentgrowth.growth import (
    OrderFunctionSpec,
    alphahelp_bracket,
    canonical_product_log,
    counting_sandwich,
    dual_of,
    estimate_limsup,
    order_function_summability,
    product_coeff_logs,
    scale_from_coeffs,
    scale_from_maxmod,
    summability_vs_counting,
    type_from_coeffs,
    validate,
)
from momentgrowth.sequences import CoeffSpec

# log prod_{n<N} (1 + 1/(n+1)^2) by direct mpmath summation at 30 digits, frozen
PRODUCT_1E4 = 1.30174640360371265277176716298
PRODUCT_1E6 = 1.30184539860421267777043341301


# ---------------------------------------------------------------------------
# estimators


def test_limsup_of_a_line():
    x = np.linspace(1, 100, 200)
    est = estimate_limsup(x, 0.7 * x + 3.0)
    assert est.value == pytest.approx(0.7, abs=1e-6)
    assert est.confidence == "high"
    with pytest.raises(InsufficientDataError):
        estimate_limsup([1, 2], [1, 2])
    with pytest.raises(DomainError):
        estimate_limsup(x, x, basis="other")


def test_exponential_series_order_and_type():
    n = np.arange(0, 401)
    la = -np.array([math.lgamma(k + 1) for k in n])
    assert scale_from_coeffs(la).rho.value == pytest.approx(1.0, abs=0.01)
    tau = type_from_coeffs(la, "order", 1.0).tau
    assert tau.slope == pytest.approx(1.0, abs=0.02)


@pytest.mark.parametrize("rho", [0.5, 1.0, 2.0, 3.0])
def test_order_of_power_coefficient_streams(rho):
    # sum z^n / n^(n/rho) has order rho
    n = np.arange(1, 801, dtype=float)
    la = np.concatenate(([0.0], -(n / rho) * np.log(n)))
    assert scale_from_coeffs(la).rho.value == pytest.approx(rho, rel=0.03)


def test_maxmod_scales():
    L = np.linspace(5, 60, 40)
    rep = scale_from_maxmod(list(zip(L, np.exp(0.75 * L))), "order")
    assert rep.rho.value == pytest.approx(0.75, abs=1e-3)
    L = np.geomspace(10, 1e8, 40)
    rep = scale_from_maxmod(list(zip(L, L**3)), "log")
    assert rep.rho.value == pytest.approx(2.0, abs=1e-3)
    L = np.exp(np.exp(np.linspace(1.0, 3.5, 40)))
    rep = scale_from_maxmod(list(zip(L, L * np.log(L) ** 1.5)), "dlog")
    assert rep.rho.value == pytest.approx(1.5, abs=1e-3)
    with pytest.raises(InsufficientDataError):
        scale_from_maxmod([(1.0, 2.0)] * 3)
    with pytest.raises(DomainError):
        scale_from_maxmod(list(zip(L, L)), "weird")


# ---------------------------------------------------------------------------
# order functions


KINDS = [
    OrderFunctionSpec.of("power", alpha=0.5),
    OrderFunctionSpec.of("log_power", alpha=2),
    OrderFunctionSpec.of("loglog_power", alpha=3),
    OrderFunctionSpec.of("logpow_loglogpow", alpha=1.5, beta=2),
    OrderFunctionSpec.of("scaled", OrderFunctionSpec.of("power", alpha=0.25), c=3),
]


@pytest.mark.parametrize("afs", KINDS, ids=lambda a: a.kind)
def test_order_functions_validate(afs):
    rep = validate(afs)
    assert rep.ok, rep.to_dict()
    assert OrderFunctionSpec.from_dict(afs.to_dict()) == afs


def test_thresholds():
    assert OrderFunctionSpec.of("power", alpha=0.5).r0 == 0.0
    assert OrderFunctionSpec.of("log_power", alpha=2).r0 == pytest.approx(math.e**2)
    lr0 = OrderFunctionSpec.of("loglog_power", alpha=3).log_r0
    assert lr0 * math.log(lr0) == pytest.approx(3.0)


def test_bad_order_functions():
    with pytest.raises(ConfigurationError):
        OrderFunctionSpec.of("power", alpha=1.5)
    with pytest.raises(ConfigurationError):
        OrderFunctionSpec.of("composed", OrderFunctionSpec.of("power", alpha=0.5))
    with pytest.raises(DomainError):
        OrderFunctionSpec.of("log_power", alpha=2).alpha(2.0)


@given(st.floats(min_value=1e-6, max_value=1e6), st.floats(min_value=0.05, max_value=0.95))
def test_power_dual_is_power(r, a):
    afs = OrderFunctionSpec.of("power", alpha=a)
    assert dual_of(afs, r) == pytest.approx(r ** afs.params[0][1], rel=1e-9)
    assert dual_of(afs, 0) == 0.0


@given(st.floats(min_value=3.0, max_value=500.0))
def test_dual_inverts_alpha(L):
    afs = OrderFunctionSpec.of("log_power", alpha=2)
    assert afs.beta_log(-L) * afs.alpha_log(L) == pytest.approx(1.0, rel=1e-12)


# ---------------------------------------------------------------------------
# canonical products and counting functions


def test_product_against_frozen_sums():
    ext = canonical_product_log(u=[Fraction(1, (n + 1) ** 2) for n in range(10_000)], r=1)
    assert float(ext.value) == pytest.approx(PRODUCT_1E4, rel=1e-15)
    assert ext.terms == 10_000
    lu = -2.0 * np.log(np.arange(1, 1_000_001, dtype=float))
    flt = canonical_product_log(log_u=lu, r=1)
    assert float(flt.value) == pytest.approx(PRODUCT_1E6, rel=1e-13)
    # the unseen tail sum_{n > N} 1/n^2 is about 1/N
    assert flt.tail_estimate == pytest.approx(1e-6, rel=1e-3)


def test_product_arguments():
    with pytest.raises(DomainError):
        canonical_product_log(r=1)
    with pytest.raises(DomainError):
        canonical_product_log(u=[1, 0.5], r=-1)
    assert canonical_product_log(u=[1, 0.5], r=0).value.is_zero()


def test_counting_examples():
    u = [Fraction(1, (n + 1) ** 2) for n in range(2000)]
    # zeros 1, 4, ..., 100 lie in |z| <= 100
    assert counting_sandwich(u=u, r=100).n_r == 10
    assert counting_sandwich(log_u=-2 * np.log(np.arange(1, 2001, dtype=float)), r=100).n_r == 10
    assert counting_sandwich(u=u, r=99).n_r == 9
    lu = -math.log(2.0) * np.arange(200)
    assert counting_sandwich(log_u=lu, r=2**20.5).n_r == 21


@settings(max_examples=40, deadline=None)
@given(st.floats(min_value=-5, max_value=40), st.floats(min_value=1.1, max_value=4.0))
def test_sandwich_holds(log_r, p):
    lu = -p * np.log(np.arange(1, 5001, dtype=float))
    rep = counting_sandwich(log_u=lu, r=math.exp(log_r))
    assert rep.sandwich_ok


def test_product_coefficients_are_elementary_symmetric():
    got = np.exp(product_coeff_logs(np.log([1.0, 2.0, 3.0]), 4))
    assert np.allclose(got[:4], [1, 6, 11, 6])
    assert got[4] == 0.0


def test_summability_against_counting():
    afs = OrderFunctionSpec.of("power", alpha=0.75)
    lu = -2.0 * np.log(np.arange(1, 20_001, dtype=float))
    rep = summability_vs_counting(afs, log_u=lu, r_grid=(10.0, 1e3, 1e5))
    assert rep.beta_sum.trend == "converging"
    assert rep.counting_bound_ok and rep.power_bound_ok
    with pytest.raises(DomainError):
        summability_vs_counting(OrderFunctionSpec.of("log_power", alpha=2), log_u=lu, r_grid=(2.0,))


def test_order_function_summability_regimes():
    spec = CoeffSpec.of("power", alpha=2)
    rep = order_function_summability(spec, OrderFunctionSpec.of("power", alpha=0.75), N=1000)
    assert rep.regime == "i"
    assert rep.tails["inv_b"].trend == "converging"
    rep = order_function_summability(spec, OrderFunctionSpec.of("log_power", alpha=3), N=1000)
    assert rep.regime == "ii"


# ---------------------------------------------------------------------------
# root bracket


@pytest.mark.parametrize("n", [4, 9, 16, 100, 10_000])
def test_bracket_roots_against_closed_forms(n):
    # alpha = 2: x^2 + 2x = n; alpha = 1/2: with y = sqrt(x), y + 1/(2y) = n
    assert alphahelp_bracket(n, 2).root == pytest.approx(-1 + math.sqrt(1 + n), rel=1e-14)
    y = (n + math.sqrt(n * n - 2)) / 2
    res = alphahelp_bracket(n, 0.5)
    assert res.root == pytest.approx(y * y, rel=1e-14)
    assert res.bracket[0] <= res.root <= res.bracket[1]
    assert alphahelp_bracket(n, 1).root == n - 1


def test_bracket_n9_half():
    res = alphahelp_bracket(9, 0.5)
    assert 79 <= res.root <= 80 and res.root == pytest.approx(79.99, abs=0.01)
    with pytest.raises(DomainError):
        alphahelp_bracket(3, 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=4, max_value=10**6), st.floats(min_value=0.1, max_value=8.0))
def test_bracket_has_a_sign_change(n, a):
    res = alphahelp_bracket(n, a)
    assert res.h_lo <= 0 <= res.h_hi
