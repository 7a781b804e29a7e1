from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentgrowth.entirefns import (
    NAMES,
    build,
    compare_growth,
    livsic_order_gap,
    newlif_chain,
    s2n_upper,
)
from momentgrowth.errors import HypothesisError, InsufficientDataError
from momentgrowth.sequences import CoeffSpec

POWER2 = CoeffSpec.of("power", alpha=2)


def test_closed_form_coefficients():
    n = np.arange(0, 41)
    H = build(POWER2, "H", 40).log_coeffs
    assert np.allclose(H, -2 * np.array([math.lgamma(k + 1) for k in n]), rtol=1e-13)
    G = build(POWER2, "G", 40).log_coeffs
    assert np.allclose(G, -2 * n * np.log(n + 1.0), rtol=1e-13)
    F = build(POWER2, "F", 10).log_coeffs
    assert F[4] == pytest.approx(-math.log(17))
    assert F[2] == pytest.approx(0.0, abs=1e-30)
    assert np.all(np.isneginf(F[1::2]))
    L = build(POWER2, "L", 10).log_coeffs
    assert L[2] == pytest.approx(-0.5 * math.log(17))


def test_all_names_build_positive_streams():
    for name in NAMES:
        fn = build(POWER2, name, 30)
        assert fn.positive(), name
        assert fn.log_maxmod(0.0) > 0
    with pytest.raises(InsufficientDataError):
        build(POWER2, "K", 10)


def test_gstar_shift_for_non_monotone_table():
    spec = CoeffSpec.table([5, 3, 4, 6, 8, 10, 12])
    fn = build(spec, "Gstar", 5)
    # b_n increases from n = 1 on
    assert fn.provenance == "1/b_n^(n-1)"


def test_newlif_small_case():
    one, mid, upper = newlif_chain(POWER2, 2)
    # s_4 b_22^2 = 17 / 16
    assert abs(mid.to_fraction() - Fraction(17, 16)) < Fraction(1, 2**120)
    assert one <= mid <= upper


def test_newlif_chain_property_small_depths():
    spec = CoeffSpec.of("q_inv_hermite", q="1/2")
    for n in range(0, 25):
        one, mid, upper = newlif_chain(spec, n)
        assert mid >= one * (1 - 1e-30) and upper >= mid * (1 - 1e-30)


def test_s2n_upper_for_power2():
    rep = s2n_upper(POWER2, 30)
    assert rep.A >= 1.0 and rep.C == 1.0
    assert rep.margin >= 0.0
    with pytest.raises(HypothesisError):
        s2n_upper(CoeffSpec.table([1] * 300), 20)


def test_livsic_ratio_for_power2():
    rep = livsic_order_gap(POWER2, 120)
    assert rep.gap < 0.1
    assert rep.tau_ratio == pytest.approx(2.0, rel=0.2)
    assert rep.moment_condition_flag


def test_comparison_table_for_power2():
    t = compare_growth(POWER2, 120)
    assert t.scale == "order" and t.hypotheses
    for key in ("F", "L", "H", "G", "E"):
        assert t.value(key) == pytest.approx(0.5, abs=0.05), key
    assert t.ordering_ok and t.chain_ok
    assert set(t.to_dict()["rows"]) >= {"Phi", "F", "L", "H", "G", "Pi", "E"}


def test_maxmod_ordering_of_l_h_phi():
    fns = {k: build(POWER2, k, 60) for k in ("L", "H", "Phi")}
    for lr in np.linspace(0, 12, 13):
        ml, mh, mp = (fns[k].log_maxmod(lr) for k in ("L", "H", "Phi"))
        assert ml <= mh + 1e-12 and mh <= mp + 1e-12


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["F", "L", "H", "G"]), st.floats(min_value=-3, max_value=30))
def test_maxmod_is_increasing_in_r(name, lr):
    fn = build(POWER2, name, 60)
    assert fn.log_maxmod(lr) <= fn.log_maxmod(lr + 0.5)
