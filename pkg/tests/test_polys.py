from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentgrowth.checks import path_moment
from momentgrowth.polys import coeff_triangle, eval_pq, kernel_trace, moments
from momentgrowth.sequences import CoeffSpec

POWER2 = CoeffSpec.of("power", alpha=2)
QIH = CoeffSpec.of("q_inv_hermite", q="1/2")

# s_0..s_10 from exact powers of the truncated tridiagonal matrix
# (similarity form with b_k^2 above the diagonal and 1 below), frozen
POWER2_MOMENTS = [1, 0, 1, 0, 17, 0, 1585, 0, 485729, 0, 372281761]
QIH_MOMENTS = [Fraction(x) for x in
               ("1", "0", "1/4", "0", "1/4", "0", "37/64", "0", "347/128", "0", "12665/512")]


def rel(x: Fraction, y: Fraction) -> float:
    return float(abs(x - y) / abs(y))


def test_hand_values_of_p_and_q():
    pair = eval_pq(POWER2, 0, 3)
    assert pair.P[2].re.to_fraction() == Fraction(-1, 4)
    at1 = eval_pq(POWER2, 1, 3)
    assert rel(at1.P[3].re.to_fraction(), Fraction(-4, 9)) < 2.0**-120
    assert at1.Q[1].re == 1 and at1.Q[2].re.to_fraction() == Fraction(1, 4)
    assert at1.wronskian_drift < 1e-30


def test_eval_rejects_empty_depth():
    with pytest.raises(ValueError):
        eval_pq(POWER2, 1, 0)


def test_csv_rows_have_header():
    rows = eval_pq(POWER2, complex(1, 1), 4).csv_rows()
    assert rows[0] == ["n", "P_re", "P_im", "Q_re", "Q_im"]
    assert len(rows) == 6


def test_moments_match_frozen_matrix_powers():
    got = moments(POWER2, 10).s
    assert [int(x) for x in got] == POWER2_MOMENTS
    assert all(x.to_fraction() == y for x, y in zip(got, POWER2_MOMENTS))
    q = moments(QIH, 10).s
    assert [x.to_fraction() for x in q] == QIH_MOMENTS


def test_moments_match_path_enumeration():
    for m in range(0, 9):
        assert path_moment(POWER2, m) == POWER2_MOMENTS[m]
        assert path_moment(QIH, m) == QIH_MOMENTS[m]


def test_even_roots_increase():
    assert moments(POWER2, 40).even_root_monotone()


def test_triangle_diagonal_and_column_norms():
    t = coeff_triangle(POWER2, 30, 10)
    assert rel(t.entry(3, 3).to_fraction(), Fraction(1, 36)) < 2.0**-120
    assert t.entry(0, 2).to_fraction() == Fraction(-1, 4)
    # the diagonal is 1/(b_0 ... b_{n-1})
    prod = Fraction(1)
    for n in range(1, 8):
        prod *= n**2
        assert rel(t.entry(n, n).to_fraction(), 1 / prod) < 2.0**-118
    assert all(t.c_truncated[k] <= t.c[k] for k in range(11))
    # P_n has the parity of n
    assert all(t.entry(k, n).is_zero() for n in range(11) for k in range(n + 1) if (n - k) % 2)


def test_kernel_trace_parseval():
    rep = kernel_trace(POWER2, 30)
    assert rep.parseval_residual < 1e-25
    assert all(r < 1e-20 for r in rep.residuals)
    assert float(rep.rho0) > 1.0


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=-5, max_value=5), st.floats(min_value=-5, max_value=5),
       st.integers(min_value=2, max_value=60))
def test_wronskian_identity_holds(x, y, n):
    pair = eval_pq(POWER2, complex(x, y), n)
    assert pair.wronskian_drift < 1e-25


@settings(max_examples=20, deadline=None)
@given(st.fractions(min_value=-3, max_value=3, max_denominator=50))
def test_real_points_stay_real(x):
    pair = eval_pq(QIH, x, 12)
    assert all(p.is_real() for p in pair.P)
    assert all(q.is_real() for q in pair.Q)
