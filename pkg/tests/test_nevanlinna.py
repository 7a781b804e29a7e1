from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from momentgrowth.errors import DomainError, HypothesisError
from momentgrowth.nevanlinna import (
    abcd,
    abcd_sequence,
    berezanskii_bounds,
    decomposition_residual,
    indeterminacy,
    pq_norm,
    summability,
)
from momentgrowth.sequences import CoeffSpec

POWER2 = CoeffSpec.of("power", alpha=2)


def exact_pq(b, z: Fraction, n: int):
    """P_0..P_n and Q_0..Q_n at a rational point with a_k = 0."""
    P, Q = [Fraction(1)], [Fraction(0)]
    pm, qm = Fraction(0), Fraction(-1)
    for k in range(n):
        bm = 1 if k == 0 else b[k - 1]
        p = (z * P[-1] - bm * pm) / b[k]
        q = (z * Q[-1] - bm * qm) / b[k]
        pm, qm = P[-1], Q[-1]
        P.append(p)
        Q.append(q)
    return P, Q


def test_partials_match_exact_sums():
    b = [Fraction((k + 1) ** 2) for k in range(12)]
    z = Fraction(1, 2)
    Pz, Qz = exact_pq(b, z, 8)
    P0, Q0 = exact_pq(b, Fraction(0), 8)
    n = 8
    A = z * sum(Q0[k] * Qz[k] for k in range(n))
    B = -1 + z * sum(Q0[k] * Pz[k] for k in range(n))
    C = 1 + z * sum(P0[k] * Qz[k] for k in range(n))
    D = z * sum(P0[k] * Pz[k] for k in range(n))
    part = abcd(POWER2, 0.5, n)
    for got, want in zip((part.A, part.B, part.C, part.D), (A, B, C, D)):
        assert got.is_real()
        assert abs(got.re.to_fraction() - want) <= abs(want) * Fraction(1, 2**120) + Fraction(1, 2**200)
    assert A * D - B * C == 1


def test_unimodular_along_the_sequence():
    seq = abcd_sequence(CoeffSpec.of("q_hermite2", q="1/2"), complex(2, -1), 120)
    assert len(seq) == 121
    assert max(p.unimodularity_residual for p in seq) < 1e-25
    assert max(p.route_gap for p in seq) < 1e-25
    with pytest.raises(DomainError):
        abcd_sequence(POWER2, 1, -1)


def test_decomposition_of_p_and_q():
    for spec in (POWER2, CoeffSpec.of("q_inv_hermite", q="1/2"), CoeffSpec.of("geom_power", a=2, alpha=1)):
        r = decomposition_residual(spec, complex(0.5, 1), 80)
        assert r["P"] < 1e-25 and r["Q"] < 1e-25


def test_shifted_norm_identity():
    b0 = float(POWER2.b(0))
    for z in (1, 1j, complex(-2, 0.5)):
        lhs = pq_norm(POWER2.shifted(1), z, 199).P
        rhs = pq_norm(POWER2, z, 200).Q * b0
        assert float(abs(lhs - rhs) / rhs) < 1e-20


def test_indeterminacy_verdicts():
    assert indeterminacy(POWER2, 2000).verdict == "indeterminate_evidence"
    assert indeterminacy(CoeffSpec.of("geometric_q", q="1/2"), 200).verdict == "indeterminate_evidence"
    # b_n = n + 1 has a diverging Carleman sum
    det = indeterminacy(CoeffSpec.table(range(1, 20_002)), 400)
    assert det.verdict == "determinate_evidence"
    assert "Carleman sum diverging" in det.notes


def test_summability_of_power2():
    rep = summability(POWER2, 0.75, N=2000, check_depth=200)
    assert rep.verdict == "summable_evidence"
    assert rep.bound_ok
    # sum b_n^{-1/2} = sum 1/(n+1) diverges at alpha = 1/2
    low = summability(POWER2, 0.5, N=2000, check_depth=100)
    assert low.tails["inv_b"].trend == "diverging"
    with pytest.raises(DomainError):
        summability(POWER2, 1.5)


def test_berezanskii_needs_a_shape():
    rep = berezanskii_bounds(CoeffSpec.of("power", alpha=3), N=400)
    assert rep.ok and rep.shape == "log_concave"
    with pytest.raises(HypothesisError):
        # flat coefficients: neither log-convex nor log-concave in the strict sense
        berezanskii_bounds(CoeffSpec.table([1] * 400), N=300)


@settings(max_examples=25, deadline=None)
@given(st.floats(min_value=-4, max_value=4), st.floats(min_value=-4, max_value=4),
       st.integers(min_value=1, max_value=80))
def test_unimodularity_property(x, y, n):
    part = abcd(CoeffSpec.of("power", alpha=3), complex(x, y), n)
    assert part.unimodularity_residual < 1e-22
