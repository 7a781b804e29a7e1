"""Nevanlinna partials A_n..D_n, the norm functions P(z), Q(z) and the
summability / Berezanskii checks built on them.

Partials come from two independent routes: the defining partial sums

    A_n = z sum_{k<n} Q_k(0) Q_k(z)        B_n = -1 + z sum_{k<n} Q_k(0) P_k(z)
    C_n = 1 + z sum_{k<n} P_k(0) Q_k(z)    D_n = z sum_{k<n} P_k(0) P_k(z)

and the ordered product of the unimodular factors
``I + z [[-P_k Q_k, Q_k^2], [-P_k^2, P_k Q_k]](0)`` applied to
``[[0, -1], [1, 0]]``.  Every evaluation runs both and compares them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from mpmath import libmp as _L

from .errors import DomainError, HypothesisError, InternalConsistencyError
from .polys import eval_pq
from .sequences import (
    DIVERGENCE_THRESHOLD,
    CoeffSpec,
    SumTrend,
    _sum_trend,
    available_terms,
    classify_shape,
    condition_sums,
    log_b_array,
)
from .xreal import DEFAULT_PREC, XComplex, XReal

__all__ = [
    "BerezanskiiReport",
    "IndeterminacyVerdict",
    "NevanlinnaPartial",
    "PQNorm",
    "SummabilityReport",
    "abcd",
    "abcd_sequence",
    "berezanskii_bounds",
    "decomposition_residual",
    "indeterminacy",
    "pq_norm",
    "summability",
]

_RND = "n"
_GUARD = 32
_ZERO = (_L.fzero, _L.fzero)
_ONE = (_L.fone, _L.fzero)


def agreement_tol(prec: int) -> float:
    """Relative tolerance for the two ABCD routes: ``10^-(0.3 p - 6)``."""
    return 10.0 ** (-(0.3 * prec - 6))


@dataclass(frozen=True)
class NevanlinnaPartial:
    z: XComplex
    n: int
    A: XComplex
    B: XComplex
    C: XComplex
    D: XComplex
    unimodularity_residual: float
    route_gap: float = 0.0

    def to_dict(self) -> dict:
        return {
            "z": self.z.to_record(),
            "n": self.n,
            **{k: getattr(self, k).to_record() for k in "ABCD"},
            "unimodularity_residual": self.unimodularity_residual,
            "route_gap": self.route_gap,
        }


def _fabs_log(v) -> float:
    # natural log of |v| for a raw complex, -inf at zero
    d = _L.mpc_abs(v, 53)
    if d == _L.fzero:
        return -math.inf
    return XReal._wrap(d, 53).ln_float()


def _rel_gap(x, y, scale_log: float, wp: int) -> float:
    lg = _fabs_log(_L.mpc_sub(x, y, wp))
    if lg == -math.inf:
        return 0.0
    return math.exp(min(lg - scale_log, 700.0))


def abcd_sequence(spec: CoeffSpec, z, N: int, prec: int = DEFAULT_PREC) -> list[NevanlinnaPartial]:
    """Partials for ``n = 0..N`` by both routes.

    Raises :class:`InternalConsistencyError` when the routes differ by more
    than :func:`agreement_tol` relative to the largest entry.
    """
    if N < 0:
        raise DomainError("depth must be >= 0")
    wp = prec + _GUARD
    z = XComplex.coerce(z, prec)
    zr = tuple(_L.mpf_pos(c, wp, _RND) for c in z._z)
    depth = max(N, 1)
    at0 = eval_pq(spec, 0, depth, wp)
    atz = eval_pq(spec, XComplex._wrap(zr, wp), depth, wp)
    p0 = [v._z[0] for v in at0.P]
    q0 = [v._z[0] for v in at0.Q]
    Pz = [v._z for v in atz.P]
    Qz = [v._z for v in atz.Q]
    tol = agreement_tol(prec)

    sA, sB, sC, sD = _ZERO, _ZERO, _ZERO, _ZERO
    m = [[_ZERO, (_L.fnone, _L.fzero)], [_ONE, _ZERO]]
    out = []
    mul = _L.mpc_mul
    add = _L.mpc_add
    for n in range(N + 1):
        A = mul(zr, sA, wp)
        B = add((_L.fnone, _L.fzero), mul(zr, sB, wp), wp)
        C = add(_ONE, mul(zr, sC, wp), wp)
        D = mul(zr, sD, wp)
        scale = max(_fabs_log(v) for v in (A, B, C, D))
        gap = max(_rel_gap(x, y, scale, wp) for x, y in zip((A, B, C, D), (m[0][0], m[0][1], m[1][0], m[1][1])))
        if gap > tol:
            raise InternalConsistencyError(
                f"ABCD routes differ by {gap:.3e} (tolerance {tol:.1e}) at n={n} for {spec.label()}"
            )
        det = _L.mpc_sub(mul(A, D, wp), mul(B, C, wp), wp)
        resid = math.exp(_fabs_log(_L.mpc_sub(det, _ONE, wp))) if det != _ONE else 0.0
        w = lambda v: XComplex._wrap(tuple(_L.mpf_pos(c, prec, _RND) for c in v), prec)
        out.append(NevanlinnaPartial(z, n, w(A), w(B), w(C), w(D), resid, gap))
        if n == N:
            break
        # direct sums
        sA = add(sA, _L.mpc_mul_mpf(Qz[n], q0[n], wp), wp)
        sB = add(sB, _L.mpc_mul_mpf(Pz[n], q0[n], wp), wp)
        sC = add(sC, _L.mpc_mul_mpf(Qz[n], p0[n], wp), wp)
        sD = add(sD, _L.mpc_mul_mpf(Pz[n], p0[n], wp), wp)
        # transfer factor T = I + z [[-pq, q^2], [-p^2, pq]]
        pq = _L.mpf_mul(p0[n], q0[n], wp)
        t00 = add(_ONE, _L.mpc_mul_mpf(zr, _L.mpf_neg(pq), wp), wp)
        t01 = _L.mpc_mul_mpf(zr, _L.mpf_mul(q0[n], q0[n], wp), wp)
        t10 = _L.mpc_mul_mpf(zr, _L.mpf_neg(_L.mpf_mul(p0[n], p0[n], wp)), wp)
        t11 = add(_ONE, _L.mpc_mul_mpf(zr, pq, wp), wp)
        m = [
            [add(mul(t00, m[0][0], wp), mul(t01, m[1][0], wp), wp),
             add(mul(t00, m[0][1], wp), mul(t01, m[1][1], wp), wp)],
            [add(mul(t10, m[0][0], wp), mul(t11, m[1][0], wp), wp),
             add(mul(t10, m[0][1], wp), mul(t11, m[1][1], wp), wp)],
        ]
    return out


def abcd(spec: CoeffSpec, z, N: int, prec: int = DEFAULT_PREC) -> NevanlinnaPartial:
    return abcd_sequence(spec, z, N, prec)[-1]


def decomposition_residual(spec: CoeffSpec, z, N: int, prec: int = DEFAULT_PREC) -> dict:
    """Max relative residuals of ``P_n = -P_n(0) B_n + Q_n(0) D_n`` and
    ``Q_n = -P_n(0) A_n + Q_n(0) C_n`` over ``n <= N``.

    Residuals are scaled by the largest of ``|P_n|``, ``|P_{n-1}|`` and the
    two summands (likewise for ``Q``).
    """
    seq = abcd_sequence(spec, z, N, prec)
    at0 = eval_pq(spec, 0, max(N, 1), prec)
    atz = eval_pq(spec, z, max(N, 1), prec)
    worst_p = worst_q = 0.0
    for n in range(N + 1):
        p0, q0 = at0.P[n].re, at0.Q[n].re
        part = seq[n]
        lhs_p = atz.P[n]
        lhs_q = atz.Q[n]
        terms_p = (part.B * (-p0), part.D * q0)
        terms_q = (part.A * (-p0), part.C * q0)
        prev_p = atz.P[n - 1] if n else lhs_p
        prev_q = atz.Q[n - 1] if n else lhs_q
        for lhs, prev, terms, key in ((lhs_p, prev_p, terms_p, "P"), (lhs_q, prev_q, terms_q, "Q")):
            rhs = terms[0] + terms[1]
            # rounding in P_n is relative to its recurrence inputs, so an exact
            # zero of P_n is scaled by P_{n-1} and the summands
            den = max(float(abs(lhs)), float(abs(prev)), float(abs(terms[0])), float(abs(terms[1])))
            r = float(abs(lhs - rhs)) / den if den > 0 else 0.0
            if key == "P":
                worst_p = max(worst_p, r)
            else:
                worst_q = max(worst_q, r)
    return {"P": worst_p, "Q": worst_q, "n": N}


# ---------------------------------------------------------------------------
# norms and the indeterminacy verdict


@dataclass(frozen=True)
class PQNorm:
    z: XComplex
    N: int
    P: XReal
    Q: XReal
    P_trend: SumTrend
    Q_trend: SumTrend
    P_partials: tuple[XReal, ...] = field(default=(), repr=False)
    Q_partials: tuple[XReal, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "z": self.z.to_record(),
            "N": self.N,
            "P": self.P.to_record(),
            "Q": self.Q.to_record(),
            "P_float": float(self.P),
            "Q_float": float(self.Q),
            "P_trend": self.P_trend.to_dict(),
            "Q_trend": self.Q_trend.to_dict(),
        }


def _running(values: list[XReal]) -> list[XReal]:
    out, acc = [], XReal(0, values[0].prec if values else DEFAULT_PREC)
    for v in values:
        acc = acc + v
        out.append(acc)
    return out


def _float_terms(values: list[XReal]) -> np.ndarray:
    return np.array([float(v) for v in values], dtype=float)


def pq_norm(spec: CoeffSpec, z, N: int, prec: int = DEFAULT_PREC,
            threshold: float = DIVERGENCE_THRESHOLD) -> PQNorm:
    """Square roots of ``sum_{n<=N} |P_n(z)|^2`` and ``sum_{n<=N} |Q_n(z)|^2``."""
    pair = eval_pq(spec, z, N, prec)
    p2 = [v.abs2() for v in pair.P]
    q2 = [v.abs2() for v in pair.Q]
    sp, sq = _running(p2), _running(q2)
    tp = _sum_trend(_float_terms(p2), threshold)
    tq = _sum_trend(_float_terms(q2), threshold)
    return PQNorm(pair.z, N, sp[-1].sqrt(), sq[-1].sqrt(), tp, tq, tuple(sp), tuple(sq))


@dataclass(frozen=True)
class IndeterminacyVerdict:
    verdict: str
    criterion_partial: SumTrend
    carleman: SumTrend
    N: int
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "N": self.N,
            "criterion": self.criterion_partial.to_dict(),
            "carleman": self.carleman.to_dict(),
            "notes": list(self.notes),
        }


def indeterminacy(spec: CoeffSpec, N: int = 1000, prec: int = DEFAULT_PREC,
                  threshold: float = DIVERGENCE_THRESHOLD) -> IndeterminacyVerdict:
    """Evidence about determinacy from ``sum (P_n(0)^2 + Q_n(0)^2)``.

    A diverging Carleman sum settles determinacy outright; otherwise the
    verdict follows the trend of the criterion sum.  Verdicts are evidence
    from finitely many terms, never proofs.
    """
    N = min(N, available_terms(spec) - 1)
    pair = eval_pq(spec, 0, N, prec)
    terms = np.array([float(p.re * p.re + q.re * q.re) for p, q in zip(pair.P, pair.Q)])
    crit = _sum_trend(terms, threshold)
    carleman, _ = condition_sums(spec, max(N, 10_000), threshold)
    notes = []
    if carleman.trend == "diverging":
        verdict = "determinate_evidence"
        notes.append("Carleman sum diverging")
    elif crit.trend == "converging":
        verdict = "indeterminate_evidence"
    elif crit.trend == "diverging":
        verdict = "determinate_evidence"
        notes.append("criterion sum diverging")
    else:
        verdict = "inconclusive"
    return IndeterminacyVerdict(verdict, crit, carleman, N, tuple(notes))


# ---------------------------------------------------------------------------
# l^alpha summability


@dataclass(frozen=True)
class SummabilityReport:
    alpha: float
    z: XComplex
    N: int
    tails: dict
    C_const: float
    K_const: float
    K_partials: tuple[float, ...]
    verdict: str
    bound_checks: tuple[tuple[float, float, float, bool], ...] = ()

    @property
    def bound_ok(self) -> bool:
        return all(c[3] for c in self.bound_checks)

    def to_dict(self) -> dict:
        return {
            "alpha": self.alpha,
            "z": self.z.to_record(),
            "N": self.N,
            "tails": {k: v.to_dict() for k, v in self.tails.items()},
            "C_const": self.C_const,
            "K_const": self.K_const,
            "verdict": self.verdict,
            "bound_checks": [
                {"r": r, "log_P": lp, "log_bound": lb, "ok": ok} for r, lp, lb, ok in self.bound_checks
            ],
            "bound_ok": self.bound_ok,
        }


def _pow_terms(logs: np.ndarray, power: float) -> np.ndarray:
    with np.errstate(over="ignore", under="ignore"):
        return np.exp(power * logs)


def summability(spec: CoeffSpec, alpha: float, z=1, N: int = 4000, *,
                radii=(0.5, 1.0, 2.0, 5.0), angles: int = 8, check_depth: int = 600,
                prec: int = DEFAULT_PREC,
                threshold: float = DIVERGENCE_THRESHOLD) -> SummabilityReport:
    """Trends of ``sum |P_n(z)|^{2a}``, ``sum |Q_n(z)|^{2a}``, ``sum b_n^{-a}``
    and the bound ``P(w) <= C exp(K |w|^a)`` on circles ``|w| = r``.

    ``C = (sum P_n(0)^2 + Q_n(0)^2)^{1/2}`` and
    ``K = (1/a) sum (|P_n(0)|^{2a} + |Q_n(0)|^{2a})``, both over ``n <= N``.
    The bound holds termwise for truncations and both constants only grow
    with ``N``, so the circle checks use depth ``min(N, check_depth)``
    against the constants at depth ``N``.
    """
    alpha = float(alpha)
    if not (0 < alpha <= 1):
        raise DomainError("summability exponent must lie in (0, 1]")
    N = min(N, available_terms(spec) - 1)
    atz = eval_pq(spec, z, N, prec)
    at0 = eval_pq(spec, 0, N, prec)
    lp = np.array([_fabs_log(v._z) for v in atz.P])
    lq = np.array([_fabs_log(v._z) for v in atz.Q])
    lb = log_b_array(spec, N + 1)
    tails = {
        "P": _sum_trend(_pow_terms(lp, 2 * alpha), threshold),
        "Q": _sum_trend(_pow_terms(lq, 2 * alpha), threshold),
        "inv_b": _sum_trend(_pow_terms(-lb, alpha), threshold),
    }
    p0 = np.array([abs(float(v.re)) for v in at0.P])
    q0 = np.array([abs(float(v.re)) for v in at0.Q])
    C = math.sqrt(math.fsum(p0**2 + q0**2))
    kterms = (p0 ** (2 * alpha) + q0 ** (2 * alpha)) / alpha
    kpart = np.cumsum(kterms)
    K = float(kpart[-1])
    trends = [t.trend for t in tails.values()]
    if all(t == "converging" for t in trends):
        verdict = "summable_evidence"
    elif any(t == "diverging" for t in trends):
        verdict = "not_summable_evidence"
    else:
        verdict = "inconclusive"
    checks = []
    for r in radii:
        worst = -math.inf
        for j in range(angles):
            th = 2 * math.pi * j / angles
            w = complex(r * math.cos(th), r * math.sin(th))
            pair = eval_pq(spec, w, min(N, check_depth), prec, guard=False)
            s = XReal(0, prec)
            for v in pair.P:
                s = s + v.abs2()
            worst = max(worst, 0.5 * s.ln_float())
        bound = math.log(C) + K * r**alpha
        checks.append((float(r), worst, bound, worst <= bound + 1e-12))
    return SummabilityReport(alpha, XComplex.coerce(z, prec), N, tails, C, K,
                             tuple(float(x) for x in kpart[:: max(1, len(kpart) // 64)]),
                             verdict, tuple(checks))


# ---------------------------------------------------------------------------
# Berezanskii bounds


@dataclass(frozen=True)
class BerezanskiiReport:
    z: XComplex
    N: int
    shape: str
    log_pi: float
    c_fit: float
    Kz_fit: float
    K_fit: float
    L_fit: float
    L0_fit: float
    tends_to_zero: dict
    notes: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        finite = all(math.isfinite(v) for v in (self.c_fit, self.L_fit, self.L0_fit))
        positive = self.Kz_fit > 0 and self.K_fit > 0
        return finite and positive

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("N", "shape", "log_pi", "c_fit", "Kz_fit", "K_fit", "L_fit", "L0_fit")}
        d["z"] = self.z.to_record()
        d["tends_to_zero"] = dict(self.tends_to_zero)
        d["ok"] = self.ok
        d["notes"] = list(self.notes)
        return d


def _exp(x: float) -> float:
    return math.inf if x > 709.0 else math.exp(x)


def _decreasing_to_zero(logs: np.ndarray) -> bool:
    """Max over ``(N/2, N]`` is below the max over ``(N/10, N/2]`` (log values)."""
    vals = logs
    n = vals.size
    early = vals[n // 10: n // 2]
    late = vals[n // 2:]
    if early.size == 0 or late.size == 0:
        return False
    return float(np.max(late)) < float(np.max(early))


def log_canonical_product(spec: CoeffSpec, r: float, terms: int = 200_000) -> float:
    """``log prod_{k>=0} (1 + r/b_{k-1})`` with ``b_{-1} = 1``, float route.

    The tail past ``terms`` is bounded by ``r sum_{k>terms} 1/b_k`` which is
    estimated from a geometric or power fit of the last terms.
    """
    count = min(terms, available_terms(spec))
    lb = log_b_array(spec, count)
    x = math.log(r) - lb if r > 0 else np.full(lb.shape, -math.inf)
    total = math.fsum(np.logaddexp(0.0, x)) + math.log1p(r)
    return total


def berezanskii_bounds(spec: CoeffSpec, z=complex(1, 1), N: int = 2000,
                       prec: int = DEFAULT_PREC) -> BerezanskiiReport:
    """Fitted constants of the two-sided Berezanskii estimates over ``n <= N``.

    ``c = sup sqrt(b_{n-1}) |P_n(z)| / Pi(|z|)``,
    ``K_z = inf sqrt(b_{n+1}) max(|P_n(z)|, |P_{n+1}(z)|)``,
    ``K = inf b_{n+1} (|P_n|^2 + |P_{n+1}|^2)`` and ``L = sup b_{n-1} (...)``,
    with ``L0`` the same supremum at ``z = 0`` for both ``P`` and ``Q``.
    These are extrema over the computed window, not extrapolations.
    """
    shape = classify_shape(spec)
    if shape.tail_shape not in ("log_convex", "log_concave"):
        raise HypothesisError(f"{spec.label()} is {shape.tail_shape}; Berezanskii bounds need log-convex or log-concave b_n")
    if shape.berezanskii_partial.trend != "converging":
        raise HypothesisError(f"Berezanskii sum for {spec.label()} is {shape.berezanskii_partial.trend}")
    N = min(N, available_terms(spec) - 2)
    z = XComplex.coerce(z, prec)
    pair = eval_pq(spec, z, N + 1, prec)
    at0 = eval_pq(spec, 0, N + 1, prec)
    lb = log_b_array(spec, N + 2)
    lbm = np.concatenate(([0.0], lb[:-1]))  # log b_{n-1}
    lp = np.array([_fabs_log(v._z) for v in pair.P])
    rz = float(abs(z))
    log_pi = log_canonical_product(spec, rz)
    n = np.arange(N + 1)
    c_fit = float(np.max(0.5 * lbm[n] + lp[n])) - log_pi
    mx = np.maximum(lp[n], lp[n + 1])
    Kz = float(np.min(0.5 * lb[n + 1] + mx))
    s2 = np.logaddexp(2 * lp[n], 2 * lp[n + 1])
    K = float(np.min(lb[n + 1] + s2))
    L = float(np.max(lbm[n] + s2))
    lp0 = np.array([_fabs_log(v._z) for v in at0.P])
    lq0 = np.array([_fabs_log(v._z) for v in at0.Q])
    L0 = float(max(np.max(2 * lp0[n] + lbm[n]), np.max(2 * lq0[n] + lbm[n])))
    nn = np.log(n[1:].astype(float))
    tz = {
        "n_over_b": _decreasing_to_zero(nn - lb[1:N + 1]),
        "n_P0_sq": _decreasing_to_zero(nn + 2 * lp0[1:N + 1]),
        "n_Q0_sq": _decreasing_to_zero(nn + 2 * lq0[1:N + 1]),
    }
    return BerezanskiiReport(
        z=z,
        N=N,
        shape=shape.tail_shape,
        log_pi=log_pi,
        c_fit=_exp(c_fit),
        Kz_fit=_exp(Kz),
        K_fit=_exp(K),
        L_fit=_exp(L),
        L0_fit=_exp(L0),
        tends_to_zero=tz,
    )
