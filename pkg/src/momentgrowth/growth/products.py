"""Canonical products ``prod (1 + r u_n)``, their counting functions and the
summability estimates that tie them to order functions.

A zero sequence is given either as positive values ``u_n`` (XReal or plain
numbers; the zeros are ``-1/u_n``) or as natural logs ``log_u`` in a float
array, which is the fast path for long sequences.  Radii are XReal or
anything :class:`XReal` accepts, including ``"log2:<t>"`` text.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DomainError
from ..sequences import (
    DIVERGENCE_THRESHOLD,
    CoeffSpec,
    SumTrend,
    _sum_trend,
    available_terms,
    log_b_array,
)
from ..xreal import DEFAULT_PREC, XReal, as_xreal, log1p_x, log_x
from .orderfn import OrderFunctionSpec

__all__ = [
    "CountingReport",
    "ProductLog",
    "canonical_product_log",
    "counting_sandwich",
    "log_product_float",
    "order_function_summability",
    "product_coeff_logs",
    "spec_zero_logs",
    "summability_vs_counting",
]


def _as_radius(r, prec: int = DEFAULT_PREC) -> XReal:
    if isinstance(r, XReal):
        return r
    if isinstance(r, str) and r.startswith("loglog:"):
        # natural-log based: r = exp(exp(t))
        t = XReal(r[7:].strip(), prec)
        return t.exp().exp()
    return XReal(r, prec)


def _log_r(r) -> float:
    r = _as_radius(r)
    if r.sign < 0:
        raise DomainError("radius must be >= 0")
    return -math.inf if r.is_zero() else r.ln_float()


def _logs_of(u) -> np.ndarray:
    """Float natural logs of a positive sequence (XReal entries stay exact in range)."""
    out = np.empty(len(u))
    for i, v in enumerate(u):
        if isinstance(v, XReal):
            if v.sign <= 0:
                raise DomainError("zero sequence must be positive")
            out[i] = v.ln_float()
        else:
            f = float(v)
            if f <= 0:
                raise DomainError("zero sequence must be positive")
            out[i] = math.log(f)
    return out


def _check_decaying(lu: np.ndarray) -> None:
    if lu.size < 4:
        return
    q = max(1, lu.size // 4)
    if not np.max(lu[-q:]) < np.max(lu[:q]):
        raise DomainError("zero sequence u_n is not decaying")


def spec_zero_logs(spec: CoeffSpec, N: int, *, start: int = 0, unit: bool = True) -> np.ndarray:
    """``log u`` for the product ``prod (1 + z/b_{k-1})``.

    With ``unit`` the factor for ``b_{-1} = 1`` leads; ``start`` skips the
    first ``start`` coefficients (worked examples index their products
    from ``n = 1``).
    """
    count = min(N, available_terms(spec))
    lb = log_b_array(spec, count)[start:]
    lu = -lb
    return np.concatenate(([0.0], lu)) if unit else lu


@dataclass(frozen=True)
class ProductLog:
    value: XReal
    terms: int
    tail_bound: float
    tail_estimate: float
    summable: SumTrend | None = None

    def __float__(self) -> float:
        return float(self.value)

    def to_dict(self) -> dict:
        return {
            "value": self.value.to_record(),
            "value_text": self.value.to_text(),
            "terms": self.terms,
            "tail_bound": self.tail_bound,
            "tail_estimate": self.tail_estimate,
            "summable": None if self.summable is None else self.summable.to_dict(),
        }


def _beyond_estimate(lu: np.ndarray, lr: float) -> float:
    """``r sum_{n > N} u_n`` for the unseen tail, from a geometric or power fit."""
    k = lu.size
    if k < 20 or not np.isfinite(lu[-1]):
        return 0.0
    step = lu[-1] - lu[-2]
    n = np.arange(k, dtype=float) + 1.0
    if step < -1e-3:
        # geometric-or-faster decay: bounded by the geometric series
        q = math.exp(step)
        return math.exp(lr + lu[-1]) * q / (1.0 - q)
    # power decay u_n ~ C n^{-s}
    lo = k // 2
    s = -float(np.polyfit(np.log(n[lo:]), lu[lo:], 1)[0])
    if s <= 1.0:
        return math.inf
    return math.exp(lr + lu[-1]) * n[-1] / (s - 1.0)


def canonical_product_log(u=None, r=1, *, log_u=None, prec: int = DEFAULT_PREC,
                          threshold: float = DIVERGENCE_THRESHOLD) -> ProductLog:
    """``log prod_n (1 + r u_n)`` as an XReal.

    With ``u`` the sum of ``log1p(r u_n)`` runs in extended arithmetic and
    stops once a term falls below ``10^{-2p/3}`` of the running sum; the
    unused supplied terms give ``tail_bound = r sum u_n`` (which bounds
    their contribution), and ``tail_estimate`` extrapolates past the end of
    the sequence.  With ``log_u`` the same sum runs in floats as
    ``sum softplus(log r + log u_n)``.
    """
    rr = _as_radius(r, prec)
    if rr.sign < 0:
        raise DomainError("radius must be >= 0")
    if (u is None) == (log_u is None):
        raise DomainError("give exactly one of u or log_u")
    lu = np.asarray(log_u, dtype=float) if log_u is not None else _logs_of(u)
    _check_decaying(lu)
    with np.errstate(over="ignore", under="ignore"):
        trend = _sum_trend(np.exp(lu), threshold) if lu.size >= 16 else None
    if rr.is_zero():
        return ProductLog(XReal(0, prec), 0, 0.0, 0.0, trend)
    lr = rr.ln_float()
    if log_u is not None:
        total = log_product_float(lu, lr)
        return ProductLog(XReal(total, prec), int(lu.size), 0.0, _beyond_estimate(lu, lr), trend)
    rel = XReal(10, prec) ** (-((2 * prec) // 3))
    acc = XReal(0, prec)
    used = 0
    for i, v in enumerate(u):
        x = rr * as_xreal(v, prec)
        t = log1p_x(x)
        acc = acc + t
        used = i + 1
        if not acc.is_zero() and t < acc * rel:
            break
    rest = lu[used:]
    if rest.size:
        with np.errstate(over="ignore", under="ignore"):
            tail = math.exp(lr) * math.fsum(np.exp(rest)) if lr < 700 else math.fsum(np.exp(lr + rest))
    else:
        tail = 0.0
    return ProductLog(acc, used, tail, _beyond_estimate(lu, lr), trend)


def log_product_float(log_u, log_r: float) -> float:
    """``sum log(1 + exp(log_r + log_u_n))`` with an exactly rounded float sum."""
    x = log_r + np.asarray(log_u, dtype=float)
    terms = np.logaddexp(0.0, x)
    return math.fsum(terms[terms > 0])


# ---------------------------------------------------------------------------
# counting functions


@dataclass(frozen=True)
class CountingReport:
    r: XReal
    n_r: int
    N_r: XReal
    Q_r: XReal
    logM: XReal
    sandwich_ok: bool

    def to_dict(self) -> dict:
        return {
            "r": self.r.to_record(),
            "r_text": self.r.to_text(),
            "n_r": self.n_r,
            "N_r": float(self.N_r),
            "Q_r": float(self.Q_r),
            "logM": float(self.logM),
            "sandwich_ok": self.sandwich_ok,
        }

    def csv_row(self) -> list[str]:
        log2_r = "-inf" if self.r.is_zero() else repr(self.r.log2abs())
        return [log2_r, repr(float(self.logM)), str(self.n_r), repr(float(self.N_r)), repr(float(self.Q_r))]


def _log_ratios(u, log_u, r) -> tuple[XReal, np.ndarray]:
    """``x_n = log(r u_n)`` with the product formed in extended arithmetic."""
    rr = _as_radius(r)
    if rr.sign <= 0:
        raise DomainError("counting functions need r > 0")
    if log_u is not None:
        return rr, rr.ln_float() + np.asarray(log_u, dtype=float)
    x = np.empty(len(u))
    for i, v in enumerate(u):
        x[i] = (rr * as_xreal(v, rr.prec)).ln_float()
    return rr, x


def counting_sandwich(u=None, r=1, *, log_u=None, tol: float = 1e-9) -> CountingReport:
    """``n(r)``, ``N(r)``, ``Q(r)`` and the canonical product at ``r``.

    With zeros ``|z_n| = 1/u_n``: ``N(r) = sum_{|z_n| <= r} log(r/|z_n|)`` and
    ``Q(r) = r int_r^inf n(t)/t^2 dt = n(r) + sum_{|z_n| > r} r/|z_n|``, the
    integral evaluated exactly on the step function.  ``sandwich_ok`` tests
    ``N(r) <= log Pi(r) <= N(r) + Q(r)`` with relative slack ``tol``.
    """
    if (u is None) == (log_u is None):
        raise DomainError("give exactly one of u or log_u")
    rr, x = _log_ratios(u, log_u, r)
    # a zero on the circle |z| = r counts; float logs can miss it by an ulp
    edge = 1e-12 * max(1.0, abs(rr.ln_float()))
    inside = x >= -edge
    n_r = int(inside.sum())
    N_r = math.fsum(x[inside])
    with np.errstate(under="ignore"):
        Q_r = n_r + math.fsum(np.exp(x[~inside]))
    logM = math.fsum(np.logaddexp(0.0, x))
    slack = tol * max(1.0, abs(logM))
    ok = (N_r <= logM + slack) and (logM <= N_r + Q_r + slack)
    return CountingReport(rr, n_r, XReal(N_r), XReal(Q_r), XReal(logM), ok)


# ---------------------------------------------------------------------------
# order functions versus counting


@dataclass(frozen=True)
class SummabilityCountingReport:
    afs: str
    beta_sum: SumTrend
    beta_eps_sum: SumTrend
    epsilon: float
    C: float
    rows: tuple[dict, ...]
    power_bound: tuple[dict, ...] = field(default=())

    @property
    def counting_bound_ok(self) -> bool:
        return all(row["counting_bound_ok"] for row in self.rows)

    @property
    def power_bound_ok(self) -> bool:
        return all(row["ok"] for row in self.power_bound)

    @property
    def max_count_ratio(self) -> float:
        return max(row["N_over_alpha"] for row in self.rows) if self.rows else math.nan

    def to_dict(self) -> dict:
        return {
            "afs": self.afs,
            "beta_sum": self.beta_sum.to_dict(),
            "beta_eps_sum": self.beta_eps_sum.to_dict(),
            "epsilon": self.epsilon,
            "C": self.C,
            "rows": list(self.rows),
            "counting_bound_ok": self.counting_bound_ok,
            "power_bound": list(self.power_bound),
            "power_bound_ok": self.power_bound_ok,
        }


def summability_vs_counting(afs: OrderFunctionSpec, u=None, r_grid=(), *, log_u=None,
                            epsilon: float = 0.1,
                            threshold: float = DIVERGENCE_THRESHOLD) -> SummabilityCountingReport:
    """Compare ``sum beta(u_n)`` with the counting function ``N_r = #{u_n >= 1/r}``.

    For each radius (all must exceed ``r0``) the report holds ``N_r/alpha(r)``,
    the bound ``N_r (log r + C) + alpha(r) sum_{u_n < 1/r0} beta(u_n)`` with
    ``C = max log(2 u_n)`` against the actual ``log prod (1 + r u_n)``; the
    bound holds termwise, so truncated sequences satisfy it too.  When
    ``afs`` is a power ``r^a`` the product is also checked against
    ``exp(K r^a / a)`` with ``K = sum u_n^a``.
    """
    if (u is None) == (log_u is None):
        raise DomainError("give exactly one of u or log_u")
    lu = np.asarray(log_u, dtype=float) if log_u is not None else _logs_of(u)
    lr0 = afs.log_r0
    tail = lu < -lr0 if math.isfinite(lr0) else np.ones(lu.shape, dtype=bool)
    lb = np.array([afs.log_beta_log(x) if t else -math.inf for x, t in zip(lu, tail)])
    with np.errstate(under="ignore"):
        bterms = np.exp(lb[tail])
        beps = np.exp((1.0 + epsilon) * lb[tail])
    bsum = _sum_trend(bterms, threshold)
    besum = _sum_trend(beps, threshold)
    B = math.fsum(bterms)
    C = float(np.max(lu)) + math.log(2.0)
    rows = []
    for r in r_grid:
        L = _log_r(r)
        la = afs.log_alpha(L) if L > lr0 else math.nan
        if not L > lr0:
            raise DomainError(f"radius with log r = {L:g} is not above r0 for {afs.label()}")
        x = L + lu
        n_r = int((x >= 0).sum())
        actual = math.fsum(np.logaddexp(0.0, x))
        alpha_r = math.exp(la)
        bound = n_r * (L + C) + alpha_r * B
        rows.append({
            "log_r": L,
            "N_r": n_r,
            "alpha_r": alpha_r,
            "N_over_alpha": n_r / alpha_r,
            "logPi": actual,
            "counting_bound": bound,
            "counting_bound_ok": actual <= bound * (1 + 1e-12) + 1e-12,
        })
    prop = []
    if afs.kind == "power":
        a = dict(afs.params)["alpha"]
        with np.errstate(under="ignore"):
            K = math.fsum(np.exp(a * lu))
        for r in r_grid:
            L = _log_r(r)
            actual = math.fsum(np.logaddexp(0.0, L + lu))
            bound = K * math.exp(a * L) / a
            prop.append({"log_r": L, "K": K, "logPi": actual, "bound": bound,
                         "ok": actual <= bound * (1 + 1e-12)})
    return SummabilityCountingReport(afs.label(), bsum, besum, epsilon, C, tuple(rows), tuple(prop))


@dataclass(frozen=True)
class OrderSummabilityReport:
    afs: str
    regime: str
    square_ratio: float
    tails: dict
    normalized_sup: dict
    bounded: dict
    decay_slopes: dict

    def to_dict(self) -> dict:
        return {
            "afs": self.afs,
            "regime": self.regime,
            "square_ratio": self.square_ratio,
            "tails": {k: v.to_dict() for k, v in self.tails.items()},
            "normalized_sup": dict(self.normalized_sup),
            "bounded": dict(self.bounded),
            "decay_slopes": dict(self.decay_slopes),
        }


def _normalized(lbeta: np.ndarray, regime: str) -> tuple[np.ndarray, np.ndarray]:
    """``log(beta_n / rate_n)`` on finite entries, rate ``1/n`` or ``log n / n``."""
    n = np.arange(lbeta.size, dtype=float)
    keep = np.isfinite(lbeta) & (n >= 2)
    n = n[keep]
    rate = -np.log(n) + (np.log(np.log(n)) if regime == "i" else 0.0)
    return n, lbeta[keep] - rate


def order_function_summability(spec: CoeffSpec, afs: OrderFunctionSpec, N: int = 2000,
                               prec: int = DEFAULT_PREC,
                               threshold: float = DIVERGENCE_THRESHOLD) -> OrderSummabilityReport:
    """``beta(1/b_n)``, ``beta(P_n(0)^2)``, ``beta(Q_n(0)^2)``: tails and decay rate.

    The regime is (ii) (rate ``1/n``) when ``alpha(r^2)/alpha(r)`` stays
    bounded on a grid, else (i) (rate ``log n / n``).  ``bounded`` says the
    normalized sequence does not grow between the two halves of the window.
    """
    from ..polys import eval_pq

    N = min(N, available_terms(spec) - 1)
    sq_bounded, sq_ratio = afs.squares_bounded()
    regime = "ii" if sq_bounded else "i"
    at0 = eval_pq(spec, 0, N, prec)
    logs = {
        "inv_b": -log_b_array(spec, N + 1),
        "P0_sq": np.array([2 * v.re.ln_float() if not v.is_zero() else -math.inf for v in at0.P]),
        "Q0_sq": np.array([2 * v.re.ln_float() if not v.is_zero() else -math.inf for v in at0.Q]),
    }
    lr0 = afs.log_r0
    tails, sups, bounded, slopes = {}, {}, {}, {}
    for key, lv in logs.items():
        ok = np.isfinite(lv) & ((lv < -lr0) if math.isfinite(lr0) else True)
        lbeta = np.full(lv.shape, -math.inf)
        lbeta[ok] = [afs.log_beta_log(x) for x in lv[ok]]
        with np.errstate(under="ignore"):
            tails[key] = _sum_trend(np.exp(lbeta), threshold)
        n, norm = _normalized(lbeta, regime)
        if norm.size < 8:
            sups[key], bounded[key], slopes[key] = math.nan, False, math.nan
            continue
        half = norm.size // 2
        first, second = float(np.max(norm[:half])), float(np.max(norm[half:]))
        sups[key] = math.exp(max(first, second))
        bounded[key] = second <= first + math.log(1.05)
        m = n[half:]
        slopes[key] = float(np.polyfit(np.log(m), lbeta[np.isfinite(lbeta) & (np.arange(lbeta.size) >= 2)][half:], 1)[0])
    return OrderSummabilityReport(afs.label(), regime, sq_ratio, tails, sups, bounded, slopes)


# ---------------------------------------------------------------------------
# coefficients of a canonical product


def product_coeff_logs(log_u, K: int) -> np.ndarray:
    """``log e_k`` for ``k <= K``: the Taylor coefficients of ``prod (1 + u_n z)``.

    Runs the elementary-symmetric recurrence ``e_k <- e_k + u_n e_{k-1}`` in
    the log domain over the supplied factors.
    """
    lu = np.asarray(log_u, dtype=float)
    le = np.full(K + 1, -math.inf)
    le[0] = 0.0
    for x in lu:
        if not math.isfinite(x):
            continue
        shifted = np.empty_like(le)
        shifted[0] = -math.inf
        shifted[1:] = le[:-1] + x
        le = np.logaddexp(le, shifted)
    return le
