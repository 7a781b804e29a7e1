"""Companion entire functions of a moment problem and their growth comparison.

All series have nonnegative coefficients, so ``M_f(r) = f(r)`` and the
maximum modulus is a log-sum-exp of ``log a_n + n log r``.  Coefficients
are held as float natural logs (``-inf`` for zero), which covers every
family here without overflow.

====== =======================================
name   coefficient of ``z^m``
====== =======================================
Phi    ``c_k`` at ``m = k``
Psi    ``c_k^2`` at ``m = 2k``
F      ``1/s_{2n}`` at ``m = 2n``
L      ``1/sqrt(s_{2n})`` at ``m = n``
H      ``b_{n,n} = 1/(b_0 ... b_{n-1})`` at ``m = n``
G      ``1/b_n^n`` at ``m = n``
Gstar  ``1/b_n^{n - n1}`` at ``m = n``
====== =======================================
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import HypothesisError, InsufficientDataError, InvariantViolation
from .growth.estimate import GrowthReport, scale_from_coeffs, scale_from_maxmod, type_from_coeffs
from .growth.products import log_product_float, spec_zero_logs
from .polys import CoeffTriangle, MomentTable, coeff_triangle, moments
from .sequences import (
    CoeffSpec,
    available_terms,
    classify_shape,
    log_abs_a_array,
    log_b_array,
    spec_convergence_exponent,
)
from .xreal import DEFAULT_PREC, XReal

__all__ = [
    "NAMES",
    "ComparisonTable",
    "SeriesFn",
    "build",
    "compare_growth",
    "livsic_order_gap",
    "newlif_chain",
    "s2n_upper",
]

NAMES = ("Phi", "Psi", "F", "L", "H", "G", "Gstar")
DEFAULT_MOMENTS = 80
_TRANSFORM = {"order": "raw", "log": "log", "dlog": "loglog"}
# a log-linear tail is both log-convex and log-concave
_BEREZANSKII_SHAPES = ("log_convex", "log_concave", "geometric_borderline")
CHAIN_SLACK = 0.1
MOMENT_CONDITION_SLOPE = 0.25


@dataclass(frozen=True)
class SeriesFn:
    name: str
    log_coeffs: np.ndarray = field(repr=False)
    provenance: str
    reliable: bool = True
    notes: tuple[str, ...] = ()

    @property
    def depth(self) -> int:
        return self.log_coeffs.size - 1

    def log_maxmod(self, log_r: float) -> float:
        """``log f(r)`` from the truncated series."""
        la = self.log_coeffs
        n = np.arange(la.size, dtype=float)
        keep = np.isfinite(la)
        t = la[keep] + n[keep] * log_r
        top = float(np.max(t))
        return top + math.log(math.fsum(np.exp(t - top)))

    def positive(self) -> bool:
        fin = self.log_coeffs[np.isfinite(self.log_coeffs)]
        return fin.size > 0

    def minimal_type_trend(self) -> bool:
        """``n a_n^{1/n}`` decreasing over the last decade of nonzero terms."""
        la = self.log_coeffs
        n = np.arange(la.size, dtype=float)
        keep = np.isfinite(la) & (n >= 1)
        v = np.log(n[keep]) + la[keep] / n[keep]
        if v.size < 20:
            return False
        k = v.size
        return float(np.max(v[k - k // 10:])) < float(np.max(v[k // 2: k - k // 10]))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "provenance": self.provenance,
            "depth": self.depth,
            "reliable": self.reliable,
            "notes": list(self.notes),
            "log_coeffs": [None if not math.isfinite(x) else float(x) for x in self.log_coeffs],
        }


def _spread(log_vals, step: int, size: int) -> np.ndarray:
    out = np.full(size, -math.inf)
    out[: step * len(log_vals): step] = log_vals
    return out


@dataclass
class _Inputs:
    spec: CoeffSpec
    N: int
    prec: int
    triangle: CoeffTriangle | None = None
    moments: MomentTable | None = None

    def tri(self) -> CoeffTriangle:
        if self.triangle is None:
            self.triangle = coeff_triangle(self.spec, 5 * self.N, self.N, self.prec)
        return self.triangle

    def mom(self) -> MomentTable:
        if self.moments is None:
            self.moments = moments(self.spec, 2 * self.N, self.prec)
        return self.moments


def _n1(spec: CoeffSpec) -> int:
    lb = log_b_array(spec, min(2000, available_terms(spec)))
    d = np.diff(lb)
    bad = np.where(d <= 0)[0]
    return int(bad[-1] + 1) if bad.size else 0


def build(spec: CoeffSpec, name: str, N: int = 200, prec: int = DEFAULT_PREC, *,
          triangle: CoeffTriangle | None = None, moment_table: MomentTable | None = None,
          n1: int | None = None) -> SeriesFn:
    """Coefficient stream of the named function up to ``z^N`` (``Psi``/``F``: ``z^{2N}``)."""
    return _build(_Inputs(spec, N, prec, triangle, moment_table), name, n1)


def _build(inp: _Inputs, name: str, n1: int | None = None) -> SeriesFn:
    spec, N = inp.spec, inp.N
    if name == "Phi":
        t = inp.tri()
        logs = np.array([c.ln_float() for c in t.c[: N + 1]])
        ok = all(t.reliable[: N + 1])
        notes = () if ok else ("column sums truncated with slow decay",)
        return SeriesFn("Phi", logs, "c_k", ok, notes)
    if name == "Psi":
        t = inp.tri()
        logs = np.array([2 * c.ln_float() for c in t.c[: N + 1]])
        return SeriesFn("Psi", _spread(logs, 2, 2 * len(logs) - 1), "c_k^2 at z^2k", all(t.reliable[: N + 1]))
    if name in ("F", "L"):
        s = inp.mom().s
        even = np.array([s[2 * n].ln_float() for n in range(N + 1)])
        if name == "F":
            return SeriesFn("F", _spread(-even, 2, 2 * N + 1), "1/s_2n at z^2n")
        return SeriesFn("L", -0.5 * even, "1/sqrt(s_2n)")
    lb = log_b_array(spec, N + 1)
    n = np.arange(N + 1, dtype=float)
    if name == "H":
        logs = -np.concatenate(([0.0], np.cumsum(lb[:-1])))
        return SeriesFn("H", logs, "b_nn = 1/(b_0...b_{n-1})")
    if name == "G":
        return SeriesFn("G", -n * lb, "1/b_n^n")
    if name == "Gstar":
        k = _n1(spec) if n1 is None else n1
        return SeriesFn("Gstar", -(n - k) * lb, f"1/b_n^(n-{k})")
    raise InsufficientDataError(f"unknown function name {name!r}")


# ---------------------------------------------------------------------------
# comparison table


@dataclass(frozen=True)
class ComparisonTable:
    spec: str
    scale: str
    rows: dict
    spread: float
    ordering_ok: bool
    hypotheses: bool
    chain_ok: bool
    notes: tuple[str, ...] = ()

    def value(self, name: str) -> float:
        return self.rows[name].rho.value

    def to_dict(self) -> dict:
        return {
            "spec": self.spec,
            "scale": self.scale,
            "rows": {k: v.to_dict() for k, v in self.rows.items()},
            "spread": self.spread,
            "ordering_ok": self.ordering_ok,
            "hypotheses": self.hypotheses,
            "chain_ok": self.chain_ok,
            "notes": list(self.notes),
        }


def governing_scale(spec: CoeffSpec, N: int = 100_000) -> str:
    """First scale at which the convergence exponent of ``b_n`` is clearly positive."""
    for scale in ("order", "log"):
        try:
            e = spec_convergence_exponent(spec, _TRANSFORM[scale], min(N, available_terms(spec)))
        except InsufficientDataError:
            continue
        if e.value > 0.05:
            return scale
    return "dlog"


def product_maxmod_samples(spec: CoeffSpec, scale: str, *, terms: int = 1_000_000,
                           points: int = 40) -> list[tuple[float, float]]:
    """``(log r, log Pi(r))`` for the canonical product on a scale-adapted grid.

    Radii stay where the supplied factors dominate: ``r`` up to about
    ``b_K/10^3`` for the last available ``b_K``.
    """
    lu = spec_zero_logs(spec, terms)
    lu = lu[np.isfinite(lu)]
    # keep log r well inside float range so the log-sum cannot overflow
    top = min(-float(lu[-1]) - math.log(1e3), 1e250)
    if scale == "order":
        grid = np.linspace(max(1.0, top / 4), top, points)
    elif scale == "log":
        grid = np.exp(np.linspace(math.log(max(2.0, top / 100)), math.log(top), points))
    else:
        grid = np.exp(np.exp(np.linspace(math.log(max(1.5, math.log(max(top, 10.0)) / 4)),
                                         math.log(math.log(max(top, 10.0))), points)))
    return [(float(L), log_product_float(lu, float(L))) for L in grid]


def _report(fn: SeriesFn, scale: str) -> GrowthReport:
    return scale_from_coeffs(fn.log_coeffs, scale)


def compare_growth(spec: CoeffSpec, N: int = 200, scale: str | None = None,
                   prec: int = DEFAULT_PREC, *, names=("Phi", "F", "L", "H", "G"),
                   radii=None) -> ComparisonTable:
    """Scale estimates for the companion functions, the canonical product and
    the convergence exponent, checked against the expected chain.

    Under the Berezanskii hypotheses all entries should agree (spread at
    most 0.1); otherwise only ``rho_L <= rho_H <= rho_Phi`` (with ``CHAIN_SLACK``)
    is asserted.  ``ordering_ok`` compares ``M_L <= M_H <= M_Phi`` on
    sampled radii.
    """
    scale = scale or governing_scale(spec)
    inp = _Inputs(spec, N, prec)
    fns = {name: _build(inp, name) for name in names}
    rows = {}
    notes = []
    for name, fn in fns.items():
        try:
            rows[name] = _report(fn, scale)
        except InsufficientDataError as exc:
            notes.append(f"{name}: {exc}")
    try:
        rows["Pi"] = scale_from_maxmod(product_maxmod_samples(spec, scale), scale)
    except InsufficientDataError as exc:
        notes.append(f"Pi: {exc}")
    e = spec_convergence_exponent(spec, _TRANSFORM[scale], min(100_000, available_terms(spec)))
    rows["E"] = GrowthReport(scale=scale, method="conv_exponent", rho=e)
    shape = classify_shape(spec)
    hyp = shape.tail_shape in _BEREZANSKII_SHAPES and shape.berezanskii_partial.trend == "converging"
    vals = [r.rho.value for r in rows.values()]
    spread = max(vals) - min(vals) if vals else math.nan
    if hyp:
        chain = spread <= 0.1
    else:
        get = lambda k: rows[k].rho.value if k in rows else math.nan
        chain = get("L") <= get("H") + CHAIN_SLACK and get("H") <= get("Phi") + CHAIN_SLACK
        notes.append("hypotheses not met: only the inequality directions are checked")
    ordering = True
    if all(k in fns for k in ("L", "H", "Phi")):
        if radii is None:
            radii = np.geomspace(1.0, 1e6, 13)
        for r in radii:
            lr = math.log(r)
            ml, mh, mp = (fns[k].log_maxmod(lr) for k in ("L", "H", "Phi"))
            slack = 1e-12 * max(1.0, abs(mp))
            if not (ml <= mh + slack and mh <= mp + slack):
                ordering = False
    return ComparisonTable(spec.label(), scale, rows, spread, ordering, hyp, chain, tuple(notes))


# ---------------------------------------------------------------------------
# moment inequalities


def newlif_chain(spec: CoeffSpec, n: int, prec: int = DEFAULT_PREC, *,
                 triangle: CoeffTriangle | None = None,
                 moment_table: MomentTable | None = None) -> tuple[XReal, XReal, XReal]:
    """``(1, s_{2n} b_{n,n}^2, c_n^2 s_{2n})``; raises on a violated inequality.

    ``c_n`` is the truncated column norm, which still dominates ``b_{n,n}``.
    """
    # guard bits: rounding in s_2n grows with n and the middle term sits at 1 + tiny
    wp = prec + 64
    tri = triangle or coeff_triangle(spec, max(2 * n, n + 40), n, wp)
    mt = moment_table or moments(spec, 2 * n, wp)
    s2n = mt.s[2 * n]
    bnn = tri.entry(n, n)
    mid = s2n * bnn * bnn
    upper = tri.column_sq(n) * s2n
    one = XReal(1, prec)
    slack = XReal(n + 1, prec) * XReal(2, prec) ** (-(prec - 24))
    if mid < one - slack * one:
        raise InvariantViolation(f"s_2n b_nn^2 = {mid} < 1 at n={n} for {spec.label()}")
    if upper < mid - slack * mid:
        raise InvariantViolation(f"c_n^2 s_2n < s_2n b_nn^2 at n={n} for {spec.label()}")
    return one, mid, upper


@dataclass(frozen=True)
class S2nReport:
    A: float
    C: float
    margin: float
    N: int
    hypotheses: dict

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def s2n_upper(spec: CoeffSpec, N: int = 40, prec: int = DEFAULT_PREC,
              moment_table: MomentTable | None = None) -> S2nReport:
    """Smallest ``A >= 1`` with ``sqrt(s_2n) <= A (3C)^n b_0 ... b_{n-1}`` over ``n <= N``.

    ``C = max(1, sup |a_n|/b_n)`` over the window; ``margin`` is the
    smallest log-gap between the two sides over ``1 <= n <= N`` once ``A``
    is fixed.
    """
    lb = log_b_array(spec, max(N + 1, 200))
    la = log_abs_a_array(spec, max(N + 1, 200))
    hyp = {
        "a_over_b_bounded": bool(np.all(np.isfinite(la - lb) | np.isneginf(la))),
        "eventually_increasing": bool(np.all(np.diff(lb[len(lb) // 2:]) > 0)),
        "b_to_infinity": bool(lb[-1] > lb[len(lb) // 2] > lb[0] or lb[-1] > 5.0),
    }
    if not all(hyp.values()):
        raise HypothesisError(f"{spec.label()} fails the growth hypotheses: {hyp}")
    with np.errstate(invalid="ignore"):
        ratio = la[: N + 1] - lb[: N + 1]
    C = max(1.0, math.exp(float(np.max(ratio))) if np.any(np.isfinite(ratio)) else 1.0)
    mt = moment_table or moments(spec, 2 * N, prec)
    prods = np.concatenate(([0.0], np.cumsum(lb[:N])))
    gaps = []
    for n in range(N + 1):
        lhs = 0.5 * mt.s[2 * n].ln_float()
        rhs = n * math.log(3 * C) + prods[n]
        gaps.append(lhs - rhs)
    logA = max(0.0, max(gaps))
    # n = 0 is the trivial 1 <= A
    margin = float(min(logA - g for g in gaps[1:]) if N >= 1 else logA - gaps[0])
    return S2nReport(math.exp(logA), C, margin, N, hyp)


@dataclass(frozen=True)
class LivsicReport:
    rho_F: float
    rho_L: float
    gap: float
    tau_ratio: float | None
    moment_condition_trend: float
    moment_condition_slope: float
    moment_condition_flag: bool
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return dict(self.__dict__, notes=list(self.notes))


def livsic_order_gap(spec: CoeffSpec, N: int = 150, prec: int = DEFAULT_PREC, *,
                     scale: str = "order") -> LivsicReport:
    """``rho_F`` against ``rho_L``, ``tau_F / tau_L`` and a proxy for the
    sufficient condition ``log (c_n^2 s_2n)^{1/2n} = o(log n)``.

    The trend is the ratio ``log (c_n^2 s_2n)^{1/2n} / log n`` averaged over
    the last decade.  ``moment_condition_flag`` is true when that ratio is
    not increasing and ``log (c_n^2 s_2n)^{1/2n}`` grows against ``log n``
    with slope below ``MOMENT_CONDITION_SLOPE`` on the upper half.  It is a
    numerical stand-in for an asymptotic hypothesis.
    """
    inp = _Inputs(spec, N, prec)
    F = _build(inp, "F")
    L = _build(inp, "L")
    rF = scale_from_coeffs(F.log_coeffs, scale).rho.value
    rL = scale_from_coeffs(L.log_coeffs, scale).rho.value
    tau_ratio = None
    notes = ["sufficient moment condition checked by a numerical trend proxy"]
    rho = 0.5 * (rF + rL)
    if 0.05 < rho < math.inf and scale == "order":
        tF = type_from_coeffs(F.log_coeffs, scale, rho).tau.value
        tL = type_from_coeffs(L.log_coeffs, scale, rho).tau.value
        tau_ratio = tF / tL if tL > 0 else None
    tri = inp.tri()
    s = inp.mom().s
    ns = np.arange(2, N + 1, dtype=float)
    v = np.array([(2 * tri.c[n].ln_float() + s[2 * n].ln_float()) / (2 * n) for n in range(2, N + 1)])
    ratio = v / np.log(ns)
    k = max(2, ratio.size // 10)
    last = float(np.mean(ratio[-k:]))
    prev = float(np.mean(ratio[-2 * k: -k]))
    half = ns.size // 2
    growth = float(np.polyfit(np.log(ns[half:]), v[half:], 1)[0])
    flag = last <= prev + 1e-3 and growth < MOMENT_CONDITION_SLOPE
    return LivsicReport(rF, rL, abs(rF - rL), tau_ratio, last, growth, flag, tuple(notes))
