"""Finite-sample estimators for ``limsup y/x`` and scale-specific wrappers.

Every growth quantity in this package has the shape ``E = limsup y(t)/x(t)``
with ``x -> inf``.  Three numbers are computed from a sample of ``(x, y)``:

* ``window_max``: max of ``y/x`` over the upper half of the sample;
* ``slope``: least-squares ``dy/dx`` over the same window;
* ``corrected``: ``E`` from the inverse fit ``x = y/E + g log y + c`` over
  the whole sample with ``y > 1``.  The extra ``log y`` column absorbs the
  iterated-log factors that make the raw ratio converge at rate ``1/log``.
  Taylor-coefficient streams use a Stirling-shaped basis instead, since
  there the remainder is ``O(log n / n)``.

The reported value is ``corrected`` when the sample spans enough of the y
axis to separate ``y`` from ``log y``, else ``slope``.  Confidence is "low"
when the window max and the slope differ by more than 0.1.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from ..errors import DomainError, InsufficientDataError

__all__ = [
    "Estimate",
    "GrowthReport",
    "estimate_limsup",
    "log_inv_root",
    "scale_from_coeffs",
    "scale_from_maxmod",
    "type_from_coeffs",
]

SCALES = ("order", "log", "dlog")
MIN_COEFFS = 64
MIN_SAMPLES = 16
LOW_CONFIDENCE_GAP = 0.1
# corrected fit needs y_max / y_min at least this large
_CORRECTION_SPREAD = 3.0


@dataclass(frozen=True)
class Estimate:
    value: float
    window_max: float
    slope: float
    corrected: float | None
    method: str
    window: tuple[float, float]
    n_points: int
    confidence: str

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GrowthReport:
    scale: str
    method: str
    rho: Estimate
    tau: Estimate | None = None
    notes: tuple[str, ...] = field(default=())

    @property
    def confidence(self) -> str:
        lows = [e for e in (self.rho, self.tau) if e is not None and e.confidence == "low"]
        return "low" if lows else "high"

    def to_dict(self) -> dict:
        return {
            "scale": self.scale,
            "method": self.method,
            "confidence": self.confidence,
            "rho": self.rho.to_dict(),
            "tau": None if self.tau is None else self.tau.to_dict(),
            "notes": list(self.notes),
        }


def _lstsq(cols: list[np.ndarray], y: np.ndarray) -> np.ndarray:
    a = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(a, y, rcond=None)
    return coef


def estimate_limsup(x, y, *, window: float = 0.5, method: str = "",
                    correct: bool = True, basis: str = "log") -> Estimate:
    """Estimate ``limsup y/x`` from samples ordered by increasing ``x``.

    ``basis="stirling"`` is for coefficient streams where ``y = log n``:
    the inverse fit then uses ``x = y/E + c + d (log n)/n + e/n`` over
    ``n >= 10`` instead of the ``log y`` column.
    """
    if basis not in ("log", "stirling"):
        raise DomainError(f"unknown correction basis {basis!r}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = np.isfinite(x) & np.isfinite(y) & (x > 0)
    x, y = x[keep], y[keep]
    if x.size < 4:
        raise InsufficientDataError(f"need at least 4 usable samples, got {x.size}")
    order = np.argsort(x, kind="stable")
    x, y = x[order], y[order]
    start = int(math.floor(x.size * (1.0 - window)))
    start = min(start, x.size - 3)
    xw, yw = x[start:], y[start:]
    window_max = float(np.max(yw / xw))
    if xw[-1] - xw[0] > 0:
        slope = float(_lstsq([xw, np.ones_like(xw)], yw)[0])
    else:
        slope = window_max
    corrected = None
    if basis == "stirling":
        # y = log n for a coefficient index n; Stirling-type remainders are O(log n / n)
        pos = y >= math.log(10.0)
    else:
        pos = y > 1.0
    if correct and int(pos.sum()) >= 12:
        xp, yp = x[pos], y[pos]
        if basis == "stirling":
            inv_n = np.exp(-yp)
            cols = [yp, np.ones_like(yp), yp * inv_n, inv_n]
            spread_ok = True
        else:
            cols = [yp, np.log(yp), np.ones_like(yp)]
            spread_ok = yp.max() / yp.min() >= _CORRECTION_SPREAD
        if spread_ok:
            inv = float(_lstsq(cols, xp)[0])
            if inv > 0:
                corrected = 1.0 / inv
    value = corrected if corrected is not None else slope
    conf = "low" if abs(window_max - slope) > LOW_CONFIDENCE_GAP else "high"
    return Estimate(
        value=value,
        window_max=window_max,
        slope=slope,
        corrected=corrected,
        method=method,
        window=(float(xw[0]), float(xw[-1])),
        n_points=int(x.size),
        confidence=conf,
    )


def _check_scale(scale: str) -> None:
    if scale not in SCALES:
        raise DomainError(f"unknown scale {scale!r}; expected one of {SCALES}")


def log_inv_root(log_abs_coeffs, start: int = 1) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(n, log(1/|a_n|^{1/n}))`` for ``n >= start``.

    ``log_abs_coeffs[n]`` is ``log|a_n|``; zero coefficients are ``-inf`` and
    are dropped.
    """
    la = np.asarray(log_abs_coeffs, dtype=float)
    n = np.arange(la.size, dtype=float)
    keep = (n >= max(start, 1)) & np.isfinite(la)
    n = n[keep]
    return n, -la[keep] / n


def _scale_xy(n: np.ndarray, lir: np.ndarray, scale: str) -> tuple[np.ndarray, np.ndarray]:
    with np.errstate(divide="ignore", invalid="ignore"):
        if scale == "order":
            x = lir
        elif scale == "log":
            x = np.log(lir)
        else:
            x = np.log(np.log(lir))
    return x, np.log(n)


def scale_from_coeffs(log_abs_coeffs, scale: str = "order", *, start: int = 1) -> GrowthReport:
    """Order-type exponent of ``sum a_n z^n`` from ``log|a_n|``.

    With ``L_n = log(1/|a_n|^{1/n})``: order is ``limsup log n / L_n``, log
    order ``limsup log n / log L_n`` and dlog order ``limsup log n / log log L_n``.
    """
    _check_scale(scale)
    n, lir = log_inv_root(log_abs_coeffs, start)
    x, y = _scale_xy(n, lir, scale)
    usable = np.isfinite(x) & (x > 0)
    if int(usable.sum()) < MIN_COEFFS:
        raise InsufficientDataError(
            f"only {int(usable.sum())} usable coefficients at scale {scale!r}; need {MIN_COEFFS}"
        )
    est = estimate_limsup(x[usable], y[usable], method="coeff_formula", basis="stirling")
    return GrowthReport(scale=scale, method="coeff_formula", rho=est)


def type_from_coeffs(log_abs_coeffs, scale: str, rho: float, *, start: int = 1) -> GrowthReport:
    """Type at the given scale from ``log|a_n|`` and a known exponent ``rho``.

    order: ``(1/(e rho)) limsup n |a_n|^{rho/n}``;
    log: ``rho^rho/(rho+1)^(rho+1) limsup n / L_n^rho``;
    dlog: ``limsup n / (log L_n)^rho``.

    The value is the max over the upper half of the sample.  These limsups
    converge slowly, so the slope field carries the last-decade trend (the
    mean of the top decile) instead.
    """
    _check_scale(scale)
    if not (0 < rho < math.inf):
        raise DomainError("type needs 0 < rho < inf")
    n, lir = log_inv_root(log_abs_coeffs, start)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if scale == "order":
            t = np.log(n) - rho * lir - 1.0 - math.log(rho)
            vals = np.exp(t)
            const = 1.0
        elif scale == "log":
            vals = n / lir**rho
            const = rho**rho / (rho + 1.0) ** (rho + 1.0)
        else:
            vals = n / np.log(lir) ** rho
            const = 1.0
    vals = const * vals
    ok = np.isfinite(vals) & (lir > 0)
    if scale == "dlog":
        ok &= lir > 1.0
    vals, nn = vals[ok], n[ok]
    if vals.size < MIN_COEFFS:
        raise InsufficientDataError(f"only {vals.size} usable coefficients for the type")
    top = vals[vals.size // 2:]
    decile = vals[-max(1, vals.size // 10):]
    wmax = float(np.max(top))
    trend = float(np.mean(decile))
    conf = "low" if abs(wmax - trend) > LOW_CONFIDENCE_GAP * max(1.0, abs(wmax)) else "high"
    est = Estimate(
        value=wmax,
        window_max=wmax,
        slope=trend,
        corrected=None,
        method="coeff_formula",
        window=(float(nn[vals.size // 2]), float(nn[-1])),
        n_points=int(vals.size),
        confidence=conf,
    )
    return GrowthReport(scale=scale, method="coeff_formula", rho=_fixed(rho), tau=est)


def _fixed(value: float) -> Estimate:
    return Estimate(value, value, value, None, "given", (0.0, 0.0), 0, "high")


def scale_from_maxmod(samples, scale: str = "order") -> GrowthReport:
    """Growth exponent from ``(log r, log M(r))`` samples.

    ``samples`` holds pairs ``(log_r, log_M)`` as floats (``log_r`` is the
    natural log of the radius, so radii far beyond float range are fine).

    order: ``limsup log log M / log r``; log: ``limsup log log M / log log r - 1``;
    dlog: slope of ``log(log M / log r)`` against ``log log log r``.
    """
    _check_scale(scale)
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < MIN_SAMPLES:
        raise InsufficientDataError(f"need at least {MIN_SAMPLES} samples")
    lr, lm = arr[:, 0], arr[:, 1]
    ok = (lr > 0) & (lm > 0)
    lr, lm = lr[ok], lm[ok]
    with np.errstate(divide="ignore", invalid="ignore"):
        if scale == "order":
            x, y, shift = lr, np.log(lm), 0.0
        elif scale == "log":
            x, y, shift = np.log(lr), np.log(lm), -1.0
        else:
            x, y, shift = np.log(np.log(lr)), np.log(lm / lr), 0.0
    usable = np.isfinite(x) & np.isfinite(y) & (x > 0)
    if int(usable.sum()) < MIN_SAMPLES:
        raise InsufficientDataError(f"insufficient spread of r at scale {scale!r}")
    xs = x[usable]
    if xs.max() - xs.min() < 0.25:
        raise InsufficientDataError(f"insufficient spread of r at scale {scale!r}")
    est = estimate_limsup(xs, y[usable], method="maxmod_limsup")
    if shift:
        est = Estimate(
            value=est.value + shift,
            window_max=est.window_max + shift,
            slope=est.slope + shift,
            corrected=None if est.corrected is None else est.corrected + shift,
            method=est.method,
            window=est.window,
            n_points=est.n_points,
            confidence=est.confidence,
        )
    return GrowthReport(scale=scale, method="maxmod_limsup", rho=est)
