"""Recurrence-coefficient sources and shape classification.

A :class:`CoeffSpec` names a family of Jacobi parameters ``(a_n, b_n)`` for
the recurrence ``z r_n = b_n r_{n+1} + a_n r_n + b_{n-1} r_{n-1}``.  Each
family provides exact-where-possible extended values (``coeffs``,
``b_squared``) and a vectorized float path (``log_b_array``) for long sums.
"""

from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Callable, Iterable

import numpy as np

from .errors import ConfigurationError, DomainError, InsufficientDataError
from .growth.estimate import Estimate, estimate_limsup
from .xreal import DEFAULT_PREC, XReal, exp_x, log_x, sqrt_x

__all__ = [
    "CoeffSpec",
    "ShapeReport",
    "SumTrend",
    "FAMILIES",
    "classify_shape",
    "coeffs",
    "coeff_arrays",
    "condition_sums",
    "convergence_exponent",
    "log_abs_a_array",
    "log_b_array",
    "available_terms",
    "read_table_csv",
    "spec_convergence_exponent",
    "spec_convergence_type",
    "trend_of",
]

SHAPE_TOL = 1e-12
DIVERGENCE_THRESHOLD = 1e4
_WP = 16
_GRID = 400


# ---------------------------------------------------------------------------
# parameters


def _norm_param(value):
    """Normalize a parameter to an exact, hashable value."""
    if isinstance(value, CoeffSpec):
        return value
    if isinstance(value, bool):
        raise ConfigurationError("boolean is not a valid parameter")
    if isinstance(value, str):
        text = value.strip()
        if text == "e":
            return "e"
        try:
            return Fraction(text)
        except ValueError as exc:
            raise ConfigurationError(f"cannot parse parameter {value!r}") from exc
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ConfigurationError("parameters must be finite")
        return Fraction(value)
    if isinstance(value, dict):
        return CoeffSpec.from_dict(value)
    raise ConfigurationError(f"unsupported parameter type {type(value).__name__}")


def _pf(v) -> float:
    return math.e if v == "e" else float(v)


def _px(v, prec: int) -> XReal:
    return exp_x(XReal(1, prec)) if v == "e" else XReal(v, prec)


def _plog(v, prec: int) -> XReal:
    return XReal(1, prec) if v == "e" else log_x(XReal(v, prec))


def _plogf(v) -> float:
    return 1.0 if v == "e" else math.log(float(v))


def _is_int(v) -> bool:
    return isinstance(v, Fraction) and v.denominator == 1


def _root(m: int, alpha, prec: int) -> XReal:
    # m ** (1/alpha)
    if m == 0:
        return XReal(0, prec)
    inv = 1 / alpha
    if _is_int(inv):
        return XReal(m ** int(inv), prec)
    return XReal(m, prec) ** XReal(inv, prec)


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class _Family:
    name: str
    params: tuple[str, ...]
    defaults: dict
    validate: Callable[[dict], None]
    b: Callable[[dict, int, int], XReal]
    b2: Callable[[dict, int, int], XReal] | None
    log_b: Callable[[dict, np.ndarray], np.ndarray]
    a: Callable[[dict, int, int], XReal] | None = None
    log_abs_a: Callable[[dict, np.ndarray], np.ndarray] | None = None
    symmetric: Callable[[dict], bool] = lambda p: True


def _need(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigurationError(msg)


def _gt1(v) -> bool:
    return v == "e" or v > 1


# power: b_n = (n+1)^alpha


def _power_b(p, m, prec):
    al = p["alpha"]
    if _is_int(al):
        return XReal((m + 1) ** int(al), prec)
    return (XReal(m + 1, prec + _WP) ** XReal(al, prec + _WP)).with_prec(prec)


def _power_b2(p, m, prec):
    al2 = 2 * p["alpha"]
    if _is_int(al2):
        return XReal((m + 1) ** int(al2), prec)
    return (XReal(m + 1, prec + _WP) ** XReal(al2, prec + _WP)).with_prec(prec)


def _power_logb(p, m):
    return float(p["alpha"]) * np.log(m + 1.0)


# power_log: b_n = (n+1) log^alpha(n+2)


def _plog_b(p, m, prec):
    wp = prec + _WP
    return (XReal(m + 1, wp) * log_x(XReal(m + 2, wp)) ** XReal(p["alpha"], wp)).with_prec(prec)


def _plog_logb(p, m):
    return np.log(m + 1.0) + float(p["alpha"]) * np.log(np.log(m + 2.0))


# geom_power: b_n = a^{n^{1/alpha}}, optional a_n = a^{c n^{1/alpha}}


def _gp_b(p, m, prec):
    wp = prec + _WP
    return exp_x(_plog(p["a"], wp) * _root(m, p["alpha"], wp)).with_prec(prec)


def _gp_logb(p, m):
    return _plogf(p["a"]) * m ** (1.0 / float(p["alpha"]))


def _gp_a(p, m, prec):
    if p.get("c") is None:
        return XReal(0, prec)
    wp = prec + _WP
    return exp_x(_plog(p["a"], wp) * XReal(p["c"], wp) * _root(m, p["alpha"], wp)).with_prec(prec)


def _gp_logabsa(p, m):
    if p.get("c") is None:
        return np.full_like(m, -np.inf)
    return float(p["c"]) * _plogf(p["a"]) * m ** (1.0 / float(p["alpha"]))


# double_exp: b_n = exp(e^{n^{1/alpha}})


def _de_b(p, m, prec):
    wp = prec + _WP
    return exp_x(exp_x(_root(m, p["alpha"], wp))).with_prec(prec)


def _de_logb(p, m):
    with np.errstate(over="ignore"):
        return np.exp(m ** (1.0 / float(p["alpha"])))


# super_geom: b_n = a^{b^n}, a_n = a^{c b^n}


def _sg_b(p, m, prec):
    wp = prec + _WP
    return exp_x(_plog(p["a"], wp) * XReal(p["b"], wp) ** m).with_prec(prec)


def _sg_logb(p, m):
    with np.errstate(over="ignore"):
        return _plogf(p["a"]) * float(p["b"]) ** m


def _sg_a(p, m, prec):
    if p.get("c") is None:
        return XReal(0, prec)
    wp = prec + _WP
    return exp_x(_plog(p["a"], wp) * XReal(p["c"], wp) * XReal(p["b"], wp) ** m).with_prec(prec)


def _sg_logabsa(p, m):
    if p.get("c") is None:
        return np.full_like(m, -np.inf)
    with np.errstate(over="ignore"):
        return float(p["c"]) * _plogf(p["a"]) * float(p["b"]) ** m


# q-Hermite II: b_n^2 = q^{-2n-1}(1 - q^{n+1})


def _qh2_b2(p, m, prec):
    wp = prec + _WP
    q = XReal(p["q"], wp)
    return (q ** (-2 * m - 1) * (1 - q ** (m + 1))).with_prec(prec)


def _qh2_logb(p, m):
    lq = math.log(float(p["q"]))
    return -(2 * m + 1) * lq / 2 + 0.5 * np.log1p(-np.exp((m + 1) * lq))


# q^{-1}-Hermite: b_n^2 = (1/4) q^{-(n+1)} (1 - q^{n+1})


def _qih_b2(p, m, prec):
    wp = prec + _WP
    q = XReal(p["q"], wp)
    return ((q ** (-(m + 1)) - 1).mul_pow2(-2)).with_prec(prec)


def _qih_logb(p, m):
    lq = math.log(float(p["q"]))
    return -math.log(2.0) - (m + 1) * lq / 2 + 0.5 * np.log1p(-np.exp((m + 1) * lq))


# Chen-Ismail: b_n = 2(n+1) sqrt(4(n+1)^2 - 1)


def _ci_b2(p, m, prec):
    k = m + 1
    return XReal(4 * k * k * (4 * k * k - 1), prec)


def _ci_logb(p, m):
    k = m + 1.0
    return math.log(2.0) + np.log(k) + 0.5 * np.log(4 * k * k - 1)


# geometric: b_n = q^{-(n+1)}


def _gq_b(p, m, prec):
    return (XReal(p["q"], prec + _WP) ** (-(m + 1))).with_prec(prec)


def _gq_logb(p, m):
    return -(m + 1) * math.log(float(p["q"]))


# paired_determinate: b_{2k} = b_{2k+1} = beta_k from an inner spec


def _pd_b(p, m, prec):
    return p["inner"].b(m // 2, prec)


def _pd_b2(p, m, prec):
    return p["inner"].b_squared(m // 2, prec)


def _pd_logb(p, m):
    inner = p["inner"]
    k = np.floor_divide(m.astype(np.int64), 2)
    top = int(k.max()) if k.size else 0
    lb = log_b_array(inner, top + 1)
    return lb[k]


# tabulated


def _tab_row(p, m):
    rows = p["rows"]
    if m >= len(rows):
        raise DomainError(f"table has only {len(rows)} rows; index {m} requested")
    return rows[m]


def _tab_b(p, m, prec):
    return XReal(_tab_row(p, m)[1], prec)


def _tab_a(p, m, prec):
    return XReal(_tab_row(p, m)[0], prec)


def _tab_logb(p, m):
    return np.array([XReal(_tab_row(p, int(k))[1], 64).ln_float() for k in m])


def _tab_logabsa(p, m):
    out = []
    for k in m:
        v = XReal(_tab_row(p, int(k))[0], 64)
        out.append(-math.inf if v.is_zero() else abs(v).ln_float())
    return np.array(out)


def _v_power(p):
    _need(p["alpha"] > 1, "power requires alpha > 1")


def _v_power_log(p):
    _need(p["alpha"] > 1, "power_log requires alpha > 1")


def _v_geom(p):
    _need(_gt1(p["a"]), "geom_power requires a > 1")
    _need(p["alpha"] > 0, "geom_power requires alpha > 0")
    if p.get("c") is not None:
        _need(0 <= p["c"] < 1, "geom_power requires 0 <= c < 1")


def _v_dexp(p):
    _need(p["alpha"] > 0, "double_exp requires alpha > 0")


def _v_sg(p):
    _need(_gt1(p["a"]) and p["b"] > 1, "super_geom requires a, b > 1")
    if p.get("c") is not None:
        _need(p["b"] * p["c"] < 1, "super_geom requires b*c < 1")


def _v_q(p):
    _need(0 < p["q"] < 1, "q-families require 0 < q < 1")


def _v_none(p):
    pass


def _v_pd(p):
    _need(isinstance(p["inner"], CoeffSpec), "paired_determinate needs an inner spec")


def _v_tab(p):
    rows = p["rows"]
    _need(len(rows) >= 1, "table needs at least one row")
    for a, b in rows:
        _need(XReal(b, 64).sign > 0, "table entries need b_n > 0")


FAMILIES: dict[str, _Family] = {}


def _register(f: _Family) -> None:
    FAMILIES[f.name] = f


_register(_Family("power", ("alpha",), {}, _v_power, _power_b, _power_b2, _power_logb))
_register(_Family("power_log", ("alpha",), {}, _v_power_log, _plog_b, None, _plog_logb))
_register(_Family("geom_power", ("a", "alpha", "c"), {"c": None}, _v_geom, _gp_b, None,
                  _gp_logb, _gp_a, _gp_logabsa, lambda p: p.get("c") is None))
_register(_Family("double_exp", ("alpha",), {}, _v_dexp, _de_b, None, _de_logb))
_register(_Family("super_geom", ("a", "b", "c"), {"c": None}, _v_sg, _sg_b, None,
                  _sg_logb, _sg_a, _sg_logabsa, lambda p: p.get("c") is None))
_register(_Family("q_hermite2", ("q",), {}, _v_q, None, _qh2_b2, _qh2_logb))
_register(_Family("q_inv_hermite", ("q",), {}, _v_q, None, _qih_b2, _qih_logb))
_register(_Family("chen_ismail", (), {}, _v_none, None, _ci_b2, _ci_logb))
_register(_Family("geometric_q", ("q",), {}, _v_q, _gq_b, None, _gq_logb))
_register(_Family("paired_determinate", ("inner",), {}, _v_pd, _pd_b, _pd_b2, _pd_logb))
_register(_Family("table", ("rows",), {}, _v_tab, _tab_b, None, _tab_logb, _tab_a,
                  _tab_logabsa, lambda p: all(XReal(a, 64).is_zero() for a, _ in p["rows"])))


# ---------------------------------------------------------------------------
# CoeffSpec


@dataclass(frozen=True)
class CoeffSpec:
    """A recurrence-coefficient source: family name, parameters, index offset."""

    family: str
    params: tuple = ()
    offset: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown family {self.family!r}")
        if self.offset < 0:
            raise ConfigurationError("offset must be >= 0")
        fam = FAMILIES[self.family]
        given = dict(self.params)
        unknown = set(given) - set(fam.params)
        if unknown:
            raise ConfigurationError(f"unknown parameters for {self.family}: {sorted(unknown)}")
        missing = [k for k in fam.params if k not in given and k not in fam.defaults]
        if self.family == "paired_determinate" and "inner" not in given:
            given["inner"] = CoeffSpec.of("power", alpha=2)
            missing = []
        if missing:
            raise ConfigurationError(f"missing parameters for {self.family}: {missing}")
        fam.validate({**fam.defaults, **given})
        object.__setattr__(self, "params", tuple(sorted(given.items())))

    @classmethod
    def of(cls, family: str, offset: int = 0, **params) -> "CoeffSpec":
        norm = {}
        for k, v in params.items():
            if v is None:
                continue
            if k == "rows":
                norm[k] = tuple((str(a), str(b)) for a, b in v)
            else:
                norm[k] = _norm_param(v)
        return cls(family, tuple(sorted(norm.items())), int(offset))

    @classmethod
    def table(cls, b_values: Iterable, a_values: Iterable | None = None, offset: int = 0) -> "CoeffSpec":
        bs = list(b_values)
        as_ = list(a_values) if a_values is not None else [0] * len(bs)
        if len(as_) != len(bs):
            raise ConfigurationError("a and b columns differ in length")
        return cls.of("table", offset=offset, rows=list(zip(as_, bs)))

    @property
    def p(self) -> dict:
        fam = FAMILIES[self.family]
        return {**fam.defaults, **dict(self.params)}

    @property
    def symmetric(self) -> bool:
        return FAMILIES[self.family].symmetric(self.p)

    def shifted(self, k: int = 1) -> "CoeffSpec":
        return CoeffSpec(self.family, self.params, self.offset + k)

    # values at the shifted index n (n >= -1)

    def b(self, n: int, prec: int = DEFAULT_PREC) -> XReal:
        return _b_cached(self, n, prec)

    def b_squared(self, n: int, prec: int = DEFAULT_PREC) -> XReal:
        return _b2_cached(self, n, prec)

    def a(self, n: int, prec: int = DEFAULT_PREC) -> XReal:
        if n < 0:
            return XReal(0, prec)
        fam = FAMILIES[self.family]
        if fam.a is None:
            return XReal(0, prec)
        return fam.a(self.p, n + self.offset, prec)

    def label(self) -> str:
        parts = []
        for k, v in self.params:
            if isinstance(v, CoeffSpec):
                parts.append(f"{k}={v.label()}")
            elif k == "rows":
                parts.append(f"rows={len(v)}")
            else:
                parts.append(f"{k}={v}")
        text = f"{self.family}({', '.join(parts)})"
        return text + (f"+{self.offset}" if self.offset else "")

    def to_dict(self) -> dict:
        params = {}
        for k, v in self.params:
            if isinstance(v, CoeffSpec):
                params[k] = v.to_dict()
            elif k == "rows":
                params[k] = [list(r) for r in v]
            else:
                params[k] = str(v)
        return {"family": self.family, "params": params, "offset": self.offset}

    @classmethod
    def from_dict(cls, data: dict) -> "CoeffSpec":
        if not isinstance(data, dict) or "family" not in data:
            raise ConfigurationError("spec must be a mapping with a 'family' key")
        params = dict(data.get("params", {}))
        if "table_csv" in params:
            rows = read_table_csv(params.pop("table_csv"))
            params["rows"] = rows
        return cls.of(data["family"], offset=int(data.get("offset", 0)), **params)


@lru_cache(maxsize=None)
def _b_cached(spec: CoeffSpec, n: int, prec: int) -> XReal:
    if n < 0:
        return XReal(1, prec)
    fam = FAMILIES[spec.family]
    m = n + spec.offset
    if fam.b is not None:
        return fam.b(spec.p, m, prec)
    return sqrt_x(fam.b2(spec.p, m, prec + _WP)).with_prec(prec)


@lru_cache(maxsize=None)
def _b2_cached(spec: CoeffSpec, n: int, prec: int) -> XReal:
    if n < 0:
        return XReal(1, prec)
    fam = FAMILIES[spec.family]
    m = n + spec.offset
    if fam.b2 is not None:
        return fam.b2(spec.p, m, prec)
    b = fam.b(spec.p, m, prec + _WP)
    return (b * b).with_prec(prec)


def coeffs(spec: CoeffSpec, n: int, prec: int = DEFAULT_PREC) -> tuple[XReal, XReal]:
    """``(a_n, b_n)``; ``n = -1`` gives ``(0, 1)``."""
    if n < -1:
        raise DomainError("index must be >= -1")
    return spec.a(n, prec), spec.b(n, prec)


class _Arrays:
    __slots__ = ("a", "b", "b2", "lock")

    def __init__(self):
        self.a: list[XReal] = []
        self.b: list[XReal] = []
        self.b2: list[XReal] = []
        self.lock = threading.Lock()


@lru_cache(maxsize=64)
def _arrays(spec: CoeffSpec, prec: int) -> _Arrays:
    return _Arrays()


def coeff_arrays(spec: CoeffSpec, N: int, prec: int = DEFAULT_PREC):
    """Lists ``a[0..N]``, ``b[0..N]``, ``b2[0..N]`` of extended values."""
    store = _arrays(spec, prec)
    with store.lock:
        for n in range(len(store.b), N + 1):
            store.a.append(spec.a(n, prec))
            store.b.append(_b_cached.__wrapped__(spec, n, prec))
            store.b2.append(_b2_cached.__wrapped__(spec, n, prec))
        return store.a[: N + 1], store.b[: N + 1], store.b2[: N + 1]


def available_terms(spec: CoeffSpec) -> int:
    """Number of defined coefficients (unbounded families report a large cap)."""
    if spec.family == "table":
        return max(len(spec.p["rows"]) - spec.offset, 0)
    return 1 << 40


def log_b_array(spec: CoeffSpec, N: int) -> np.ndarray:
    """Natural logs of ``b_0..b_{N-1}`` as floats (``inf`` past float range)."""
    fam = FAMILIES[spec.family]
    m = np.arange(N, dtype=float) + spec.offset
    return np.asarray(fam.log_b(spec.p, m), dtype=float)


def log_abs_a_array(spec: CoeffSpec, N: int) -> np.ndarray:
    fam = FAMILIES[spec.family]
    m = np.arange(N, dtype=float) + spec.offset
    if fam.log_abs_a is None:
        return np.full(N, -np.inf)
    return np.asarray(fam.log_abs_a(spec.p, m), dtype=float)


def read_table_csv(path) -> list[tuple[str, str]]:
    """Read ``n, a_n, b_n`` rows; entries may use the ``log2:`` prefix."""
    rows: dict[int, tuple[str, str]] = {}
    with open(Path(path), newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].strip().startswith("#"):
                continue
            if rec[0].strip() == "n":
                continue
            if len(rec) < 3:
                raise ConfigurationError(f"bad table row {rec!r}")
            rows[int(rec[0])] = (rec[1].strip(), rec[2].strip())
    if sorted(rows) != list(range(len(rows))):
        raise ConfigurationError("table indices must be 0..N without gaps")
    return [rows[k] for k in range(len(rows))]


# ---------------------------------------------------------------------------
# sums and shape


@dataclass(frozen=True)
class SumTrend:
    """A partial sum with the evidence flag for convergence."""

    partial: XReal
    trend: str
    ratio: float
    checkpoints: tuple[tuple[int, float], ...] = ()

    def to_dict(self) -> dict:
        return {
            "partial": self.partial.to_record(),
            "partial_float": float(self.partial),
            "trend": self.trend,
            "ratio": self.ratio,
            "checkpoints": [list(c) for c in self.checkpoints],
        }


def _decade_ratio(s: np.ndarray, hi: int) -> float:
    """(S_hi - S_{hi/10}) / (S_{hi/10} - S_{hi/100}) with 1-based counts."""
    i0, i1, i2 = hi - 1, max(hi // 10, 1) - 1, max(hi // 100, 1) - 1
    if i1 <= i2:
        i2 = max(i1 // 2, 0)
    last = s[i0] - s[i1]
    prev = s[i1] - s[i2]
    if prev <= 0:
        return 0.0 if last <= 0 else math.inf
    return float(last / prev)


def trend_of(partials: np.ndarray, threshold: float = DIVERGENCE_THRESHOLD) -> tuple[str, float]:
    """Classify running partial sums by the last-decade increment ratio.

    ratio = (S_N - S_{N/10}) / (S_{N/10} - S_{N/100}).  converging when the
    ratio is below 0.5, or when it is below 0.9 and no larger than the same
    ratio one decade earlier (a stable geometric decay across decades, as
    for p-series with p > 1); diverging when it is at least 0.9, or when S_N
    is past ``threshold``; otherwise inconclusive.
    """
    s = np.asarray(partials, dtype=float)
    n = s.size
    if n < 16:
        return "inconclusive", math.nan
    if not math.isfinite(s[-1]):
        return "diverging", math.inf
    ratio = _decade_ratio(s, n)
    if ratio < 0.5:
        return "converging", ratio
    if ratio >= 0.9 or s[-1] > threshold:
        return "diverging", ratio
    if n >= 1000:
        earlier = _decade_ratio(s, n // 10)
        if ratio <= earlier + 0.01:
            return "converging", ratio
    return "inconclusive", ratio


def _sum_trend(terms: np.ndarray, threshold: float) -> SumTrend:
    partials = np.cumsum(terms)
    trend, ratio = trend_of(partials, threshold)
    total = math.fsum(terms)
    n = terms.size
    cps = tuple((k, float(partials[k - 1])) for k in sorted({max(n // 100, 1), max(n // 10, 1), n}))
    return SumTrend(XReal(total), trend, ratio, cps)


def condition_sums(spec: CoeffSpec, N: int, threshold: float = DIVERGENCE_THRESHOLD) -> tuple[SumTrend, SumTrend]:
    """Carleman ``sum 1/b_n`` and Berezanskii ``sum (1+|a_n|)/sqrt(b_n b_{n-1})``."""
    if N < 16:
        raise DomainError("condition_sums needs N >= 16")
    count = min(N + 1, available_terms(spec))
    lb = log_b_array(spec, count)
    la = log_abs_a_array(spec, count)
    with np.errstate(over="ignore"):
        carleman = np.exp(-lb)
        lprev = np.concatenate(([0.0], lb[:-1]))
        half = -(lb + lprev) / 2
        bere = np.exp(half) + np.exp(la + half)
    return _sum_trend(carleman, threshold), _sum_trend(bere, threshold)


@dataclass(frozen=True)
class ShapeReport:
    tail_shape: str
    tail_start: int
    carleman_partial: SumTrend
    berezanskii_partial: SumTrend
    eventually_increasing: bool
    window: int
    increasing_observed: bool = False
    classes: tuple[int, ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "tail_shape": self.tail_shape,
            "tail_start": self.tail_start,
            "window": self.window,
            "carleman": self.carleman_partial.to_dict(),
            "berezanskii": self.berezanskii_partial.to_dict(),
            "eventually_increasing": self.eventually_increasing,
            "increasing_observed": self.increasing_observed,
        }


_SHAPES = {1: "log_convex", -1: "log_concave"}


def second_differences(spec: CoeffSpec, N: int, prec: int = DEFAULT_PREC) -> list[tuple[XReal, XReal]]:
    """``(d_n, scale_n)`` for ``1 <= n < N`` with ``d_n = log b_{n+1} + log b_{n-1} - 2 log b_n``."""
    _, _, b2 = coeff_arrays(spec, N, prec)
    lb = [log_x(v) * XReal(Fraction(1, 2)) for v in b2]
    out = []
    for n in range(1, N):
        d = lb[n + 1] + lb[n - 1] - 2 * lb[n]
        scale = max(abs(lb[n + 1]), abs(lb[n]), abs(lb[n - 1]), XReal(1))
        out.append((d, scale))
    return out


def classify_shape(spec: CoeffSpec, N: int = 200, tol: float = SHAPE_TOL,
                   threshold: float = DIVERGENCE_THRESHOLD, prec: int = DEFAULT_PREC) -> ShapeReport:
    """Log-convexity / log-concavity of ``(b_n)`` on the largest possible tail.

    Each ``n`` is classed +1 (``b_n^2 < b_{n-1} b_{n+1}``), -1 (the reverse)
    or 0 (equal within ``tol`` relative to the log scale).  The tail is the
    longest suffix using a single strict sign plus flat entries; a fully
    flat tail is the geometric borderline.
    """
    if N < 16:
        raise DomainError("classify_shape needs N >= 16")
    classes = []
    for d, scale in second_differences(spec, N, prec):
        lim = scale * tol
        classes.append(1 if d > lim else (-1 if d < -lim else 0))
    nonzero = [c for c in classes if c]
    if not nonzero:
        shape, start = "geometric_borderline", 1
    else:
        sign = nonzero[-1]
        k = len(classes)
        while k > 0 and classes[k - 1] in (0, sign):
            k -= 1
        start = k + 1
        shape = _SHAPES[sign]
        if len(classes) - k < len(classes) // 2:
            shape = "neither"
    carleman, bere = condition_sums(spec, max(N, 10_000), threshold)
    lb = log_b_array(spec, min(N + 1, available_terms(spec)))
    tail = lb[start - 1:]
    increasing = bool(np.all(np.diff(tail) > 0)) if tail.size > 1 else False
    eventually = shape != "neither" and bere.trend == "converging"
    return ShapeReport(
        tail_shape=shape,
        tail_start=start,
        carleman_partial=carleman,
        berezanskii_partial=bere,
        eventually_increasing=eventually,
        window=N,
        increasing_observed=increasing,
        classes=tuple(classes),
    )


# ---------------------------------------------------------------------------
# convergence exponents


_TRANSFORMS = ("raw", "log", "loglog")


def _log_of_transformed(v, transform: str) -> float:
    """Natural log of the transformed value, ``nan`` where undefined."""
    depth = {"raw": 0, "log": 1, "loglog": 2}[transform]
    if isinstance(v, XReal):
        if v.sign <= 0:
            raise DomainError("convergence exponent needs positive values")
        x = v
        for _ in range(depth):
            if x.sign <= 0:
                return math.nan
            x = log_x(x)
        return x.ln_float() if x.sign > 0 else math.nan
    v = float(v)
    if v <= 0:
        raise DomainError("convergence exponent needs positive values")
    x = v
    for _ in range(depth):
        if x <= 0:
            return math.nan
        x = math.log(x)
    return math.log(x) if x > 0 else math.nan


def exponent_from_logs(ell, method: str = "conv_exponent") -> Estimate:
    """Convergence exponent from ``ell_n = log x_n`` of a sequence ``x_n -> inf``.

    ``n(r) = #{x_n <= r}`` jumps to ``k`` at the ``k``-th smallest value, so
    ``log n(r)/log r`` is sampled at the jump points on a geometric r-grid.
    """
    ell = np.sort(np.asarray(ell, dtype=float))
    ell = ell[np.isfinite(ell)]
    counts = np.arange(1, ell.size + 1, dtype=float)
    # right-continuous count at each distinct jump; only log r > 0 is sampled
    last = np.r_[ell[1:] != ell[:-1], True]
    last &= ell > 0
    x, y = ell[last], np.log(counts[last])
    if x.size < 8:
        raise InsufficientDataError(f"only {x.size} usable values")
    # thin the jump points onto a geometric r-grid
    grid = np.linspace(x[0], x[-1], min(_GRID, x.size))
    idx = np.unique(np.searchsorted(x, grid, side="right") - 1)
    return estimate_limsup(x[idx], y[idx], method=method)


def convergence_exponent(values, transform: str = "raw", N: int | None = None) -> Estimate:
    """``E = limsup log n(r) / log r`` for the transformed positive sequence."""
    if transform not in _TRANSFORMS:
        raise DomainError(f"transform must be one of {_TRANSFORMS}")
    vals = list(values) if N is None else list(values)[:N]
    if isinstance(values, np.ndarray) and values.dtype.kind == "f":
        arr = np.asarray(vals, dtype=float)
        if np.any(arr <= 0):
            raise DomainError("convergence exponent needs positive values")
    ell = [_log_of_transformed(v, transform) for v in vals]
    return exponent_from_logs(ell)


_MAX_EXTENDED_REDO = 2000


def spec_convergence_exponent(spec: CoeffSpec, transform: str = "raw", N: int = 100_000) -> Estimate:
    """Convergence exponent of ``(b_n)`` for a spec via the float log path."""
    if transform not in _TRANSFORMS:
        raise DomainError(f"transform must be one of {_TRANSFORMS}")
    lb = log_b_array(spec, N)
    with np.errstate(divide="ignore", invalid="ignore"):
        if transform == "raw":
            ell = lb
        elif transform == "log":
            ell = np.log(lb)
        else:
            ell = np.log(np.log(lb))
    bad = np.where(~np.isfinite(ell) & np.isinf(lb))[0]
    if bad.size > _MAX_EXTENDED_REDO:
        # each redo costs an extended-precision evaluation; the log-spread
        # gained past this point is negligible
        ell = ell[: bad[0] + _MAX_EXTENDED_REDO]
        bad = bad[:_MAX_EXTENDED_REDO]
    if bad.size:
        # beyond float range: redo those entries in extended arithmetic
        ell = ell.copy()
        for k in bad:
            ell[k] = _log_of_transformed(spec.b(int(k)), transform)
    return exponent_from_logs(ell)


def spec_convergence_type(spec: CoeffSpec, rho: float, N: int = 100_000) -> Estimate:
    """``limsup n(r)/r^rho`` for ``(b_n)``, sampled at the jumps ``r = b_n``.

    The value is the max over the upper half of the indices; ``slope``
    carries the mean of the last decile as the trend.
    """
    if not (0 < rho < math.inf):
        raise DomainError("type needs 0 < rho < inf")
    lb = np.sort(log_b_array(spec, min(N, available_terms(spec))))
    lb = lb[np.isfinite(lb)]
    if lb.size < 64:
        raise InsufficientDataError(f"only {lb.size} usable values")
    counts = np.arange(1, lb.size + 1, dtype=float)
    with np.errstate(under="ignore", over="ignore"):
        vals = np.exp(np.log(counts) - rho * lb)
    top = vals[vals.size // 2:]
    decile = vals[-max(1, vals.size // 10):]
    wmax, trend = float(np.max(top)), float(np.mean(decile))
    conf = "low" if abs(wmax - trend) > 0.1 * max(1.0, wmax) else "high"
    return Estimate(wmax, wmax, trend, None, "conv_type", (float(lb[lb.size // 2]), float(lb[-1])),
                    int(lb.size), conf)
