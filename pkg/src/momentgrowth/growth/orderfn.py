"""Order functions ``alpha(r)`` and their duals ``beta(r) = 1/alpha(1/r)``.

Everything is evaluated in the log domain: ``log_alpha(L)`` returns
``log alpha(r)`` for ``L = log r``, so radii like ``exp(e^60)`` are fine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ..errors import ConfigurationError, DomainError

__all__ = ["OrderFunctionSpec", "ValidationReport", "dual_of", "validate"]

KINDS = ("power", "log_power", "loglog_power", "logpow_loglogpow", "scaled", "composed")


def _solve_llogl(target: float) -> float:
    """The ``L > 1`` with ``L log L = target``."""
    lo, hi = 1.0, max(2.0, target + 2.0)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid * math.log(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class OrderFunctionSpec:
    kind: str
    params: tuple = ()
    parts: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigurationError(f"unknown order function kind {self.kind!r}")
        p = dict(self.params)
        if self.kind == "power":
            a = p.get("alpha")
            if a is None or not (0 < a < 1):
                raise ConfigurationError("power order function needs 0 < alpha < 1")
        elif self.kind in ("log_power", "loglog_power"):
            if p.get("alpha") is None or p["alpha"] <= 0:
                raise ConfigurationError(f"{self.kind} needs alpha > 0")
        elif self.kind == "logpow_loglogpow":
            if p.get("alpha", 0) <= 0 or p.get("beta", 0) <= 0:
                raise ConfigurationError("logpow_loglogpow needs alpha, beta > 0")
        elif self.kind == "scaled":
            if p.get("c", 0) <= 0 or len(self.parts) != 1:
                raise ConfigurationError("scaled needs c > 0 and one inner function")
        elif self.kind == "composed" and len(self.parts) != 2:
            raise ConfigurationError("composed needs (outer, inner)")

    @classmethod
    def of(cls, kind: str, *parts: "OrderFunctionSpec", **params) -> "OrderFunctionSpec":
        norm = tuple(sorted((k, float(Fraction(str(v)))) for k, v in params.items()))
        return cls(kind, norm, tuple(parts))

    @classmethod
    def from_dict(cls, data: dict) -> "OrderFunctionSpec":
        parts = tuple(cls.from_dict(d) for d in data.get("parts", ()))
        return cls.of(data["kind"], *parts, **data.get("params", {}))

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "params": dict(self.params)}
        if self.parts:
            out["parts"] = [p.to_dict() for p in self.parts]
        return out

    def label(self) -> str:
        args = [f"{k}={v:g}" for k, v in self.params] + [p.label() for p in self.parts]
        return f"{self.kind}({', '.join(args)})"

    def _p(self, name: str) -> float:
        return dict(self.params)[name]

    # -- threshold -----------------------------------------------------

    @property
    def log_r0(self) -> float:
        """``log r0``; ``-inf`` when ``r0 = 0``."""
        k = self.kind
        if k == "power":
            return -math.inf
        if k == "log_power":
            return self._p("alpha")
        if k == "loglog_power":
            return _solve_llogl(self._p("alpha"))
        if k == "logpow_loglogpow":
            return max(math.e, self._p("alpha") + self._p("beta"))
        if k == "scaled":
            return self.parts[0].log_r0
        outer, inner = self.parts
        # smallest r past inner's threshold with inner(r) past outer's threshold
        lo = inner.log_r0 if math.isfinite(inner.log_r0) else -50.0
        target = outer.log_r0
        if not math.isfinite(target) or inner.log_alpha(lo + 1e-9) > target:
            return lo
        hi = max(lo + 1.0, 1.0)
        while inner.log_alpha(hi) <= target:
            hi *= 2.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if inner.log_alpha(mid) <= target:
                lo = mid
            else:
                hi = mid
        return hi

    @property
    def r0(self) -> float:
        lr = self.log_r0
        return 0.0 if lr == -math.inf else math.exp(lr)

    # -- evaluation ----------------------------------------------------

    def log_alpha(self, L: float) -> float:
        """``log alpha(r)`` at ``L = log r``."""
        k = self.kind
        if k == "power":
            return self._p("alpha") * L
        if k == "log_power":
            return self._p("alpha") * math.log(L)
        if k == "loglog_power":
            return self._p("alpha") * math.log(math.log(L))
        if k == "logpow_loglogpow":
            return self._p("alpha") * math.log(L) + self._p("beta") * math.log(math.log(L))
        if k == "scaled":
            return math.log(self._p("c")) + self.parts[0].log_alpha(L)
        outer, inner = self.parts
        return outer.log_alpha(inner.log_alpha(L))

    def _check_log_r(self, L: float) -> None:
        if not L > self.log_r0:
            raise DomainError(f"log r = {L:g} is not above log r0 = {self.log_r0:g} for {self.label()}")

    def alpha(self, r: float) -> float:
        L = math.log(r)
        self._check_log_r(L)
        return math.exp(self.log_alpha(L))

    def alpha_log(self, L: float) -> float:
        self._check_log_r(L)
        return math.exp(self.log_alpha(L))

    def beta(self, u: float) -> float:
        return dual_of(self, u)

    def beta_log(self, lu: float) -> float:
        """``beta(u)`` from ``lu = log u``."""
        if lu == -math.inf:
            return 0.0
        self._check_log_r(-lu)
        return math.exp(-self.log_alpha(-lu))

    def log_beta_log(self, lu: float) -> float:
        self._check_log_r(-lu)
        return -self.log_alpha(-lu)

    def squares_bounded(self, grid_logs=None) -> tuple[bool, float]:
        """Evidence for ``alpha(r^2) = O(alpha(r))``: max ratio on a grid and a trend flag."""
        if grid_logs is None:
            start = max(self.log_r0, 0.0) + 1.0
            grid_logs = np.geomspace(start, start * 1e6, 64)
        logs = [self.log_alpha(2 * L) - self.log_alpha(L) for L in grid_logs]
        head, tail = max(logs[: len(logs) // 2]), max(logs[len(logs) // 2:])
        top = max(logs)
        return tail <= head + math.log(1.05), (math.exp(top) if top < 709 else math.inf)


def dual_of(afs: OrderFunctionSpec, r) -> float:
    """``beta(r) = 1/alpha(1/r)`` for ``0 < r < 1/r0``; ``beta(0) = 0``."""
    r = float(r)
    if r == 0.0:
        return 0.0
    if r < 0:
        raise DomainError("dual function needs r >= 0")
    return afs.beta_log(math.log(r))


@dataclass(frozen=True)
class ValidationReport:
    afs: str
    points: int
    alpha_increasing: bool
    r_over_alpha_increasing: bool
    beta_increasing: bool
    r_over_beta_increasing: bool
    dual_scaling: bool
    dual_subadditive: bool

    @property
    def ok(self) -> bool:
        return all((self.alpha_increasing, self.r_over_alpha_increasing, self.beta_increasing,
                    self.r_over_beta_increasing, self.dual_scaling, self.dual_subadditive))

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def validate(afs: OrderFunctionSpec, grid=None, *, points: int = 64, tol: float = 1e-12) -> ValidationReport:
    """Spot-check the order-function axioms and the dual inequalities on a grid.

    ``grid`` holds values of ``log r`` above ``log r0``; by default a
    geometric ladder in ``log r`` with ``points`` entries.
    """
    lr0 = afs.log_r0
    if grid is None:
        start = (lr0 if math.isfinite(lr0) else -20.0) + 1e-3
        span = 60.0
        grid = np.concatenate((start + np.geomspace(1e-3, span, points) - 1e-3,))
    L = np.sort(np.asarray(grid, dtype=float))
    L = L[L > lr0]
    la = np.array([afs.log_alpha(x) for x in L])
    inc = bool(np.all(np.diff(la) > -tol * np.maximum(1.0, np.abs(la[1:]))))
    roa = L - la
    inc_r = bool(np.all(np.diff(roa) > -tol * np.maximum(1.0, np.abs(roa[1:]))))
    # dual on u = 1/r: log beta(u) = -log alpha(-log u)
    lu = -L[::-1]
    lb = np.array([afs.log_beta_log(x) for x in lu])
    binc = bool(np.all(np.diff(lb) > -tol * np.maximum(1.0, np.abs(lb[1:]))))
    rob = lu - lb
    binc_r = bool(np.all(np.diff(rob) > -tol * np.maximum(1.0, np.abs(rob[1:]))))
    scaling = True
    subadd = True
    limit = -lr0 if math.isfinite(lr0) else math.inf
    for x in lu:
        b = math.exp(afs.log_beta_log(x))
        for K in (1.5, 2.0, 10.0):
            y = x + math.log(K)
            if y < limit:
                if math.exp(afs.log_beta_log(y)) > K * b * (1 + 1e-12):
                    scaling = False
        for frac in (0.1, 0.5, 1.0):
            x2 = x + math.log(frac)
            s = math.log(math.exp(x) + math.exp(x2))
            if math.log(2.0) + max(x, x2) < limit:
                lhs = math.exp(afs.log_beta_log(s))
                rhs = 2 * b + 2 * math.exp(afs.log_beta_log(x2))
                if lhs > rhs * (1 + 1e-12):
                    subadd = False
    return ValidationReport(afs.label(), int(L.size), inc, inc_r, binc, binc_r, scaling, subadd)
