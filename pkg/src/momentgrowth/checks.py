"""Runnable acceptance checks, grouped into suites.

Each check is a plain function returning a :class:`CheckResult`; the CLI's
``check`` subcommand and the test suite both drive them through
:func:`run_suite`.  Tolerances live next to the code that uses them.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable

import numpy as np

from .entirefns import compare_growth, newlif_chain
from .growth.appendix import alphahelp_bracket
from .growth.estimate import scale_from_coeffs, scale_from_maxmod
from .growth.products import counting_sandwich, log_product_float, product_coeff_logs, spec_zero_logs
from .nevanlinna import abcd_sequence, berezanskii_bounds, decomposition_residual, indeterminacy, pq_norm
from .polys import coeff_triangle, eval_pq, kernel_trace, moments
from .sequences import CoeffSpec, spec_convergence_exponent, spec_convergence_type
from .xreal import XReal

__all__ = [
    "CHECKS",
    "SUITES",
    "CheckResult",
    "identity_families",
    "indeterminate_families",
    "path_moment",
    "run_check",
    "run_suite",
]

Z_SET = (0, 1, 1j, complex(2, -3))
PREC = 128


@dataclass
class CheckResult:
    number: int
    title: str
    passed: bool
    detail: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.number:02d} {self.title}"

    def to_dict(self) -> dict:
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "seconds": round(self.seconds, 3), "detail": _jsonable(self.detail)}


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, XReal):
        return v.to_text()
    return v


def identity_families() -> list[CoeffSpec]:
    return [
        CoeffSpec.of("power", alpha=2),
        CoeffSpec.of("power", alpha=3),
        CoeffSpec.of("geom_power", a=2, alpha=1),
        CoeffSpec.of("q_inv_hermite", q="1/2"),
        CoeffSpec.of("q_hermite2", q="1/2"),
    ]


def indeterminate_families() -> list[CoeffSpec]:
    """One representative per built-in family that is indeterminate for these parameters."""
    return [
        CoeffSpec.of("power", alpha=2),
        CoeffSpec.of("power", alpha=3),
        CoeffSpec.of("power_log", alpha=2),
        CoeffSpec.of("geom_power", a=2, alpha=1),
        CoeffSpec.of("geom_power", a=2, alpha="1/2", c="1/2"),
        CoeffSpec.of("double_exp", alpha=1),
        CoeffSpec.of("super_geom", a=2, b=2),
        CoeffSpec.of("q_hermite2", q="1/2"),
        CoeffSpec.of("q_inv_hermite", q="1/2"),
        CoeffSpec.of("chen_ismail"),
        CoeffSpec.of("geometric_q", q="1/2"),
    ]


def path_moment(spec: CoeffSpec, m: int, prec: int = PREC) -> Fraction:
    """``s_m`` by enumerating weighted Motzkin paths of length ``m``.

    Up steps weigh 1, a level step at height ``k`` weighs ``a_k`` and a down
    step from ``k`` weighs ``b_{k-1}^2``; weights are taken as exact fractions.
    """
    top = m // 2 + 1
    a = [spec.a(k, prec).to_fraction() for k in range(top + 1)]
    b2 = [spec.b_squared(k, prec).to_fraction() for k in range(top + 1)]
    total = Fraction(0)
    # explicit stack of (height, steps taken, weight)
    stack = [(0, 0, Fraction(1))]
    while stack:
        h, t, w = stack.pop()
        left = m - t
        if left == 0:
            if h == 0:
                total += w
            continue
        if h > left:
            continue
        stack.append((h + 1, t + 1, w))
        if a[h] != 0:
            stack.append((h, t + 1, w * a[h]))
        if h > 0:
            stack.append((h - 1, t + 1, w * b2[h - 1]))
    return total


# ---------------------------------------------------------------------------
# identity suite


def check_wronskian() -> CheckResult:
    worst = 0.0
    for spec in identity_families():
        for z in Z_SET:
            worst = max(worst, eval_pq(spec, z, 500, PREC).wronskian_drift)
    return CheckResult(1, "Wronskian relative residual over n <= 500", worst <= 1e-25, {"max_residual": worst})


def check_unimodularity() -> CheckResult:
    worst = 0.0
    for spec in identity_families():
        for z in Z_SET:
            worst = max(worst, max(p.unimodularity_residual for p in abcd_sequence(spec, z, 300, PREC)))
    return CheckResult(2, "AD - BC = 1 over n <= 300", worst <= 1e-20, {"max_residual": worst})


def check_decomposition() -> CheckResult:
    worst = {"P": 0.0, "Q": 0.0}
    for spec in identity_families():
        for z in Z_SET:
            r = decomposition_residual(spec, z, 300, PREC)
            worst = {k: max(worst[k], r[k]) for k in worst}
    return CheckResult(3, "P_n and Q_n from the Nevanlinna partials", max(worst.values()) <= 1e-20, worst)


def check_parseval() -> CheckResult:
    spec = CoeffSpec.of("power", alpha=2)
    rep = kernel_trace(spec, 400, radii=(0.5, 2.0), prec=PREC)
    worst = max(rep.residuals)
    return CheckResult(4, "Parseval: circle mean of sum |P_n|^2 against sum r^2k c_k^2", worst <= 1e-10,
                       {"radii": rep.radii, "residuals": rep.residuals})


def check_leading_coefficient() -> CheckResult:
    spec = CoeffSpec.of("power", alpha=2)
    tri = coeff_triangle(spec, 12, 12, PREC)
    worst = 0.0
    prod = XReal(1, PREC)
    for n in range(13):
        if n:
            prod = prod * spec.b(n - 1, PREC)
        want = XReal(1, PREC) / prod
        worst = max(worst, float(abs(tri.entry(n, n) - want) / want))
    b33 = tri.entry(3, 3).to_fraction()
    err33 = float(abs(b33 - Fraction(1, 36)) * 36)
    tol = 2.0 ** (-PREC + 8)
    ok = err33 <= tol and worst <= tol
    return CheckResult(5, "leading coefficient 1/(b_0...b_{n-1}); b_33 = 1/36", ok,
                       {"b33_rel_error": err33, "max_rel_error": worst})


def check_shifted() -> CheckResult:
    spec = CoeffSpec.of("power", alpha=2)
    b0 = float(spec.b(0, PREC))
    worst = 0.0
    for z in (1, 1j):
        shifted = pq_norm(spec.shifted(1), z, 399, PREC).P
        orig = pq_norm(spec, z, 400, PREC).Q
        want = orig * XReal(b0, PREC)
        worst = max(worst, float(abs(shifted - want) / want))
    return CheckResult(6, "shifted problem P-norm equals b_0 times the Q-norm", worst <= 1e-12,
                       {"max_rel_error": worst})


def check_moments() -> CheckResult:
    detail = {}
    ok = True
    for spec in (CoeffSpec.of("power", alpha=2), CoeffSpec.of("q_inv_hermite", q="1/2")):
        table = moments(spec, 10, PREC)
        mism = [m for m in range(11) if table.s[m].to_fraction() != path_moment(spec, m)]
        detail[spec.label()] = {"mismatches": mism}
        ok &= not mism
    s4 = moments(CoeffSpec.of("power", alpha=2), 4, PREC).s[4].to_fraction()
    detail["s4_power2"] = str(s4)
    return CheckResult(7, "moments against weighted path enumeration; s_4 = 17", ok and s4 == 17, detail)


def check_newlif_chain() -> CheckResult:
    failures = {}
    for spec in indeterminate_families():
        wp = PREC + 64
        tri = coeff_triangle(spec, 120, 40, wp)
        mt = moments(spec, 80, wp)
        try:
            for n in range(41):
                newlif_chain(spec, n, PREC, triangle=tri, moment_table=mt)
        except AssertionError as exc:
            failures[spec.label()] = str(exc)
    return CheckResult(8, "1 <= s_2n b_nn^2 <= c_n^2 s_2n for n <= 40", not failures,
                       {"families": len(indeterminate_families()), "failures": failures})


def check_counting_sandwich() -> CheckResult:
    n = np.arange(0, 400, dtype=float)
    zero_sets = {
        "1/(n+1)^2": -2.0 * np.log(np.arange(1, 200_001, dtype=float)),
        "2^-n": -n * math.log(2.0),
        "exp(-e^n)": -np.exp(n[:40]),
    }
    radii = (0.5, 1.0, 2.0, 10.0, 100.0, 1e4, 1e8, 1e15)
    detail = {}
    ok = True
    for name, lu in zero_sets.items():
        flags = [counting_sandwich(log_u=lu, r=r).sandwich_ok for r in radii]
        detail[name] = flags
        ok &= all(flags)
    return CheckResult(9, "N(r) <= log Pi(r) <= N(r) + Q(r) at 8 radii", ok, detail)


def check_alphahelp() -> CheckResult:
    ns = [int(round(v)) for v in np.geomspace(4, 10_000, 9)]
    failures = []
    for n in ns:
        for alpha in (0.5, 1, 2, 3.7):
            try:
                res = alphahelp_bracket(n, alpha)
            except AssertionError as exc:
                failures.append(str(exc))
                continue
            if alpha == 1 and res.root != n - 1:
                failures.append(f"alpha=1 root {res.root} != {n - 1}")
    return CheckResult(10, "root bracket sign change; alpha = 1 root is n - 1", not failures,
                       {"n": ns, "failures": failures})


# ---------------------------------------------------------------------------
# estimator suite


@lru_cache(maxsize=None)
def _table(family: str, **params):
    return compare_growth(CoeffSpec.of(family, **params))


def _within(x: float, target: float, tol: float) -> bool:
    return abs(x - target) <= tol


def check_power_order() -> CheckResult:
    spec = CoeffSpec.of("power", alpha=2)
    table = compare_growth(spec)
    e = spec_convergence_exponent(spec, "raw").value
    pi_coeffs = scale_from_coeffs(product_coeff_logs(spec_zero_logs(spec, 20_000), 200), "order").rho.value
    routes = {"E(b_n)": e, "Phi_coeffs": table.value("Phi"), "Pi_coeffs": pi_coeffs, "Pi_maxmod": table.value("Pi")}
    ok = all(_within(v, 0.5, 0.05) for v in routes.values()) and table.spread <= 0.1
    return CheckResult(11, "power(2): order 1/2 by every route", ok, {"routes": routes, "spread": table.spread})


def check_power_log() -> CheckResult:
    spec = CoeffSpec.of("power_log", alpha=2)
    e = spec_convergence_exponent(spec, "raw").value
    tau = spec_convergence_type(spec, 1.0)
    ok = _within(e, 1.0, 0.1) and tau.value <= 0.05
    return CheckResult(12, "power_log(2): order 1 and type 0", ok,
                       {"order": e, "type": tau.value, "type_trend": tau.slope})


def check_geom_power() -> CheckResult:
    spec = CoeffSpec.of("geom_power", a="e", alpha=1)
    e = spec_convergence_exponent(spec, "log").value
    lu = spec_zero_logs(spec, 3_000_000, start=1, unit=False)
    ratios = {L: log_product_float(lu, L) / L**2 for L in (1e3, 1e4, 1e5, 1e6)}
    ok = _within(e, 1.0, 0.1) and all(_within(v, 0.5, 0.1) for v in ratios.values())
    return CheckResult(13, "geom_power(e, 1): log order 1 and log type 1/2", ok,
                       {"log_order": e, "type_ratios": ratios})


def check_double_exp() -> CheckResult:
    spec = CoeffSpec.of("double_exp", alpha=1)
    e = spec_convergence_exponent(spec, "loglog").value
    lu = spec_zero_logs(spec, 200, start=1, unit=False)
    lu = lu[np.isfinite(lu)]
    ratios = {}
    for t in (30.0, 40.0, 50.0, 60.0):
        L = math.exp(t)
        ratios[t] = log_product_float(lu, L) / (t * L)
    ok = _within(e, 1.0, 0.15) and all(0.85 <= v <= 1.15 for v in ratios.values())
    return CheckResult(14, "double_exp(1): dlog order 1 and the log log r log r ratio", ok,
                       {"dlog_order": e, "ratios": ratios})


def check_geometric_q() -> CheckResult:
    spec = CoeffSpec.of("geometric_q", q="1/2")
    order = spec_convergence_exponent(spec, "raw").value
    log_order = spec_convergence_exponent(spec, "log").value
    ok = order <= 0.1 and _within(log_order, 1.0, 0.1)
    return CheckResult(15, "geometric_q(1/2): order 0 and log order 1", ok,
                       {"order": order, "log_order": log_order})


def check_chen_ismail() -> CheckResult:
    spec = CoeffSpec.of("chen_ismail")
    e = spec_convergence_exponent(spec, "raw").value
    table = _table("chen_ismail")
    routes = {"E(b_n)": e, "Phi_coeffs": table.value("Phi"), "Pi_maxmod": table.value("Pi")}
    ok = all(_within(v, 0.5, 0.05) for v in routes.values())
    return CheckResult(16, "chen_ismail: order 1/2", ok, {"routes": routes})


def check_power_table() -> CheckResult:
    table = compare_growth(CoeffSpec.of("power", alpha=2))
    names = ("F", "G", "H", "L", "Phi", "E")
    vals = {k: table.value(k) for k in names}
    spread = max(vals.values()) - min(vals.values())
    ok = spread <= 0.1 and table.ordering_ok
    return CheckResult(17, "power(2): companion functions agree; M_L <= M_H <= M_Phi", ok,
                       {"estimates": vals, "spread": spread, "ordering_ok": table.ordering_ok})


def check_paired_determinate() -> CheckResult:
    spec = CoeffSpec.of("paired_determinate", inner=CoeffSpec.of("power", alpha=2))
    v = indeterminacy(spec)
    pair = eval_pq(spec, 0, 100, PREC)
    one = XReal(1, PREC)
    exact = all(abs(pair.P[2 * n].re) == one for n in range(51))
    ok = v.verdict == "determinate_evidence" and v.carleman.trend == "converging" and exact
    return CheckResult(18, "paired (n+1)^2 family: determinate although Carleman converges", ok,
                       {"verdict": v.verdict, "carleman": v.carleman.trend, "P2n_unit": exact})


def check_berezanskii() -> CheckResult:
    detail = {}
    ok = True
    for spec in (CoeffSpec.of("power", alpha=2), CoeffSpec.of("geom_power", a=2, alpha="1/2")):
        rep = berezanskii_bounds(spec, complex(1, 1), 2000)
        good = math.isfinite(rep.c_fit) and rep.Kz_fit > 0 and rep.tends_to_zero["n_over_b"]
        detail[spec.label()] = {"c": rep.c_fit, "Kz": rep.Kz_fit, "n_over_b": rep.tends_to_zero["n_over_b"]}
        ok &= good
    return CheckResult(19, "growth bounds: finite c, positive K_z, n/b_n -> 0", ok, detail)


def check_maxmod_calibration() -> CheckResult:
    order_L = np.linspace(1.0, 200.0, 40)
    log_L = np.exp(np.linspace(1.0, 50.0, 40))
    dlog_L = np.exp(np.exp(np.linspace(1.0, 5.0, 40)))
    got = {
        "order": scale_from_maxmod([(L, math.exp(0.5 * L)) for L in order_L], "order").rho.value,
        "log": scale_from_maxmod([(L, L**2) for L in log_L], "log").rho.value,
        "dlog": scale_from_maxmod([(L, math.log(L) * L) for L in dlog_L], "dlog").rho.value,
    }
    ok = _within(got["order"], 0.5, 0.02) and _within(got["log"], 1.0, 0.05) and _within(got["dlog"], 1.0, 0.1)
    return CheckResult(20, "synthetic maxmod streams recover 0.5 / 1 / 1", ok, got)


CHECKS: dict[int, Callable[[], CheckResult]] = {
    1: check_wronskian,
    2: check_unimodularity,
    3: check_decomposition,
    4: check_parseval,
    5: check_leading_coefficient,
    6: check_shifted,
    7: check_moments,
    8: check_newlif_chain,
    9: check_counting_sandwich,
    10: check_alphahelp,
    11: check_power_order,
    12: check_power_log,
    13: check_geom_power,
    14: check_double_exp,
    15: check_geometric_q,
    16: check_chen_ismail,
    17: check_power_table,
    18: check_paired_determinate,
    19: check_berezanskii,
    20: check_maxmod_calibration,
}

SUITES = {
    "identities": tuple(range(1, 10)),
    "appendix": (10,),
    "paper-examples": tuple(range(11, 21)),
    "all": tuple(range(1, 21)),
}


def run_check(number: int) -> CheckResult:
    t0 = time.perf_counter()
    try:
        res = CHECKS[number]()
    except Exception as exc:  # a crash is a failed check, reported with its cause
        res = CheckResult(number, CHECKS[number].__name__, False, {"error": f"{type(exc).__name__}: {exc}"})
    res.seconds = time.perf_counter() - t0
    return res


def run_suite(name: str) -> list[CheckResult]:
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; expected one of {sorted(SUITES)}")
    return [run_check(k) for k in SUITES[name]]
