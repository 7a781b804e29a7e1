"""Orthonormal polynomials P_n, Q_n and the quantities built from them.

``P_n`` and ``Q_n`` solve ``z r_n = b_n r_{n+1} + a_n r_n + b_{n-1} r_{n-1}``
with ``P_0 = 1, P_{-1} = 0`` and ``Q_0 = 0, Q_{-1} = -1`` (and ``b_{-1} = 1``).
The forward recurrence is run in extended precision and guarded by the
Wronskian ``P_{n-1} Q_n - P_n Q_{n-1} = 1/b_{n-1}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from mpmath import libmp as _L

from .errors import NumericalInstabilityError
from .sequences import CoeffSpec, coeff_arrays
from .xreal import DEFAULT_PREC, XComplex, XReal, sqrt_x

__all__ = [
    "CoeffTriangle",
    "KernelReport",
    "MomentTable",
    "PolyPair",
    "DRIFT_ABORT",
    "coeff_triangle",
    "eval_pq",
    "kernel_trace",
    "moments",
]

DRIFT_ABORT = 1e-10
_RND = "n"


@dataclass(frozen=True)
class PolyPair:
    z: XComplex
    P: list[XComplex]
    Q: list[XComplex]
    wronskian_drift: float
    spec: CoeffSpec | None = None

    @property
    def depth(self) -> int:
        return len(self.P) - 1

    def csv_rows(self) -> list[list[str]]:
        rows = [["n", "P_re", "P_im", "Q_re", "Q_im"]]
        for n, (p, q) in enumerate(zip(self.P, self.Q)):
            rows.append([str(n), p.re.to_text(), p.im.to_text(), q.re.to_text(), q.im.to_text()])
        return rows


def _recur(spec: CoeffSpec, z: XComplex, N: int, prec: int, first, prev):
    """Run the forward recurrence from ``(r_0, r_{-1}) = (first, prev)``."""
    a, b, _ = coeff_arrays(spec, N, prec)
    zr = z._z
    out = [first]
    r, rm = first, prev
    for n in range(N):
        bm = _L.fone if n == 0 else b[n - 1]._v
        t = _L.mpc_sub(zr, (a[n]._v, _L.fzero), prec, _RND)
        t = _L.mpc_mul(t, r, prec, _RND)
        t = _L.mpc_sub(t, _L.mpc_mul_mpf(rm, bm, prec, _RND), prec, _RND)
        rn = _L.mpc_div_mpf(t, b[n]._v, prec, _RND)
        out.append(rn)
        rm, r = r, rn
    return out


def eval_pq(spec: CoeffSpec, z, N: int, prec: int = DEFAULT_PREC, *, guard: bool = True) -> PolyPair:
    """``P_0..P_N`` and ``Q_0..Q_N`` at ``z`` with the Wronskian drift.

    Raises :class:`NumericalInstabilityError` when the relative drift passes
    ``DRIFT_ABORT`` and ``guard`` is true.
    """
    if N < 1:
        raise ValueError("eval_pq needs N >= 1")
    z = XComplex.coerce(z, prec)
    if z.prec != prec:
        z = XComplex._wrap(tuple(_L.mpf_pos(c, prec, _RND) for c in z._z), prec)
    one = (_L.fone, _L.fzero)
    zero = (_L.fzero, _L.fzero)
    P = _recur(spec, z, N, prec, one, zero)
    Q = _recur(spec, z, N, prec, zero, (_L.fnone, _L.fzero))
    _, b, _ = coeff_arrays(spec, N, prec)
    drift = 0.0
    wp = prec + 8
    for n in range(1, N + 1):
        w = _L.mpc_sub(_L.mpc_mul(P[n - 1], Q[n], wp), _L.mpc_mul(P[n], Q[n - 1], wp), wp)
        w = _L.mpc_mul_mpf(w, b[n - 1]._v, wp)
        dev = _L.mpc_abs(_L.mpc_sub(w, one, wp), 53)
        d = _L.to_float(dev) if dev != _L.fzero else 0.0
        if d > drift:
            drift = d
    if guard and drift > DRIFT_ABORT:
        raise NumericalInstabilityError(
            f"Wronskian drift {drift:.3e} exceeds {DRIFT_ABORT:.0e} for {spec.label()} at N={N}"
        )
    wrap = XComplex._wrap
    return PolyPair(
        z=z,
        P=[wrap(v, prec) for v in P],
        Q=[wrap(v, prec) for v in Q],
        wronskian_drift=drift,
        spec=spec,
    )


# ---------------------------------------------------------------------------
# coefficient triangle


@dataclass(frozen=True)
class CoeffTriangle:
    """``rows[n][k] = b_{k,n}``, the coefficient of ``x^k`` in ``P_n``."""

    rows: list[list[XReal]]
    c: list[XReal]
    c_truncated: list[XReal]
    tail_bound: list[float]
    decay_ratio: list[float]
    reliable: list[bool]

    @property
    def depth(self) -> int:
        return len(self.rows) - 1

    def entry(self, k: int, n: int) -> XReal:
        return self.rows[n][k]

    def column_sq(self, k: int) -> XReal:
        return self.c_truncated[k] * self.c_truncated[k]


def _triangle_rows(spec: CoeffSpec, N: int, prec: int) -> list[list]:
    a, b, _ = coeff_arrays(spec, N, prec)
    rows = [[_L.fone]]
    prev: list = []
    for n in range(N):
        cur = rows[-1]
        an, bn = a[n]._v, b[n]._v
        bm = _L.fone if n == 0 else b[n - 1]._v
        nxt = []
        for k in range(n + 2):
            t = cur[k - 1] if k >= 1 else _L.fzero
            if k <= n and an != _L.fzero:
                t = _L.mpf_sub(t, _L.mpf_mul(an, cur[k], prec, _RND), prec, _RND)
            if k <= n - 1:
                t = _L.mpf_sub(t, _L.mpf_mul(bm, prev[k], prec, _RND), prec, _RND)
            nxt.append(_L.mpf_div(t, bn, prec, _RND))
        prev = cur
        rows.append(nxt)
    return rows


def _decay(col: list) -> float:
    """Geometric decay ratio of the last nonzero entries of a column."""
    nz = [(i, v) for i, v in enumerate(col) if v != _L.fzero]
    if len(nz) < 3:
        return math.inf
    (i1, v1), (i2, v2) = nz[-2], nz[-1]
    l1 = XReal._wrap(_L.mpf_abs(v1), 64).ln_float()
    l2 = XReal._wrap(_L.mpf_abs(v2), 64).ln_float()
    return math.exp((l2 - l1) / (i2 - i1))


def coeff_triangle(spec: CoeffSpec, N: int, K: int | None = None, prec: int = DEFAULT_PREC) -> CoeffTriangle:
    """Triangle ``b_{k,n}`` for ``0 <= k <= n <= N`` and column norms ``c_0..c_K``.

    ``c_truncated[k]`` is the exact finite sum over ``n <= N``; ``c[k]``
    adds a geometric tail estimate from the observed decay ratio.  Columns
    whose ratio exceeds 0.9 (or whose last decade still carries more than
    ``10^{-2p/3}`` of the mass) are flagged unreliable.
    """
    if K is None:
        K = N // 2
    if K > N:
        raise ValueError("column count K must be <= N")
    raw = _triangle_rows(spec, N, prec)
    wp = prec + 16
    share_lim = 10.0 ** (-2 * prec * 0.30103 / 3)
    c, ct, tails, ratios, ok = [], [], [], [], []
    for k in range(K + 1):
        col = [raw[n][k] for n in range(k, N + 1)]
        s = _L.fzero
        last = _L.fzero
        cut = max(k, N - max((N - k) // 10, 1))
        for i, v in enumerate(col):
            sq = _L.mpf_mul(v, v, wp)
            s = _L.mpf_add(s, sq, wp)
            if k + i > cut:
                last = _L.mpf_add(last, sq, wp)
        ratio = _decay(col)
        s_x = XReal._wrap(_L.mpf_pos(s, prec, _RND), prec)
        tail = 0.0
        if 0 < ratio < 1:
            vN = XReal._wrap(_L.mpf_abs(col[-1]), prec)
            tail_x = vN * vN * XReal(ratio * ratio / (1 - ratio * ratio))
            tail = float(tail_x / s_x) if s_x else math.inf
            total = s_x + tail_x
        else:
            total = s_x
            tail = math.inf
        share = float(XReal._wrap(last, wp) / s_x) if s != _L.fzero else math.inf
        ct.append(sqrt_x(s_x))
        c.append(sqrt_x(total))
        tails.append(tail)
        ratios.append(ratio)
        ok.append(ratio <= 0.9 and share <= share_lim)
    rows = [[XReal._wrap(v, prec) for v in row] for row in raw]
    return CoeffTriangle(rows=rows, c=c, c_truncated=ct, tail_bound=tails, decay_ratio=ratios, reliable=ok)


# ---------------------------------------------------------------------------
# moments


@dataclass(frozen=True)
class MomentTable:
    s: list[XReal]
    source: str = "jacobi_power"
    truncation: int = 0

    def even_root_monotone(self) -> bool:
        """``s_{2n}^{1/(2n)}`` nondecreasing for ``n >= 1`` over the table."""
        prev = -math.inf
        for n in range(1, (len(self.s) - 1) // 2 + 1):
            v = self.s[2 * n].ln_float() / (2 * n)
            if v < prev - 1e-12 * max(1.0, abs(prev)):
                return False
            prev = v
        return True

    def csv_rows(self) -> list[list[str]]:
        return [["m", "s_m"]] + [[str(m), v.to_text()] for m, v in enumerate(self.s)]


def moments(spec: CoeffSpec, M: int, prec: int = DEFAULT_PREC) -> MomentTable:
    """``s_0..s_M`` as ``<e_0, J^m e_0>`` using the monic recurrence.

    In the monic basis ``x p_k = p_{k+1} + a_k p_k + b_{k-1}^2 p_{k-1}`` the
    coordinates of ``x^m`` stay supported on ``0..m`` and ``s_m`` is the
    ``p_0`` coordinate.  Working with ``b_k^2`` keeps rational families exact.
    """
    if M < 0:
        raise ValueError("M must be >= 0")
    size = M + 2
    a, _, b2 = coeff_arrays(spec, size, prec)
    av = [v._v for v in a]
    bv = [v._v for v in b2]
    d = [_L.fzero] * (size + 1)
    d[0] = _L.fone
    out = [XReal(1, prec)]
    for m in range(1, M + 1):
        nd = [_L.fzero] * (size + 1)
        for j in range(0, min(m, size) + 1):
            t = d[j - 1] if j >= 1 else _L.fzero
            if av[j] != _L.fzero and d[j] != _L.fzero:
                t = _L.mpf_add(t, _L.mpf_mul(av[j], d[j], prec, _RND), prec, _RND)
            if d[j + 1] != _L.fzero:
                t = _L.mpf_add(t, _L.mpf_mul(bv[j], d[j + 1], prec, _RND), prec, _RND)
            nd[j] = t
        d = nd
        out.append(XReal._wrap(d[0], prec))
    return MomentTable(s=out, source="jacobi_power", truncation=size)


# ---------------------------------------------------------------------------
# reproducing kernel trace


@dataclass(frozen=True)
class KernelReport:
    rho0: XReal
    quadrature_points: int
    parseval_residual: float
    radii: tuple[float, ...] = ()
    residuals: tuple[float, ...] = ()
    series_sums: tuple[XReal, ...] = field(default=(), repr=False)
    valid: bool = True

    def to_dict(self) -> dict:
        return {
            "rho0": self.rho0.to_record(),
            "rho0_float": float(self.rho0),
            "quadrature_points": self.quadrature_points,
            "parseval_residual": self.parseval_residual,
            "radii": list(self.radii),
            "residuals": list(self.residuals),
            "valid": self.valid,
        }


def circle_mean_p2(spec: CoeffSpec, N: int, r, prec: int = DEFAULT_PREC) -> XReal:
    """``(1/2pi) int_0^{2pi} sum_{n<=N} |P_n(r e^{it})|^2 dt`` by the trapezoid rule.

    With ``2N+2`` nodes the rule is exact for the degree-``2N`` trigonometric
    polynomial.  Real coefficients make the integrand even in ``t``, so only
    the nodes in ``[0, pi]`` are evaluated.
    """
    M = 2 * N + 2
    wp = prec + 16
    r = XReal(r, wp) if not isinstance(r, XReal) else r.with_prec(wp)
    a, b, _ = coeff_arrays(spec, N, wp)
    av = [v._v for v in a]
    inv_b = [_L.mpf_div(_L.fone, v._v, wp, _RND) for v in b]
    bm = [_L.fone] + [v._v for v in b]
    mul, add, sub = _L.mpf_mul, _L.mpf_add, _L.mpf_sub
    two_pi = _L.mpf_shift(_L.mpf_pi(wp), 1)
    total = _L.fzero
    half = M // 2
    for j in range(half + 1):
        t = _L.mpf_div(mul(two_pi, _L.from_int(j), wp), _L.from_int(M), wp)
        cos_t, sin_t = _L.mpf_cos_sin(t, wp)
        xr, xi = mul(r._v, cos_t, wp), mul(r._v, sin_t, wp)
        # (pr, pi_) is P_n, (lr, li) is P_{n-1}
        pr, pi_, lr, li = _L.fone, _L.fzero, _L.fzero, _L.fzero
        acc = _L.fone
        for n in range(N):
            ur = sub(xr, av[n], wp)
            tr = sub(sub(mul(ur, pr, wp), mul(xi, pi_, wp), wp), mul(bm[n], lr, wp), wp)
            ti = sub(add(mul(ur, pi_, wp), mul(xi, pr, wp), wp), mul(bm[n], li, wp), wp)
            lr, li = pr, pi_
            pr, pi_ = mul(tr, inv_b[n], wp), mul(ti, inv_b[n], wp)
            acc = add(acc, add(mul(pr, pr, wp), mul(pi_, pi_, wp), wp), wp)
        if 0 < j < half:
            acc = _L.mpf_shift(acc, 1)
        total = add(total, acc, wp)
    return XReal._wrap(_L.mpf_pos(_L.mpf_div(total, _L.from_int(M), wp), prec, _RND), prec)


def kernel_trace(spec: CoeffSpec, N: int, radii=(0.5, 2.0), prec: int = DEFAULT_PREC,
                 triangle: CoeffTriangle | None = None) -> KernelReport:
    """``rho_0 = (1/2pi) int P^2(e^{it}) dt`` with a Parseval cross-check.

    The check compares ``sum_k r^{2k} c_k^2`` (columns truncated at ``n <= N``)
    against the circle mean of ``sum_n |P_n|^2`` at ``r = 1`` and ``radii``.
    """
    tri = triangle if triangle is not None and triangle.depth == N else coeff_triangle(spec, N, N, prec)
    if len(tri.c_truncated) < N + 1:
        tri = coeff_triangle(spec, N, N, prec)
    all_r = (1.0,) + tuple(float(r) for r in radii)
    residuals, sums = [], []
    rho0 = None
    for r in all_r:
        rx = XReal(r, prec)
        r2 = rx * rx
        series = XReal(0, prec)
        w = XReal(1, prec)
        for k in range(N + 1):
            series = series + w * tri.column_sq(k)
            w = w * r2
        quad = circle_mean_p2(spec, N, rx, prec)
        if r == 1.0:
            rho0 = quad
        residuals.append(float(abs(series - quad) / quad))
        sums.append(series)
    valid = all(tri.reliable[: max(1, N // 4)])
    return KernelReport(
        rho0=rho0,
        quadrature_points=2 * N + 2,
        parseval_residual=max(residuals),
        radii=all_r,
        residuals=tuple(residuals),
        series_sums=tuple(sums),
        valid=valid,
    )
