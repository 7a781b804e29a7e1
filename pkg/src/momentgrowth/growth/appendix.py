"""Root bracket for ``h(x) = x^a + a x^{a-1} - n``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from ..errors import DomainError, InvariantViolation

__all__ = ["BracketResult", "alphahelp_bracket"]


@dataclass(frozen=True)
class BracketResult:
    n: int
    alpha: float
    bracket: tuple[float, float]
    root: float
    h_lo: float
    h_hi: float


# near the bracket ends h is a difference of nearly equal terms; for a < 1
# the margin at n^{1/a} - 1 is about n^{1-2/a}, so digits grow with 1/a
_DPS = 60


def _digits(n: int, a: float) -> int:
    if a >= 1:
        return _DPS
    return _DPS + math.ceil(2.0 * math.log10(n) / a)


def _h(x, n: int, a):
    return x**a + a * x ** (a - 1) - n


def alphahelp_bracket(n: int, alpha: float, *, iterations: int = 200) -> BracketResult:
    """Bracket and bisection root of ``h`` for ``n >= 4``.

    The bracket is ``[n^{1/a} - 1, n^{1/a}]`` for ``a > 1``, the single point
    ``n - 1`` for ``a = 1`` and ``[n^{1/a} - 2, n^{1/a} - 1]`` for ``a < 1``.
    A missing sign change raises :class:`InvariantViolation`.
    """
    if n < 4:
        raise DomainError("n must be >= 4")
    if not float(alpha) > 0:
        raise DomainError("alpha must be positive")
    q = Fraction(str(alpha))
    with mpmath.workdps(_digits(n, float(q))):
        a = mpmath.mpf(q.numerator) / q.denominator
        if a == 1:
            root = n - 1
            if _h(mpmath.mpf(root), n, a) != 0:
                raise InvariantViolation(f"h(n-1) != 0 for n={n}")
            return BracketResult(n, 1.0, (float(root), float(root)), float(root), 0.0, 0.0)
        y = mpmath.mpf(n) ** (1 / a)
        lo, hi = (y - 1, y) if a > 1 else (y - 2, y - 1)
        flo, fhi = _h(lo, n, a), _h(hi, n, a)
        if not (flo < 0 < fhi):
            raise InvariantViolation(f"no sign change of h on [{lo}, {hi}] for n={n}, alpha={a}")
        x0, x1 = lo, hi
        for _ in range(iterations):
            mid = (x0 + x1) / 2
            if _h(mid, n, a) < 0:
                x0 = mid
            else:
                x1 = mid
        return BracketResult(n, float(a), (float(lo), float(hi)), float((x0 + x1) / 2), float(flo), float(fhi))
