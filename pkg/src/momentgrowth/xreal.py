"""Extended-range real and complex numbers.

An :class:`XReal` is ``sign * significand * 2**exponent`` with a ``prec``-bit
significand in ``[1, 2)`` and an exponent that is an unbounded Python integer,
so values such as ``exp(exp(1000))`` are representable exactly to ``prec``
bits.  Every operation rounds to nearest-even.

The kernels are mpmath's raw ``libmp`` routines operating on normalized
``(sign, man, exp, bc)`` tuples; this module owns the value type, the
precision policy, coercions and the serialization format.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational

from mpmath import libmp as _L

from .errors import DomainError

__all__ = [
    "DEFAULT_PREC",
    "XReal",
    "XComplex",
    "arith",
    "as_xreal",
    "exp_x",
    "log1p_x",
    "log_x",
    "sqrt_x",
]

DEFAULT_PREC = 128
_RND = "n"
_GUARD = 32

_fzero = _L.fzero
_fone = _L.fone
_fnone = _L.fnone


def _raw(value, prec: int):
    """Convert a Python scalar to a raw mpf rounded to ``prec`` bits."""
    if isinstance(value, XReal):
        return _L.mpf_pos(value._v, prec, _RND)
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return _L.from_int(value, prec, _RND)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"non-finite float {value!r}")
        return _L.from_float(value, prec, _RND)
    if isinstance(value, Rational):
        return _L.from_rational(int(value.numerator), int(value.denominator), prec, _RND)
    if isinstance(value, str):
        return _parse(value.strip(), prec)
    raise TypeError(f"cannot convert {type(value).__name__} to XReal")


def _parse(text: str, prec: int):
    if text.startswith("-log2:"):
        return _L.mpf_neg(_parse(text[1:], prec))
    if text.startswith("log2:"):
        # 2**t for a decimal t; exact when t is an integer
        t = text[5:].strip()
        try:
            return _L.mpf_shift(_fone, int(t))
        except ValueError:
            wp = prec + _GUARD + 4 * len(t)
            tv = _L.from_str(t, wp, _RND)
            return _L.mpf_exp(_L.mpf_mul(tv, _L.mpf_ln2(wp), wp), prec, _RND)
    if "/" in text:
        return _raw(Fraction(text), prec)
    try:
        return _L.from_str(text, prec, _RND)
    except ValueError as exc:
        raise DomainError(f"cannot parse {text!r} as a real number") from exc


def _exponent(v) -> int:
    # value = man * 2**exp with bc bits, so the binary exponent is exp+bc-1
    return v[2] + v[3] - 1


class XReal:
    """Immutable extended-range real number.

    Binary operations run at the larger of the two operand precisions;
    plain Python numbers are coerced exactly and take the other operand's
    precision.
    """

    __slots__ = ("_v", "prec")

    def __init__(self, value=0, prec: int = DEFAULT_PREC):
        if prec < 2:
            raise DomainError("precision must be at least 2 bits")
        object.__setattr__(self, "_v", _raw(value, prec))
        object.__setattr__(self, "prec", int(prec))

    @classmethod
    def _wrap(cls, v, prec: int) -> "XReal":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_v", v)
        object.__setattr__(obj, "prec", prec)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("XReal is immutable")

    def __reduce__(self):
        return (XReal.from_record, (self.to_record(),))

    # -- structure -----------------------------------------------------

    @property
    def sign(self) -> int:
        if self._v == _fzero:
            return 0
        return -1 if self._v[0] else 1

    @property
    def exponent(self) -> int:
        """Binary exponent ``e`` with ``|x| = significand * 2**e``."""
        if self._v == _fzero:
            return 0
        return _exponent(self._v)

    @property
    def significand_bits(self) -> int:
        """The ``prec``-bit integer ``M`` with ``significand = M / 2**(prec-1)``."""
        if self._v == _fzero:
            return 1 << (self.prec - 1)
        man, bc = int(self._v[1]), self._v[3]
        return man << (self.prec - bc)

    @property
    def significand(self) -> Fraction:
        return Fraction(self.significand_bits, 1 << (self.prec - 1))

    def is_zero(self) -> bool:
        return self._v == _fzero

    def with_prec(self, prec: int) -> "XReal":
        return XReal._wrap(_L.mpf_pos(self._v, prec, _RND), prec)

    # -- serialization -------------------------------------------------

    def to_record(self) -> dict:
        return {
            "sign": self.sign,
            "sig_hex": format(self.significand_bits, "x"),
            "exp2": str(self.exponent),
        }

    @classmethod
    def from_record(cls, record: dict) -> "XReal":
        sign = int(record["sign"])
        bits = int(record["sig_hex"], 16)
        prec = bits.bit_length()
        if sign == 0:
            return cls._wrap(_fzero, prec)
        e = int(record["exp2"])
        v = _L.from_man_exp(-bits if sign < 0 else bits, e - (prec - 1))
        return cls._wrap(v, prec)

    def to_decimal(self, digits: int = 12) -> str:
        """Render as ``m × 10^k`` with an exponent of unbounded width."""
        if self._v == _fzero:
            return "0 × 10^0"
        e2 = abs(self.exponent) + 1
        wp = self.prec + e2.bit_length() + _GUARD
        lg10 = _L.mpf_div(_L.mpf_log(_L.mpf_abs(self._v), wp, _RND), _L.mpf_ln10(wp), wp, _RND)
        k = int(_L.to_int(_L.mpf_floor(lg10, wp)))
        frac = _L.mpf_sub(lg10, _L.from_int(k), wp)
        m = _L.mpf_exp(_L.mpf_mul(frac, _L.mpf_ln10(wp), wp), wp)
        mtxt = _L.to_str(m, digits)
        if mtxt.startswith("10.") or mtxt == "10.0":
            mtxt, k = _L.to_str(_L.mpf_shift(_L.mpf_div(m, _L.from_int(10), wp), 0), digits), k + 1
        sign = "-" if self._v[0] else ""
        return f"{sign}{mtxt} × 10^{k}"

    def to_text(self, digits: int | None = None) -> str:
        """Decimal text, or ``[-]log2:<t>`` once the value leaves float range."""
        if self._v == _fzero:
            return "0"
        if digits is None:
            digits = int(self.prec * 0.30103) + 3
        if abs(self.exponent) < 1000:
            return _L.to_str(self._v, digits)
        digits += len(str(abs(self.exponent)))
        wp = self.prec + abs(self.exponent).bit_length() + _GUARD
        lg2 = _L.mpf_div(_L.mpf_log(_L.mpf_abs(self._v), wp, _RND), _L.mpf_ln2(wp), wp, _RND)
        sign = "-" if self._v[0] else ""
        return f"{sign}log2:{_L.to_str(lg2, digits)}"

    def to_fraction(self) -> Fraction:
        s, man, exp, _ = self._v
        if self._v == _fzero:
            return Fraction(0)
        val = Fraction(int(man)) * (Fraction(2) ** exp)
        return -val if s else val

    def __float__(self) -> float:
        if self._v == _fzero:
            return 0.0
        e = _exponent(self._v)
        if e > 1100:
            return -math.inf if self._v[0] else math.inf
        if e < -1100:
            return -0.0 if self._v[0] else 0.0
        return _L.to_float(self._v)

    def __int__(self) -> int:
        return int(_L.to_int(self._v))

    def __repr__(self) -> str:
        if self._v == _fzero:
            return "XReal(0)"
        if abs(self.exponent) < 3000:
            return f"XReal('{_L.to_str(self._v, 20)}')"
        return f"XReal({self.to_decimal(20)!r})"

    def __str__(self) -> str:
        if self._v == _fzero:
            return "0"
        if abs(self.exponent) < 3000:
            return _L.to_str(self._v, max(6, int(self.prec * 0.30103)))
        return self.to_decimal(max(6, int(self.prec * 0.30103)))

    # -- arithmetic ----------------------------------------------------

    def _other(self, other):
        if isinstance(other, XReal):
            return other._v, max(self.prec, other.prec)
        if isinstance(other, XComplex):
            return NotImplemented, 0
        if isinstance(other, int) and not isinstance(other, bool):
            return _L.from_int(other), self.prec
        try:
            return _raw(other, self.prec + 64), self.prec
        except TypeError:
            return NotImplemented, 0

    def __add__(self, other):
        v, p = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return XReal._wrap(_L.mpf_add(self._v, v, p, _RND), p)

    __radd__ = __add__

    def __sub__(self, other):
        v, p = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return XReal._wrap(_L.mpf_sub(self._v, v, p, _RND), p)

    def __rsub__(self, other):
        v, p = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return XReal._wrap(_L.mpf_sub(v, self._v, p, _RND), p)

    def __mul__(self, other):
        v, p = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        return XReal._wrap(_L.mpf_mul(self._v, v, p, _RND), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        v, p = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        if v == _fzero:
            raise DomainError("division by zero")
        return XReal._wrap(_L.mpf_div(self._v, v, p, _RND), p)

    def __rtruediv__(self, other):
        v, p = self._other(other)
        if v is NotImplemented:
            return NotImplemented
        if self._v == _fzero:
            raise DomainError("division by zero")
        return XReal._wrap(_L.mpf_div(v, self._v, p, _RND), p)

    def __neg__(self):
        return XReal._wrap(_L.mpf_neg(self._v), self.prec)

    def __pos__(self):
        return self

    def __abs__(self):
        return XReal._wrap(_L.mpf_abs(self._v), self.prec)

    def __pow__(self, other):
        if isinstance(other, int) and not isinstance(other, bool):
            if other < 0 and self._v == _fzero:
                raise DomainError("zero to a negative power")
            return XReal._wrap(_L.mpf_pow_int(self._v, other, self.prec, _RND), self.prec)
        y = as_xreal(other, self.prec)
        if self._v == _fzero:
            if y.sign > 0:
                return self
            raise DomainError("zero to a non-positive power")
        if self.sign < 0:
            raise DomainError("negative base with non-integer exponent")
        return exp_x(log_x(self) * y)

    def mul_pow2(self, k: int) -> "XReal":
        return XReal._wrap(_L.mpf_shift(self._v, k), self.prec)

    # -- comparisons ---------------------------------------------------

    def _cmp(self, other) -> int:
        if isinstance(other, XReal):
            return _L.mpf_cmp(self._v, other._v)
        if isinstance(other, float) and math.isinf(other):
            return -1 if other > 0 else 1
        return _L.mpf_cmp(self._v, _raw(other, self.prec + 64))

    def __eq__(self, other):
        try:
            return self._cmp(other) == 0
        except TypeError:
            return NotImplemented

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __hash__(self):
        return hash(self._v)

    def __bool__(self):
        return self._v != _fzero

    # -- transcendental shortcuts -------------------------------------

    def sqrt(self) -> "XReal":
        return sqrt_x(self)

    def log(self) -> "XReal":
        return log_x(self)

    def exp(self) -> "XReal":
        return exp_x(self)

    def log1p(self) -> "XReal":
        return log1p_x(self)

    def log2abs(self) -> float:
        """``log2 |x|`` as a float (exact for the exponent part)."""
        if self._v == _fzero:
            return -math.inf
        man, exp, bc = int(self._v[1]), self._v[2], self._v[3]
        e = exp + bc
        try:
            fe = float(e)
        except OverflowError:
            return math.inf if e > 0 else -math.inf
        return fe + math.log2(man / (1 << bc))

    def ln_float(self) -> float:
        """Natural log of ``|x|`` as a float; overflows only past 1e308."""
        return self.log2abs() * math.log(2.0)


def as_xreal(value, prec: int = DEFAULT_PREC) -> XReal:
    if isinstance(value, XReal):
        return value
    return XReal(value, prec)


class XComplex:
    """Immutable pair of :class:`XReal` components sharing one precision."""

    __slots__ = ("_z", "prec")

    def __init__(self, re=0, im=0, prec: int = DEFAULT_PREC):
        if isinstance(re, complex) and im == 0:
            re, im = re.real, re.imag
        object.__setattr__(self, "_z", (_raw(re, prec), _raw(im, prec)))
        object.__setattr__(self, "prec", int(prec))

    @classmethod
    def _wrap(cls, z, prec: int) -> "XComplex":
        obj = object.__new__(cls)
        object.__setattr__(obj, "_z", z)
        object.__setattr__(obj, "prec", prec)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("XComplex is immutable")

    def __reduce__(self):
        return (XComplex.from_record, (self.to_record(),))

    @classmethod
    def coerce(cls, value, prec: int = DEFAULT_PREC) -> "XComplex":
        if isinstance(value, XComplex):
            return value
        if isinstance(value, XReal):
            return cls._wrap((value._v, _fzero), value.prec)
        if isinstance(value, complex):
            return cls(value.real, value.imag, prec)
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return cls(value[0], value[1], prec)
        return cls(value, 0, prec)

    @property
    def re(self) -> XReal:
        return XReal._wrap(self._z[0], self.prec)

    @property
    def im(self) -> XReal:
        return XReal._wrap(self._z[1], self.prec)

    def to_record(self) -> dict:
        return {"re": self.re.to_record(), "im": self.im.to_record()}

    @classmethod
    def from_record(cls, record: dict) -> "XComplex":
        re = XReal.from_record(record["re"])
        im = XReal.from_record(record["im"])
        return cls._wrap((re._v, im._v), max(re.prec, im.prec))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __repr__(self) -> str:
        return f"XComplex({self.re!s}, {self.im!s})"

    def is_zero(self) -> bool:
        return self._z[0] == _fzero and self._z[1] == _fzero

    def is_real(self) -> bool:
        return self._z[1] == _fzero

    def _other(self, other):
        if isinstance(other, XComplex):
            return other._z, max(self.prec, other.prec)
        if isinstance(other, XReal):
            return (other._v, _fzero), max(self.prec, other.prec)
        if isinstance(other, complex):
            return (_raw(other.real, self.prec + 64), _raw(other.imag, self.prec + 64)), self.prec
        try:
            return (_raw(other, self.prec + 64), _fzero), self.prec
        except TypeError:
            return NotImplemented, 0

    def __add__(self, other):
        w, p = self._other(other)
        if w is NotImplemented:
            return NotImplemented
        return XComplex._wrap(_L.mpc_add(self._z, w, p, _RND), p)

    __radd__ = __add__

    def __sub__(self, other):
        w, p = self._other(other)
        if w is NotImplemented:
            return NotImplemented
        return XComplex._wrap(_L.mpc_sub(self._z, w, p, _RND), p)

    def __rsub__(self, other):
        w, p = self._other(other)
        if w is NotImplemented:
            return NotImplemented
        return XComplex._wrap(_L.mpc_sub(w, self._z, p, _RND), p)

    def __mul__(self, other):
        w, p = self._other(other)
        if w is NotImplemented:
            return NotImplemented
        if w[1] == _fzero:
            return XComplex._wrap(_L.mpc_mul_mpf(self._z, w[0], p, _RND), p)
        return XComplex._wrap(_L.mpc_mul(self._z, w, p, _RND), p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        w, p = self._other(other)
        if w is NotImplemented:
            return NotImplemented
        if w[0] == _fzero and w[1] == _fzero:
            raise DomainError("division by zero")
        if w[1] == _fzero:
            return XComplex._wrap(_L.mpc_div_mpf(self._z, w[0], p, _RND), p)
        return XComplex._wrap(_L.mpc_div(self._z, w, p, _RND), p)

    def __rtruediv__(self, other):
        w, p = self._other(other)
        if w is NotImplemented:
            return NotImplemented
        if self.is_zero():
            raise DomainError("division by zero")
        return XComplex._wrap(_L.mpc_div(w, self._z, p, _RND), p)

    def __neg__(self):
        return XComplex._wrap(_L.mpc_neg(self._z), self.prec)

    def __pos__(self):
        return self

    def __eq__(self, other):
        w, _ = self._other(other)
        if w is NotImplemented:
            return NotImplemented
        return _L.mpf_eq(self._z[0], w[0]) and _L.mpf_eq(self._z[1], w[1])

    def __hash__(self):
        return hash(self._z)

    def conj(self) -> "XComplex":
        return XComplex._wrap(_L.mpc_conjugate(self._z, self.prec, _RND), self.prec)

    def abs2(self) -> XReal:
        re, im = self._z
        p = self.prec
        return XReal._wrap(
            _L.mpf_add(_L.mpf_mul(re, re), _L.mpf_mul(im, im), p, _RND), p
        )

    def __abs__(self) -> XReal:
        return XReal._wrap(_L.mpc_abs(self._z, self.prec, _RND), self.prec)

    def sqrt(self) -> "XComplex":
        return XComplex._wrap(_L.mpc_sqrt(self._z, self.prec, _RND), self.prec)


# ---------------------------------------------------------------------------
# module-level operations


def sqrt_x(x) -> XReal:
    x = as_xreal(x)
    if x._v[0] and x._v != _fzero:
        raise DomainError("sqrt of a negative real")
    return XReal._wrap(_L.mpf_sqrt(x._v, x.prec, _RND), x.prec)


def log_x(x) -> XReal:
    x = as_xreal(x)
    if x._v == _fzero or x._v[0]:
        raise DomainError("log requires a positive argument")
    p = x.prec
    return XReal._wrap(_L.mpf_pos(_L.mpf_log(x._v, p + _GUARD, _RND), p, _RND), p)


def exp_x(x) -> XReal:
    x = as_xreal(x)
    p = x.prec
    return XReal._wrap(_L.mpf_pos(_L.mpf_exp(x._v, p + _GUARD, _RND), p, _RND), p)


def log1p_x(x) -> XReal:
    """``log(1 + x)`` accurate for tiny and for astronomically large ``x``."""
    x = as_xreal(x)
    v, p = x._v, x.prec
    if v == _fzero:
        return x
    if _L.mpf_le(v, _fnone):
        raise DomainError("log1p requires x > -1")
    e = _exponent(v)
    wp = p + _GUARD
    if e > p:
        # log(1+x) = log x + log(1 + 1/x), and 1/x < 2**-p
        inv = _L.mpf_div(_fone, v, wp, _RND)
        tail = _L.mpf_sub(inv, _L.mpf_shift(_L.mpf_mul(inv, inv, wp), -1), wp)
        return XReal._wrap(_L.mpf_add(_L.mpf_log(v, wp, _RND), tail, p, _RND), p)
    if e < -(p + 8):
        sq = _L.mpf_shift(_L.mpf_mul(v, v, wp), -1)
        return XReal._wrap(_L.mpf_sub(v, sq, p, _RND), p)
    s = _L.mpf_add(_fone, v, 0)  # exact
    return XReal._wrap(_L.mpf_pos(_L.mpf_log(s, wp + max(0, -e), _RND), p, _RND), p)


_REAL_OPS = ("add", "sub", "mul", "div", "neg", "abs", "sqrt")


def arith(a, b=None, op: str = "add"):
    """Dispatch one of the elementary operations on XReal or XComplex values."""
    if op not in _REAL_OPS:
        raise DomainError(f"unknown operation {op!r}")
    if op == "neg":
        return -a
    if op == "abs":
        return abs(a)
    if op == "sqrt":
        return a.sqrt() if isinstance(a, XComplex) else sqrt_x(a)
    if b is None:
        raise DomainError(f"operation {op!r} needs two operands")
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    return a / b
