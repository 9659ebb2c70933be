"""Extended-range binary floating point.

An :class:`ExtReal` is ``sign * significand * 2**exponent`` with a ``prec``-bit
significand and an unbounded integer exponent.  Values too large even for
that (the logarithm of a power tower) are stored in level-index form: a
``height`` ``h`` and a top value ``t`` with ``|x| = exp(exp(...exp(t)))``
(``h`` exponentials).  Height 0 is the ordinary float.

Relative precision is held in the top value, so at height ``h >= 1`` only
``ln^h |x|`` is known to ``prec`` bits.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from functools import total_ordering

from mpmath import libmp

DEFAULT_PRECISION = int(os.environ.get("WREATHDIM_PRECISION", "256"))
MIN_PRECISION = 64

# Height-0 values must have an exponent of at most this many bits.
EXPONENT_CAP_BITS = 1 << 17

_RND = libmp.round_nearest
_EXTRA = 24


def _fits(top: tuple) -> bool:
    if top == libmp.fzero:
        return True
    _, man, exp, bc = top
    return (exp + bc) < (1 << EXPONENT_CAP_BITS)


def _exp_limit(prec: int) -> tuple:
    # exp(t) fits iff t < 2**cap * ln 2
    return libmp.mpf_shift(libmp.mpf_ln2(prec + _EXTRA), EXPONENT_CAP_BITS)


def _mpf_log1p(x: tuple, prec: int) -> tuple:
    """ln(1 + x) for x > -1, without cancellation."""
    if x == libmp.fzero:
        return x
    _, _, exp, bc = x
    if exp + bc < -(prec + 8):
        # ln(1+x) = x - x^2/2 + ...; the quadratic term is below half an ulp
        return libmp.mpf_pos(x, prec, _RND)
    one_plus = libmp.mpf_add(libmp.fone, x)  # exact
    return libmp.mpf_log(one_plus, prec, _RND)


def _mpf_exp(x: tuple, prec: int) -> tuple:
    """exp(x) with explicit reduction x = n ln 2 + r.

    mpmath's own routine switches to an integer power of e for integral
    arguments above 600 bits of precision, which costs ~mag(x) extra bits.
    """
    _, man, exp, bc = x
    mag = exp + bc
    if not man or mag <= 8:
        return libmp.mpf_exp(x, prec, _RND)
    wp = int(prec + mag + _EXTRA)
    n = int(libmp.to_int(libmp.mpf_div(x, libmp.mpf_ln2(wp), wp, libmp.round_floor)))
    r = libmp.mpf_sub(x, libmp.mpf_mul(libmp.from_int(n), libmp.mpf_ln2(wp), wp), wp)
    return libmp.mpf_shift(libmp.mpf_exp(r, prec, _RND), n)


@total_ordering
class ExtReal:
    """Signed real with a ``prec``-bit significand and unbounded range."""

    __slots__ = ("_neg", "_height", "_top", "prec")

    def __init__(self, value=0, prec: int | None = None):
        if prec is None:
            prec = value.prec if isinstance(value, ExtReal) else DEFAULT_PRECISION
        if prec < MIN_PRECISION:
            raise ValueError(f"precision must be at least {MIN_PRECISION} bits, got {prec}")
        self.prec = prec
        if isinstance(value, ExtReal):
            self._neg, self._height, self._top = value._neg, value._height, value._top
            if value.prec > prec and value._height == 0:
                self._top = libmp.mpf_pos(value._top, prec, _RND)
            return
        if isinstance(value, bool):
            value = int(value)
        if isinstance(value, int):
            mpf = libmp.from_int(value, prec, _RND)
        elif isinstance(value, Fraction):
            mpf = libmp.from_rational(value.numerator, value.denominator, prec, _RND)
        elif isinstance(value, float):
            if not math.isfinite(value):
                raise ValueError(f"cannot represent {value!r}")
            mpf = libmp.from_float(value, prec, _RND)
        elif isinstance(value, str):
            mpf = libmp.from_str(value, prec, _RND)
        else:
            raise TypeError(f"cannot convert {type(value).__name__} to ExtReal")
        self._set_height0(mpf)

    def _set_height0(self, mpf: tuple) -> None:
        self._neg = bool(mpf[0]) and mpf != libmp.fzero
        self._height = 0
        self._top = libmp.mpf_abs(mpf)
        if not _fits(self._top):
            self._top = libmp.mpf_log(self._top, self.prec, _RND)
            self._height = 1

    @classmethod
    def _make(cls, neg: bool, height: int, top: tuple, prec: int) -> ExtReal:
        obj = object.__new__(cls)
        obj.prec = prec
        obj._neg = neg and top != libmp.fzero
        while not _fits(top):
            top = libmp.mpf_log(top, prec, _RND)
            height += 1
        if height > 0:
            limit = _exp_limit(prec)
            while height > 0 and libmp.mpf_lt(top, limit):
                lowered = _mpf_exp(top, prec)
                if not _fits(lowered):
                    break
                top = lowered
                height -= 1
        obj._height = height
        obj._top = top
        return obj

    @classmethod
    def _from_mpf(cls, mpf: tuple, prec: int) -> ExtReal:
        neg = bool(mpf[0])
        return cls._make(neg, 0, libmp.mpf_abs(mpf), prec)

    @classmethod
    def tower(cls, height: int, top, *, negative: bool = False, prec: int | None = None) -> ExtReal:
        """``±exp^height(top)`` for a non-negative ``top``."""
        top = ExtReal(top, prec)
        if top._neg or top._height:
            raise ValueError("tower top must be a non-negative height-0 value")
        return cls._make(negative, height, top._top, top.prec)

    # -- inspection -------------------------------------------------------

    @property
    def height(self) -> int:
        return self._height

    @property
    def sign(self) -> int:
        if self._top == libmp.fzero:
            return 0
        return -1 if self._neg else 1

    def is_zero(self) -> bool:
        return self._top == libmp.fzero

    @property
    def top(self) -> ExtReal:
        """The height-0 top value ``ln^height |x|``."""
        return ExtReal._make(False, 0, self._top, self.prec)

    @property
    def exponent(self) -> int:
        """Binary exponent ``e`` with ``|x| = f * 2**e``, ``f`` in [1/2, 1)."""
        self._require_height0("exponent")
        if self.is_zero():
            return 0
        _, _, exp, bc = self._top
        return exp + bc

    @property
    def significand(self) -> Fraction:
        self._require_height0("significand")
        if self.is_zero():
            return Fraction(0)
        _, man, _, bc = self._top
        return Fraction(man, 1 << bc)

    def _require_height0(self, what: str) -> None:
        if self._height:
            raise OverflowError(f"{what} of a height-{self._height} value is not an integer")

    def _signed_mpf(self) -> tuple:
        return libmp.mpf_neg(self._top) if self._neg else self._top

    def with_prec(self, prec: int) -> ExtReal:
        return ExtReal(self, prec)

    # -- conversion -------------------------------------------------------

    def __float__(self) -> float:
        if self._height:
            return -math.inf if self._neg else math.inf
        return libmp.to_float(self._signed_mpf(), rnd=_RND)

    def to_float(self) -> float:
        return float(self)

    def to_fraction(self) -> Fraction:
        self._require_height0("to_fraction")
        p, q = libmp.to_rational(self._signed_mpf())
        return Fraction(int(p), int(q))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __hash__(self) -> int:
        return hash((self._neg, self._height, self._top))

    def __repr__(self) -> str:
        return f"ExtReal({format_ext(self)!r}, prec={self.prec})"

    def __str__(self) -> str:
        return format_ext(self)

    # -- ordering ---------------------------------------------------------

    def _cmp(self, other: ExtReal) -> int:
        sa, sb = self.sign, other.sign
        if sa != sb:
            return -1 if sa < sb else 1
        if sa == 0:
            return 0
        if self._height != other._height:
            c = -1 if self._height < other._height else 1
        else:
            c = libmp.mpf_cmp(self._top, other._top)
        return -c if sa < 0 else c

    def __eq__(self, other) -> bool:
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return self._cmp(other) == 0

    def __lt__(self, other) -> bool:
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return self._cmp(other) < 0

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> ExtReal:
        return ExtReal._make(not self._neg, self._height, self._top, self.prec)

    def __pos__(self) -> ExtReal:
        return self

    def __abs__(self) -> ExtReal:
        return ExtReal._make(False, self._height, self._top, self.prec)

    def __add__(self, other) -> ExtReal:
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return _add(self, other, max(self.prec, other.prec))

    __radd__ = __add__

    def __sub__(self, other) -> ExtReal:
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return _add(self, -other, max(self.prec, other.prec))

    def __rsub__(self, other) -> ExtReal:
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return _add(other, -self, max(self.prec, other.prec))

    def __mul__(self, other) -> ExtReal:
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return _mul(self, other, max(self.prec, other.prec))

    __rmul__ = __mul__

    def __truediv__(self, other) -> ExtReal:
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return _div(self, other, max(self.prec, other.prec))

    def __rtruediv__(self, other) -> ExtReal:
        other = _coerce(other, self.prec)
        if other is NotImplemented:
            return NotImplemented
        return _div(other, self, max(self.prec, other.prec))

    def ln(self) -> ExtReal:
        """Natural logarithm; requires a positive value."""
        if self.sign <= 0:
            raise ValueError("logarithm of a non-positive value")
        if self._height:
            return ExtReal._make(False, self._height - 1, self._top, self.prec)
        return ExtReal._from_mpf(libmp.mpf_log(self._top, self.prec, _RND), self.prec)

    log = ln

    def exp(self) -> ExtReal:
        """Exponential.  Raises ``ArithmeticError`` below the representable range."""
        prec = self.prec
        if not self._neg:
            if self._height:
                return ExtReal._make(False, self._height + 1, self._top, prec)
            if libmp.mpf_lt(self._top, _exp_limit(prec)):
                return ExtReal._from_mpf(_mpf_exp(self._top, prec), prec)
            return ExtReal._make(False, 1, self._top, prec)
        if self._height or not libmp.mpf_lt(self._top, _exp_limit(prec)):
            raise ArithmeticError("exp underflows the representable range; keep the value as a logarithm")
        return ExtReal._from_mpf(_mpf_exp(libmp.mpf_neg(self._top), prec), prec)

    def log1p(self) -> ExtReal:
        """ln(1 + x) for x > -1."""
        self._require_height0("log1p")
        if self._neg and not libmp.mpf_lt(self._top, libmp.fone):
            raise ValueError("log1p requires x > -1")
        return ExtReal._from_mpf(_mpf_log1p(self._signed_mpf(), self.prec), self.prec)


def _coerce(value, prec: int):
    if isinstance(value, ExtReal):
        return value
    if isinstance(value, (int, Fraction, float)):
        return ExtReal(value, prec)
    return NotImplemented


_cut_cache: dict[int, ExtReal] = {}


def _negligible_log(prec: int) -> ExtReal:
    """ln 2**-(prec + 8): relative contributions below this vanish on rounding."""
    cut = _cut_cache.get(prec)
    if cut is None:
        ln2 = ExtReal._from_mpf(libmp.mpf_ln2(prec), prec)
        cut = ln2 * -(prec + 8)
        _cut_cache[prec] = cut
    return cut


def _abs_log(x: ExtReal) -> ExtReal:
    return abs(x).ln()


def _add(x: ExtReal, y: ExtReal, prec: int) -> ExtReal:
    if y.is_zero():
        return ExtReal(x, prec) if x.prec != prec else x
    if x.is_zero():
        return ExtReal(y, prec) if y.prec != prec else y
    if x._height == 0 and y._height == 0:
        return ExtReal._from_mpf(libmp.mpf_add(x._signed_mpf(), y._signed_mpf(), prec, _RND), prec)
    if abs(x)._cmp(abs(y)) < 0:
        x, y = y, x
    lx = _abs_log(x)
    d = _abs_log(y) - lx
    if d < _negligible_log(prec):
        return x
    ratio = d.exp()
    if x._neg != y._neg:
        if ratio == 1:
            return ExtReal(0, prec)
        correction = (-ratio).log1p()
    else:
        correction = ratio.log1p()
    mag = (lx + correction).exp()
    return -mag if x._neg else mag


def _mul(x: ExtReal, y: ExtReal, prec: int) -> ExtReal:
    neg = x._neg != y._neg
    if x.is_zero() or y.is_zero():
        return ExtReal(0, prec)
    if x._height == 0 and y._height == 0:
        return ExtReal._from_mpf(libmp.mpf_mul(x._signed_mpf(), y._signed_mpf(), prec, _RND), prec)
    mag = (_abs_log(x) + _abs_log(y)).exp()
    return -mag if neg else mag


def _div(x: ExtReal, y: ExtReal, prec: int) -> ExtReal:
    if y.is_zero():
        raise ZeroDivisionError("ExtReal division by zero")
    if x.is_zero():
        return ExtReal(0, prec)
    neg = x._neg != y._neg
    if x._height == 0 and y._height == 0:
        return ExtReal._from_mpf(libmp.mpf_div(x._signed_mpf(), y._signed_mpf(), prec, _RND), prec)
    mag = (_abs_log(x) - _abs_log(y)).exp()
    return -mag if neg else mag


# -- formatting -------------------------------------------------------------

def format_ext(x: ExtReal, digits: int = 17) -> str:
    """Decimal scientific notation, or ``exp^h(...)`` for heights above 0.

    Unlike ``mpmath.libmp.to_str`` this never materializes ``10**exponent``,
    so it is cheap for exponents with thousands of digits.
    """
    if x.height:
        inner = format_ext(x.top, digits)
        body = f"exp({inner})" if x.height == 1 else f"exp^{x.height}({inner})"
        return "-" + body if x.sign < 0 else body
    if x.is_zero():
        return "0.0"
    sign = "-" if x.sign < 0 else ""
    e2 = x.exponent
    if abs(e2) > 1 << 50:
        inner = format_ext(abs(x).ln(), digits)
        return f"{sign}exp({inner})"
    if abs(e2) < 1000:
        return sign + repr(abs(float(x))) if digits == 17 else sign + libmp.to_str(x._top, digits)
    wp = x.prec + e2.bit_length() + 16
    log10 = libmp.mpf_div(libmp.mpf_log(x._top, wp, _RND), libmp.mpf_log(libmp.from_int(10), wp, _RND), wp, _RND)
    e10 = libmp.to_int(libmp.mpf_floor(log10))
    frac = libmp.mpf_sub(log10, libmp.from_int(e10), wp, _RND)
    mant = libmp.mpf_pow(libmp.from_int(10), frac, x.prec, _RND)
    mant_str = libmp.to_str(mant, digits)
    if "e" in mant_str:  # rounding pushed 9.99.. to 10
        mant_str = libmp.to_str(libmp.mpf_div(mant, libmp.from_int(10), x.prec, _RND), digits)
        e10 += 1
    return f"{sign}{mant_str}e{e10:+d}"
