"""Positive integers that may outgrow memory.

A :class:`Magnitude` is exact (a Python ``int``) while its bit length stays
within the promotion threshold, and is otherwise carried by its natural
logarithm as an :class:`ExtReal`.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering

import gmpy2

from ..errors import DomainError, InconsistencyError
from .extreal import DEFAULT_PRECISION, ExtReal, format_ext

DEFAULT_THRESHOLD = 1 << 20


@total_ordering
class Magnitude:
    """``Exact(n)`` or ``LogOf(ln n)``.

    ``err_log`` optionally records ln of a relative error bound picked up by
    dropping a fractional part on the log path.
    """

    __slots__ = ("_exact", "_log", "err_log")

    def __init__(self, exact: int | None = None, log: ExtReal | None = None, err_log: ExtReal | None = None):
        if (exact is None) == (log is None):
            raise ValueError("exactly one of exact/log must be given")
        if exact is not None and exact < 0:
            raise DomainError(f"magnitude must be non-negative, got {exact}")
        if log is not None and log.sign < 0:
            raise DomainError("LogOf stores ln(value) for value >= 1")
        self._exact = exact
        self._log = log
        self.err_log = err_log

    @classmethod
    def exact(cls, n: int) -> Magnitude:
        return cls(exact=int(n))

    @classmethod
    def log_of(cls, ln: ExtReal, err_log: ExtReal | None = None) -> Magnitude:
        return cls(log=ln, err_log=err_log)

    @classmethod
    def from_int(cls, n: int, threshold: int = DEFAULT_THRESHOLD, prec: int = DEFAULT_PRECISION) -> Magnitude:
        if n.bit_length() <= threshold:
            return cls(exact=n)
        return cls(log=_ln_int(n, prec))

    @property
    def is_exact(self) -> bool:
        return self._exact is not None

    @property
    def value(self) -> int:
        if self._exact is None:
            raise OverflowError("magnitude is only known by its logarithm")
        return self._exact

    def ln(self, prec: int = DEFAULT_PRECISION) -> ExtReal:
        if self._exact is None:
            return self._log
        if self._exact == 0:
            raise DomainError("ln(0)")
        return _ln_int(self._exact, prec)

    def log2(self, prec: int = DEFAULT_PRECISION) -> ExtReal:
        return self.ln(prec) / _ln2(prec)

    def is_zero(self) -> bool:
        return self._exact == 0

    def __int__(self) -> int:
        return self.value

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            return self._exact == other
        if not isinstance(other, Magnitude):
            return NotImplemented
        if self._exact is not None and other._exact is not None:
            return self._exact == other._exact
        if self._log is not None and other._log is not None:
            return self._log == other._log
        return False

    def __hash__(self) -> int:
        return hash(self._exact) if self._exact is not None else hash(self._log)

    def __lt__(self, other) -> bool:
        if isinstance(other, int):
            other = Magnitude.exact(other)
        if not isinstance(other, Magnitude):
            return NotImplemented
        if self._exact is not None and other._exact is not None:
            return self._exact < other._exact
        if self.is_zero() or other.is_zero():
            return self.is_zero() and not other.is_zero()
        return self.ln() < other.ln()

    def isclose(self, other: Magnitude, rel: ExtReal | float) -> bool:
        """Agreement of the logarithms within relative tolerance ``rel``."""
        if self.is_exact and other.is_exact:
            return self._exact == other._exact
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        a, b = self.ln(), other.ln()
        scale = max(abs(a), abs(b))
        if scale.is_zero():
            return True
        return abs(a - b) <= scale * rel

    def __repr__(self) -> str:
        if self._exact is not None:
            return f"Exact({self._exact if self._exact.bit_length() < 64 else '~2^' + str(self._exact.bit_length())})"
        return f"LogOf({format_ext(self._log)})"

    def to_repr(self) -> str:
        """Decimal digits when exact, ``log2≈x`` otherwise."""
        if self._exact is not None:
            return decimal_digits(self._exact)
        return "log2≈" + format_ext(self.log2(self._log.prec))


def decimal_digits(n: int) -> str:
    # str() refuses ints over 4300 digits
    return gmpy2.mpz(n).digits(10)


_ln2_cache: dict[int, ExtReal] = {}


def _ln2(prec: int) -> ExtReal:
    v = _ln2_cache.get(prec)
    if v is None:
        v = _ln2_cache[prec] = ExtReal(2, prec).ln()
    return v


def _ln_int(n: int, prec: int) -> ExtReal:
    if n <= 0:
        raise DomainError(f"ln of non-positive integer {n}")
    return ExtReal(n, prec + 8).ln().with_prec(prec)


def _ln_fraction(r: Fraction, prec: int) -> ExtReal:
    return ExtReal(r, prec + 8).ln().with_prec(prec)


def _check_alpha(alpha: Fraction) -> Fraction:
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def floor_mul(alpha: Fraction, x: Magnitude, *, prec: int = DEFAULT_PRECISION) -> Magnitude:
    """``floor(alpha * x)``.

    Exact inputs give the exact floor.  On the log path the fractional part is
    dropped, returning ``LogOf(ln(alpha * x))`` with ``err_log = ln(1/(alpha*x))``
    bounding the relative error (zero when ``alpha`` is 0 or 1).
    """
    alpha = _check_alpha(alpha)
    if x.is_exact:
        return Magnitude.exact(alpha.numerator * x.value // alpha.denominator)
    if alpha == 0:
        return Magnitude.exact(0)
    ln = x.ln(prec) + _ln_fraction(alpha, prec) if alpha != 1 else x.ln(prec)
    err = None if alpha.denominator == 1 else -ln
    return Magnitude.log_of(ln, err_log=err)


def mag_pow(base: int, exponent: Magnitude, *, threshold: int = DEFAULT_THRESHOLD,
            prec: int = DEFAULT_PRECISION) -> Magnitude:
    """``base ** exponent``; exact iff the exponent is exact and the result fits."""
    if base < 2:
        raise DomainError(f"base must be at least 2, got {base}")
    if exponent.is_exact:
        e = exponent.value
        if e == 0:
            return Magnitude.exact(1)
        if e <= threshold and e * math.log2(base) <= threshold:
            return Magnitude.exact(base ** e)
        return Magnitude.log_of(ExtReal(e, prec) * _ln_int(base, prec))
    ln = (exponent.ln(prec) + _ln_int(base, prec).ln()).exp()
    return Magnitude.log_of(ln)


def mag_sub_exponent(mtilde: Magnitude, e: Magnitude, *, prec: int = DEFAULT_PRECISION) -> Magnitude:
    """``mtilde - e`` for ``e <= mtilde``.

    The log path evaluates ``ln mtilde + ln(1 - e/mtilde)``; it needs the
    ratio ``e/mtilde`` to be resolvable, i.e. ``ln mtilde`` well below
    ``2**prec``.
    """
    if e.is_zero():
        return mtilde
    if mtilde.is_exact and e.is_exact:
        if e.value > mtilde.value:
            raise InconsistencyError(f"exponent subtraction went negative: {e!r} > {mtilde!r}")
        return Magnitude.exact(mtilde.value - e.value)
    lm, le = mtilde.ln(prec), e.ln(prec)
    d = le - lm
    if d.sign > 0:
        raise InconsistencyError(f"exponent subtraction went negative: {e!r} > {mtilde!r}")
    ratio = d.exp() if d.height == 0 and d > -ExtReal(prec + 8, prec) else ExtReal(0, prec)
    if ratio == 1:
        raise InconsistencyError("exponent subtraction is zero on the log path")
    return Magnitude.log_of(lm + (-ratio).log1p())


def mag_mul(x: Magnitude, y: Magnitude, *, threshold: int = DEFAULT_THRESHOLD,
            prec: int = DEFAULT_PRECISION) -> Magnitude:
    if x.is_exact and y.is_exact:
        return Magnitude.from_int(x.value * y.value, threshold, prec)
    if x.is_zero() or y.is_zero():
        return Magnitude.exact(0)
    return Magnitude.log_of(x.ln(prec) + y.ln(prec))


def mag_scale(x: Magnitude, ratio: Fraction, *, threshold: int = DEFAULT_THRESHOLD,
              prec: int = DEFAULT_PRECISION) -> Magnitude:
    """``ratio * x`` where the product is known to be an integer."""
    ratio = Fraction(ratio)
    if ratio < 0:
        raise DomainError("negative scale")
    if ratio == 0 or x.is_zero():
        return Magnitude.exact(0)
    if x.is_exact:
        num = x.value * ratio.numerator
        if num % ratio.denominator:
            raise InconsistencyError(f"{ratio} * {x!r} is not an integer")
        return Magnitude.from_int(num // ratio.denominator, threshold, prec)
    if ratio == 1:
        return x
    return Magnitude.log_of(x.ln(prec) + _ln_fraction(ratio, prec))


def log_sum_accumulate(acc: ExtReal | None, term: ExtReal | None) -> ExtReal | None:
    """``ln(exp(acc) + exp(term))``; ``None`` is the empty sum."""
    if acc is None:
        return term
    if term is None:
        return acc
    hi, lo = (acc, term) if acc >= term else (term, acc)
    prec = max(acc.prec, term.prec)
    d = lo - hi
    if d < _cut(prec):
        return hi
    return hi + d.exp().log1p()


def log_sub(hi: ExtReal, lo: ExtReal | None) -> ExtReal:
    """``ln(exp(hi) - exp(lo))`` for ``lo < hi``."""
    if lo is None:
        return hi
    prec = max(hi.prec, lo.prec)
    d = lo - hi
    if d.sign >= 0:
        raise InconsistencyError("log_sub of a non-smaller term")
    if d < _cut(prec):
        return hi
    return hi + (-d.exp()).log1p()


def log_to_float(ln: ExtReal | None) -> float:
    """``exp(ln)`` as a double; 0.0 on underflow, inf on overflow."""
    if ln is None:
        return 0.0
    if ln.height:
        return 0.0 if ln.sign < 0 else math.inf
    if ln < -800:
        return 0.0
    if ln > 800:
        return math.inf
    return float(ln.exp())


_cut_cache: dict[int, ExtReal] = {}


def _cut(prec: int) -> ExtReal:
    c = _cut_cache.get(prec)
    if c is None:
        c = _cut_cache[prec] = _ln2(prec) * -(prec + 8)
    return c
