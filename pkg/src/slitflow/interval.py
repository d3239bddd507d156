"""Closed intervals with exact rational endpoints.

Every real quantity in the certification path is carried as a
:class:`RationalInterval`.  Transcendental functions (log, pi) are enclosed
through mpmath's interval context and converted outward to rationals.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from contextlib import contextmanager
from math import isqrt
from numbers import Rational

from mpmath import iv

__all__ = ["RationalInterval", "PrecisionError", "as_interval", "pi_enclosure", "DEFAULT_BITS"]

DEFAULT_BITS = 256


class PrecisionError(ArithmeticError):
    """An enclosure is too wide to decide a comparison."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


def _mpf_tuple_to_fraction(t) -> Fraction:
    sign, man, exp, _ = t
    if man == 0 and exp != 0:
        raise PrecisionError("non-finite value in interval enclosure")
    v = Fraction(int(man)) * (Fraction(2) ** exp)
    return -v if sign else v


def _from_iv(x) -> "RationalInterval":
    a, b = x._mpi_
    return RationalInterval(_mpf_tuple_to_fraction(a), _mpf_tuple_to_fraction(b))


@contextmanager
def _ivprec(bits: int):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


@dataclass(frozen=True, slots=True)
class RationalInterval:
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = _frac(self.lo), _frac(self.hi)
        if lo > hi:
            raise ValueError(f"empty interval [{lo}, {hi}]")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def point(cls, x) -> "RationalInterval":
        x = _frac(x)
        return cls(x, x)

    @classmethod
    def hull(cls, a, b) -> "RationalInterval":
        a, b = _frac(a), _frac(b)
        return cls(min(a, b), max(a, b))

    # -- queries ---------------------------------------------------------
    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def mid(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def __contains__(self, x) -> bool:
        if isinstance(x, RationalInterval):
            return self.lo <= x.lo and x.hi <= self.hi
        x = _frac(x)
        return self.lo <= x <= self.hi

    def intersects(self, other: "RationalInterval") -> bool:
        return self.lo <= other.hi and other.lo <= self.hi

    def fatten(self, eps) -> "RationalInterval":
        eps = _frac(eps)
        return RationalInterval(self.lo - eps, self.hi + eps)

    def sign(self) -> int:
        """Certified sign; raises if the interval straddles zero."""
        if self.lo > 0:
            return 1
        if self.hi < 0:
            return -1
        if self.lo == self.hi == 0:
            return 0
        raise PrecisionError(f"sign undecided on [{float(self.lo)}, {float(self.hi)}]")

    def certainly_lt(self, other) -> bool:
        other = as_interval(other)
        return self.hi < other.lo

    def certainly_le(self, other) -> bool:
        other = as_interval(other)
        return self.hi <= other.lo

    def certainly_gt(self, other) -> bool:
        return as_interval(other).certainly_lt(self)

    def compare(self, other) -> int:
        """-1, 0 (equal points) or 1; PrecisionError when the enclosures overlap."""
        other = as_interval(other)
        if self.hi < other.lo:
            return -1
        if other.hi < self.lo:
            return 1
        if self.is_exact and other.is_exact and self.lo == other.lo:
            return 0
        raise PrecisionError("enclosures overlap; cannot order")

    # -- arithmetic --------------------------------------------------------
    def __neg__(self):
        return RationalInterval(-self.hi, -self.lo)

    def __add__(self, other):
        o = as_interval(other)
        return RationalInterval(self.lo + o.lo, self.hi + o.hi)

    __radd__ = __add__

    def __sub__(self, other):
        o = as_interval(other)
        return RationalInterval(self.lo - o.hi, self.hi - o.lo)

    def __rsub__(self, other):
        return as_interval(other) - self

    def __mul__(self, other):
        o = as_interval(other)
        if o.is_exact:
            c = o.lo
            return RationalInterval.hull(self.lo * c, self.hi * c)
        ps = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return RationalInterval(min(ps), max(ps))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = as_interval(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("divisor interval contains zero")
        return self * RationalInterval(1 / o.hi, 1 / o.lo)

    def __rtruediv__(self, other):
        return as_interval(other) / self

    def __abs__(self):
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return RationalInterval(Fraction(0), max(-self.lo, self.hi))

    def square(self) -> "RationalInterval":
        a = abs(self)
        return RationalInterval(a.lo * a.lo, a.hi * a.hi)

    def sqrt(self, bits: int = DEFAULT_BITS) -> "RationalInterval":
        if self.lo < 0:
            raise ValueError("sqrt of an interval reaching below zero")
        scale = 1 << bits
        s2 = scale * scale

        def down(x: Fraction) -> Fraction:
            return Fraction(isqrt((x.numerator * s2) // x.denominator), scale)

        def up(x: Fraction) -> Fraction:
            n = -((-x.numerator * s2) // x.denominator)
            r = isqrt(n)
            if r * r < n:
                r += 1
            return Fraction(r, scale)

        return RationalInterval(down(self.lo), up(self.hi))

    def log(self, bits: int = DEFAULT_BITS) -> "RationalInterval":
        if self.lo <= 0:
            raise ValueError("log of a non-positive interval")
        with _ivprec(bits):
            lo = iv.log(iv.mpf(self.lo.numerator) / self.lo.denominator)
            hi = iv.log(iv.mpf(self.hi.numerator) / self.hi.denominator)
        return RationalInterval(_from_iv(lo).lo, _from_iv(hi).hi)

    def floor(self) -> int:
        """Common floor of all points; PrecisionError if it is not unique."""
        a, b = self.lo.__floor__(), self.hi.__floor__()
        if a != b:
            raise PrecisionError("floor undecided")
        return a

    def __float__(self):
        return float(self.mid)

    def __repr__(self):
        if self.is_exact:
            return f"RationalInterval.point({self.lo})"
        return f"RationalInterval(~{float(self.lo):.12g}, ~{float(self.hi):.12g}; w={float(self.width):.2e})"

    def decimal(self, digits: int = 12) -> tuple[str, str]:
        """Outward-rounded decimal strings (lo rounded down, hi rounded up)."""
        scale = 10**digits
        lo = (self.lo * scale).__floor__()
        hi = (self.hi * scale).__ceil__()
        return _fmt(lo, digits), _fmt(hi, digits)

    def sci(self, sig: int = 15) -> tuple[str, str]:
        """Outward-rounded scientific notation with ``sig`` significant digits."""
        return _sci(self.lo, sig, up=False), _sci(self.hi, sig, up=True)


def _sci(x: Fraction, sig: int, up: bool) -> str:
    if x == 0:
        return "0"
    a = abs(x)
    e = len(str(a.numerator)) - len(str(a.denominator))
    while Fraction(10) ** e > a:
        e -= 1
    while Fraction(10) ** (e + 1) <= a:
        e += 1
    m = x / Fraction(10) ** (e - sig + 1)
    m = m.__ceil__() if up else m.__floor__()
    if abs(m) >= 10**sig:  # rounding carried into a new digit
        m = (m + (9 if m > 0 and up else 0)) // 10 if m > 0 else -((-m + (0 if up else 9)) // 10)
        e += 1
    sign = "-" if m < 0 else ""
    d = str(abs(m))
    return f"{sign}{d[0]}.{d[1:]}e{e:+03d}"


def _fmt(n: int, digits: int) -> str:
    sign = "-" if n < 0 else ""
    n = abs(n)
    whole, frac = divmod(n, 10**digits)
    return f"{sign}{whole}.{frac:0{digits}d}"


def as_interval(x) -> RationalInterval:
    if isinstance(x, RationalInterval):
        return x
    return RationalInterval.point(x)


def pi_enclosure(bits: int = DEFAULT_BITS) -> RationalInterval:
    with _ivprec(bits):
        return _from_iv(iv.pi)
