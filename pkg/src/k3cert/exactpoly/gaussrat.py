"""Exact arithmetic in the Gaussian rationals Q(i).

A value is stored as ``(a + b*i) / d`` with integers ``a, b, d``, ``d > 0`` and
``gcd(a, b, d) == 1``, so equal numbers always share one representation.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational

__all__ = ["GaussRat", "as_gaussrat", "ZERO", "ONE", "I"]


class GaussRat:
    __slots__ = ("_a", "_b", "_d")

    def __init__(self, re=0, im=0):
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // gcd(re.denominator, im.denominator)
        a = re.numerator * (d // re.denominator)
        b = im.numerator * (d // im.denominator)
        g = gcd(a, b, d)
        self._a, self._b, self._d = a // g, b // g, d // g

    @classmethod
    def _make(cls, a: int, b: int, d: int) -> "GaussRat":
        if d < 0:
            a, b, d = -a, -b, -d
        if d != 1:
            g = gcd(a, b, d)
            if g != 1:
                a, b, d = a // g, b // g, d // g
        obj = object.__new__(cls)
        obj._a, obj._b, obj._d = a, b, d
        return obj

    @classmethod
    def from_complex(cls, z: complex) -> "GaussRat":
        """Exact binary value of a finite complex float."""
        return cls(Fraction(z.real), Fraction(z.imag))

    # -- accessors ---------------------------------------------------------
    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    @property
    def parts(self) -> tuple[int, int, int]:
        return self._a, self._b, self._d

    def is_zero(self) -> bool:
        return self._a == 0 and self._b == 0

    def is_real(self) -> bool:
        return self._b == 0

    def is_one(self) -> bool:
        return self._a == 1 and self._b == 0 and self._d == 1

    def __bool__(self) -> bool:
        return not self.is_zero()

    def conjugate(self) -> "GaussRat":
        return GaussRat._make(self._a, -self._b, self._d)

    def norm(self) -> Fraction:
        """|x|^2 as an exact rational."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def __complex__(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    def to_complex(self, shift: int = 0) -> complex:
        """``complex(self * 2**-shift)`` without overflowing on huge parts."""
        a, b, d = self._a, self._b, self._d
        if shift > 0:
            d <<= shift
        elif shift < 0:
            a <<= -shift
            b <<= -shift
        return complex(a / d, b / d)

    def log2_size(self) -> int:
        """Rough binary exponent of |x|; used to rescale before float conversion."""
        if self.is_zero():
            return -(10**9)
        return max(abs(self._a).bit_length(), abs(self._b).bit_length()) - self._d.bit_length()

    # -- arithmetic --------------------------------------------------------
    def __neg__(self) -> "GaussRat":
        obj = object.__new__(GaussRat)
        obj._a, obj._b, obj._d = -self._a, -self._b, self._d
        return obj

    def __pos__(self) -> "GaussRat":
        return self

    def __add__(self, other) -> "GaussRat":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a1, b1, d1 = self._a, self._b, self._d
        a2, b2, d2 = other._a, other._b, other._d
        if d1 == d2:
            return GaussRat._make(a1 + a2, b1 + b2, d1)
        return GaussRat._make(a1 * d2 + a2 * d1, b1 * d2 + b2 * d1, d1 * d2)

    __radd__ = __add__

    def __sub__(self, other) -> "GaussRat":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "GaussRat":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other) -> "GaussRat":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a1, b1, d1 = self._a, self._b, self._d
        a2, b2, d2 = other._a, other._b, other._d
        if b1 == 0 and b2 == 0:
            return GaussRat._make(a1 * a2, 0, d1 * d2)
        return GaussRat._make(a1 * a2 - b1 * b2, a1 * b2 + a2 * b1, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "GaussRat":
        a, b, d = self._a, self._b, self._d
        n = a * a + b * b
        if n == 0:
            raise ZeroDivisionError("GaussRat division by zero")
        # d / (a + bi) = d (a - bi) / (a^2 + b^2)
        return GaussRat._make(d * a, -d * b, n)

    def __truediv__(self, other) -> "GaussRat":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other) -> "GaussRat":
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other * self.inverse()

    def __pow__(self, n: int) -> "GaussRat":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        result = ONE
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison / hashing ----------------------------------------------
    def __eq__(self, other) -> bool:
        other = _coerce(other)
        if other is NotImplemented:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self._a == other._a and self._b == other._b and self._d == other._d

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(Fraction(self._a, self._d))
        return hash((self._a, self._b, self._d))

    # -- text ----------------------------------------------------------------
    def __repr__(self) -> str:
        return f"GaussRat({self})"

    def __str__(self) -> str:
        return self.format(star=False)

    def format(self, star: bool = False) -> str:
        """Render as ``a/b+c/d*i`` (``star=True``) or ``a/b+c/di``; zero parts omitted."""
        re, im = self.re, self.im
        if im == 0:
            return _frac_str(re)
        unit = "*i" if star else "i"
        if abs(im) == 1:
            im_str = "i"
        else:
            im_str = _frac_str(abs(im)) + unit
        if re == 0:
            return ("-" if im < 0 else "") + im_str
        return _frac_str(re) + ("-" if im < 0 else "+") + im_str


def _frac_str(q: Fraction) -> str:
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def _coerce(x):
    if isinstance(x, GaussRat):
        return x
    if isinstance(x, int):
        return GaussRat._make(x, 0, 1)
    if isinstance(x, Rational):
        return GaussRat._make(x.numerator, 0, x.denominator)
    return NotImplemented


def as_gaussrat(x) -> GaussRat:
    """Convert int, Fraction, GaussRat, or a coefficient string to GaussRat."""
    if isinstance(x, str):
        from .parser import parse_gaussrat

        return parse_gaussrat(x)
    c = _coerce(x)
    if c is NotImplemented:
        raise TypeError(f"cannot convert {type(x).__name__} to GaussRat exactly")
    return c


ZERO = GaussRat._make(0, 0, 1)
ONE = GaussRat._make(1, 0, 1)
I = GaussRat._make(0, 1, 1)
