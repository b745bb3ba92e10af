from __future__ import annotations

import re
from fractions import Fraction
from typing import Union

import sympy

_RATIONAL = r"[+-]?\d+(?:/\d+)?"
_LITERAL_RE = re.compile(
    rf"^\s*(?:(?P<re>{_RATIONAL})\s*)?(?:(?P<sign>[+-])?\s*(?:(?P<im>\d+(?:/\d+)?)\s*\*\s*)?(?P<unit>i))?\s*$"
)

Number = Union[int, Fraction, "GaussianRational"]


class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re: Union[int, Fraction, str] = 0, im: Union[int, Fraction, str] = 0) -> None:
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("GaussianRational is immutable")

    @classmethod
    def coerce(cls, value: object) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return cls(value)
        if isinstance(value, str):
            return cls.parse(value)
        if isinstance(value, sympy.Basic):
            return cls.from_sympy(value)
        raise TypeError(f"cannot convert {type(value).__name__} to GaussianRational")

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse the literal form ``p/q+r/s*i`` (either part optional)."""
        match = _LITERAL_RE.match(text or "")
        if not match or not (match.group("re") or match.group("unit")):
            raise ValueError(f"not a Gaussian-rational literal: {text!r}")
        real = Fraction(match.group("re")) if match.group("re") else Fraction(0)
        imag = Fraction(0)
        if match.group("unit"):
            imag = Fraction(match.group("im")) if match.group("im") else Fraction(1)
            if match.group("sign") == "-":
                imag = -imag
            elif not match.group("sign") and match.group("re"):
                raise ValueError(f"missing sign before imaginary part: {text!r}")
        return cls(real, imag)

    @classmethod
    def from_sympy(cls, value: sympy.Basic) -> "GaussianRational":
        real, imag = sympy.expand(value).as_real_imag()
        if not (real.is_Rational and imag.is_Rational):
            raise ValueError(f"{value} is not a Gaussian rational")
        return cls(Fraction(int(real.p), int(real.q)), Fraction(int(imag.p), int(imag.q)))

    @staticmethod
    def is_gaussian(value: sympy.Basic) -> bool:
        real, imag = sympy.expand(value).as_real_imag()
        return bool(real.is_Rational and imag.is_Rational)

    def to_sympy(self) -> sympy.Expr:
        return sympy.Rational(self.re.numerator, self.re.denominator) + sympy.I * sympy.Rational(
            self.im.numerator, self.im.denominator
        )

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def norm(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __add__(self, other: object) -> "GaussianRational":
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other: object) -> "GaussianRational":
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other: object) -> "GaussianRational":
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other: object) -> "GaussianRational":
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "GaussianRational":
        other = _maybe(other)
        if other is None:
            return NotImplemented
        norm = other.norm()
        if norm == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        conj = other.conjugate()
        num = self * conj
        return GaussianRational(num.re / norm, num.im / norm)

    def __rtruediv__(self, other: object) -> "GaussianRational":
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return other / self

    def __pow__(self, exponent: int) -> "GaussianRational":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0:
            return GaussianRational(1) / (self ** (-exponent))
        result = GaussianRational(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        other = _maybe(other)
        if other is None:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return not self.is_zero()

    def __repr__(self) -> str:
        return f"GaussianRational({self})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        imag = abs(self.im)
        imag_text = "i" if imag == 1 else f"{imag}*i"
        if self.re == 0:
            return f"-{imag_text}" if self.im < 0 else imag_text
        sign = "-" if self.im < 0 else "+"
        return f"{self.re}{sign}{imag_text}"


def _maybe(value: object) -> "GaussianRational | None":
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return GaussianRational(value)
    return None


ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I_UNIT = GaussianRational(0, 1)
