from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import sympy

from packages.symexpr.gaussian import GaussianRational

logger = logging.getLogger("dsym.seqform")

MAX_ROOT_ORDER = 24
_DENOMINATOR_LIMIT = 10**6


class NonCyclotomicRoot(ValueError):
    def __init__(self, factor: sympy.Expr) -> None:
        super().__init__(f"root of {factor} is not a scaled root of unity")
        self.factor = factor


def _first_quadrant(scale: GaussianRational) -> Tuple[GaussianRational, int]:
    """Split scale = i^j * s with s.re > 0 and s.im >= 0 (s = 0 kept as is)."""
    if scale.is_zero():
        return scale, 0
    s = scale
    for j in range(4):
        if s.re > 0 and s.im >= 0:
            return s, j
        s = s * GaussianRational(0, -1)
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class RootOfUnityScalar:
    """scale * exp(2*pi*i*k/m) with the scale normalized into the first quadrant."""

    scale: GaussianRational
    k: int
    m: int

    @classmethod
    def make(cls, scale: object = 1, k: int = 0, m: int = 1) -> "RootOfUnityScalar":
        if m <= 0:
            raise ValueError("root order must be positive")
        scale = GaussianRational.coerce(scale)
        if scale.is_zero():
            raise ValueError("scale of a root-of-unity scalar must be nonzero")
        scale, quarter_turns = _first_quadrant(scale)
        turn = Fraction(k, m) + Fraction(quarter_turns, 4)
        turn -= math.floor(turn)
        return cls(scale, turn.numerator, turn.denominator)

    @classmethod
    def one(cls) -> "RootOfUnityScalar":
        return cls.make()

    @property
    def turn(self) -> Fraction:
        return Fraction(self.k, self.m)

    def is_unit(self) -> bool:
        return self.scale == GaussianRational(1)

    def __mul__(self, other: "RootOfUnityScalar") -> "RootOfUnityScalar":
        return RootOfUnityScalar.make(
            self.scale * other.scale, self.k * other.m + other.k * self.m, self.m * other.m
        )

    def __pow__(self, exponent: int) -> "RootOfUnityScalar":
        return RootOfUnityScalar.make(self.scale**exponent, self.k * exponent, self.m)

    def conjugate(self) -> "RootOfUnityScalar":
        return RootOfUnityScalar.make(self.scale.conjugate(), -self.k, self.m)

    def inverse(self) -> "RootOfUnityScalar":
        return self ** (-1)

    def root_value(self) -> sympy.Expr:
        angle = 2 * sympy.pi * sympy.Rational(self.k, self.m)
        return sympy.expand(sympy.cos(angle) + sympy.I * sympy.sin(angle))

    def exact_value(self) -> sympy.Expr:
        return sympy.expand(self.scale.to_sympy() * self.root_value())

    def __complex__(self) -> complex:
        return complex(self.scale) * cmath.exp(2j * cmath.pi * self.k / self.m)

    def gaussian_power(self, n: int) -> Optional[GaussianRational]:
        """Exact value of self**n when it lies in Q(i), otherwise None."""
        turn = Fraction(self.k * n, self.m)
        turn -= math.floor(turn)
        if (turn * 4).denominator != 1:
            return None
        quarter = int(turn * 4)
        return self.scale**n * GaussianRational(0, 1) ** quarter

    def text(self) -> str:
        root = f"rou({self.k},{self.m})"
        if self.is_unit():
            return root
        return f"({self.scale}*{root})"

    def __str__(self) -> str:
        return self.text()


def _is_exact_zero(value: sympy.Expr) -> bool:
    value = sympy.expand(value)
    if value == 0:
        return True
    if value.free_symbols:
        return False
    return abs(complex(sympy.N(value, 60))) < 1e-40


def identify_root(value: sympy.Expr) -> RootOfUnityScalar:
    """Write an algebraic number as a Gaussian-rational multiple of a root of unity."""
    value = sympy.sympify(value)
    if value.free_symbols:
        raise NonCyclotomicRoot(value)
    numeric = complex(sympy.N(value, 30))
    if abs(numeric) < 1e-30:
        raise NonCyclotomicRoot(value)
    for m in range(1, MAX_ROOT_ORDER + 1):
        for k in range(m):
            if math.gcd(k, m) != 1 and not (k == 0 and m == 1):
                continue
            guess = numeric * cmath.exp(-2j * cmath.pi * k / m)
            re = Fraction(guess.real).limit_denominator(_DENOMINATOR_LIMIT)
            im = Fraction(guess.imag).limit_denominator(_DENOMINATOR_LIMIT)
            if abs(complex(float(re), float(im)) - guess) > 1e-9 * max(1.0, abs(guess)):
                continue
            candidate = RootOfUnityScalar.make(GaussianRational(re, im), k, m)
            if _is_exact_zero(value - candidate.exact_value()):
                return candidate
    raise NonCyclotomicRoot(value)


def cyclotomic_roots(poly: sympy.Expr, x: sympy.Symbol) -> List[Tuple[RootOfUnityScalar, int]]:
    """Roots of a univariate polynomial with multiplicity, each as a scaled root of unity.

    Zero roots are not representable and raise NonCyclotomicRoot.
    """
    poly = sympy.Poly(sympy.expand(poly), x)
    degree = poly.degree()
    if degree <= 0:
        return []
    found: Dict[sympy.Expr, int] = sympy.roots(poly, x)
    if sum(found.values()) < degree:
        raise NonCyclotomicRoot(poly.as_expr())
    result: Dict[RootOfUnityScalar, int] = {}
    for value, multiplicity in found.items():
        try:
            root = identify_root(value)
        except NonCyclotomicRoot:
            factor = sympy.factor(poly.as_expr(), extension=sympy.I)
            logger.warning("non-cyclotomic root %s of %s", value, factor)
            raise NonCyclotomicRoot(factor) from None
        result[root] = result.get(root, 0) + multiplicity
    return sorted(result.items(), key=lambda item: (item[0].m, item[0].k, float(item[0].scale.norm())))
