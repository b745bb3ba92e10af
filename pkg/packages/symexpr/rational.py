from __future__ import annotations

import logging
from functools import cached_property
from typing import Any, Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

import sympy

from packages.symexpr.expr import (
    Expr,
    NonRationalError,
    from_sympy,
    has_function,
    is_valid_symbol,
    render,
    to_sympy,
    u_index,
    u_name,
)
from packages.symexpr.gaussian import GaussianRational

logger = logging.getLogger("dsym.symexpr")

PARAMETER_ORDER = ("a", "b", "c", "d", "e", "mu", "eps0")
N = sympy.Symbol("n")


class UnknownSymbolError(ValueError):
    pass


class IdenticallySingularError(ZeroDivisionError):
    pass


def symbol_rank(name: str) -> Tuple[int, int, str]:
    """Position of a symbol in the variable order n < a < ... < eps0 < U(0) < U(1) < ..."""
    if name == "n":
        return (0, 0, name)
    if name in PARAMETER_ORDER:
        return (1, PARAMETER_ORDER.index(name), name)
    index = u_index(name)
    if index is not None:
        return (3, index, name)
    return (2, 0, name)


def ordered_gens(symbols: Sequence[sympy.Symbol] | Set[sympy.Symbol]) -> List[sympy.Symbol]:
    """Generators most significant first (U(k) highest, n lowest)."""
    return sorted(symbols, key=lambda s: symbol_rank(s.name), reverse=True)


def u_symbol(index: int) -> sympy.Symbol:
    return sympy.Symbol(u_name(index))


def _lead_coefficient(poly_expr: sympy.Expr) -> sympy.Expr:
    symbols = poly_expr.free_symbols
    if not symbols:
        return poly_expr
    return sympy.Poly(poly_expr, *ordered_gens(symbols)).LC(order="grlex")


def _scale(expr: sympy.Expr, lead: sympy.Expr) -> sympy.Expr:
    if GaussianRational.is_gaussian(lead):
        inverse = (GaussianRational(1) / GaussianRational.from_sympy(lead)).to_sympy()
        return sympy.expand(expr * inverse)
    return sympy.expand(expr / lead)


def canonical_pair(value: Any) -> Tuple[sympy.Expr, sympy.Expr]:
    value = sympy.sympify(value)
    combined = sympy.cancel(sympy.together(value))
    num, den = sympy.fraction(combined)
    num, den = sympy.expand(num), sympy.expand(den)
    if den == 0:
        raise IdenticallySingularError(f"denominator vanishes identically in {value}")
    if num == 0:
        return sympy.Integer(0), sympy.Integer(1)
    lead = _lead_coefficient(den)
    return _scale(num, lead), _scale(den, lead)


class RationalFunction:
    """Quotient of two polynomials over the Gaussian rationals, kept in lowest terms.

    The denominator is scaled so its leading coefficient under graded
    lexicographic order is 1.
    """

    def __init__(self, value: Any = 0) -> None:
        num, den = canonical_pair(value)
        self.numerator: sympy.Expr = num
        self.denominator: sympy.Expr = den

    @classmethod
    def from_expr(cls, expr: Expr) -> "RationalFunction":
        if has_function(expr):
            raise NonRationalError(f"{render(expr)} contains a function application")
        return cls(to_sympy(expr))

    @classmethod
    def from_sympy(cls, value: Any) -> "RationalFunction":
        return cls(value)

    @classmethod
    def from_text(cls, text: str) -> "RationalFunction":
        from packages.symexpr.parser import parse_expr

        return cls.from_expr(parse_expr(text))

    def as_sympy(self) -> sympy.Expr:
        return self.numerator / self.denominator

    @cached_property
    def numerator_expr(self) -> Expr:
        return from_sympy(self.numerator)

    @cached_property
    def denominator_expr(self) -> Expr:
        return from_sympy(self.denominator)

    def variables(self) -> Set[str]:
        symbols = self.numerator.free_symbols | self.denominator.free_symbols
        return {s.name for s in symbols}

    def u_indices(self) -> Set[int]:
        return {k for k in (u_index(v) for v in self.variables()) if k is not None}

    def is_zero(self) -> bool:
        return sympy.expand(self.numerator) == 0

    def is_constant(self) -> bool:
        return not self.variables()

    def is_polynomial(self) -> bool:
        return not self.denominator.free_symbols

    def diff(self, var: str) -> "RationalFunction":
        if not is_valid_symbol(var):
            raise UnknownSymbolError(f"unknown symbol {var!r}")
        return RationalFunction(sympy.diff(self.as_sympy(), sympy.Symbol(var)))

    def shift(self, i: int) -> "RationalFunction":
        if i == 0:
            return self
        mapping: Dict[sympy.Symbol, sympy.Expr] = {N: N + i}
        for k in self.u_indices():
            if k + i < 0:
                raise ValueError(f"shift by {i} leaves u({k}) with a negative index")
            mapping[u_symbol(k)] = u_symbol(k + i)
        return RationalFunction(self.as_sympy().xreplace(mapping))

    def substitute(self, var: str, value: "RationalFunction | Any") -> "RationalFunction":
        if not is_valid_symbol(var):
            raise UnknownSymbolError(f"unknown symbol {var!r}")
        return self.substitute_many({var: value})

    def substitute_many(self, values: Mapping[str, "RationalFunction | Any"]) -> "RationalFunction":
        mapping = {sympy.Symbol(name): _to_sympy(value) for name, value in values.items()}
        num = self.numerator.xreplace(mapping)
        den = self.denominator.xreplace(mapping)
        den_num, _ = sympy.fraction(sympy.together(den))
        if sympy.expand(den_num) == 0:
            raise IdenticallySingularError("denominator vanishes identically after substitution")
        return RationalFunction(num / den)

    def degree_in(self, var: str) -> int:
        symbol = sympy.Symbol(var)
        return sympy.degree(self.numerator, symbol) - sympy.degree(self.denominator, symbol)

    def render(self) -> str:
        num = render(self.numerator_expr)
        if self.denominator == 1:
            return num
        return f"({num})/({render(self.denominator_expr)})"

    def _coerce(self, other: Any) -> Optional["RationalFunction"]:
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, (int, GaussianRational, sympy.Basic)):
            return RationalFunction(_to_sympy(other))
        return None

    def __add__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RationalFunction(self.as_sympy() + other.as_sympy())

    __radd__ = __add__

    def __sub__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RationalFunction(self.as_sympy() - other.as_sympy())

    def __rsub__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __mul__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return RationalFunction(self.as_sympy() * other.as_sympy())

    __rmul__ = __mul__

    def __truediv__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        if other.is_zero():
            raise IdenticallySingularError("division by the zero rational function")
        return RationalFunction(self.as_sympy() / other.as_sympy())

    def __rtruediv__(self, other: Any) -> "RationalFunction":
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other / self

    def __neg__(self) -> "RationalFunction":
        return RationalFunction(-self.as_sympy())

    def __pow__(self, exponent: int) -> "RationalFunction":
        if not isinstance(exponent, int):
            return NotImplemented
        if exponent < 0 and self.is_zero():
            raise IdenticallySingularError("zero raised to a negative power")
        return RationalFunction(self.as_sympy() ** exponent)

    def __eq__(self, other: object) -> bool:
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        cross = self.numerator * other.denominator - other.numerator * self.denominator
        return sympy.expand(cross) == 0

    def __hash__(self) -> int:
        return hash(frozenset(self.variables()))

    def __repr__(self) -> str:
        return f"RationalFunction({self.render()})"

    def __str__(self) -> str:
        return self.render()


def _to_sympy(value: Union[RationalFunction, Any]) -> sympy.Expr:
    if isinstance(value, RationalFunction):
        return value.as_sympy()
    if isinstance(value, GaussianRational):
        return value.to_sympy()
    if isinstance(value, Expr):
        return to_sympy(value)
    return sympy.sympify(value)


def to_rational(expr: Expr) -> RationalFunction:
    return RationalFunction.from_expr(expr)


def polynomial_coefficients(value: sympy.Expr, gens: Sequence[sympy.Symbol]) -> List[sympy.Expr]:
    """Coefficients of ``value`` viewed as a polynomial in ``gens`` only."""
    value = sympy.expand(value)
    if value == 0:
        return []
    if not gens:
        return [value]
    return [c for c in sympy.Poly(value, *gens).coeffs() if sympy.expand(c) != 0]
