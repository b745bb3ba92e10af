from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, Mapping, Set, Tuple

import sympy

from packages.symexpr.gaussian import GaussianRational

FUNCTIONS = ("exp", "sin", "cos")
RESERVED = frozenset({"n", "i", "u", "exp", "sin", "cos"})
_U_NAME_RE = re.compile(r"^U(\d+)$")
_IDENT_RE = re.compile(r"^[a-z][a-z0-9_]*$")


class UnboundSymbolError(ValueError):
    pass


class NumericDivisionByZero(ZeroDivisionError):
    pass


class NonRationalError(ValueError):
    pass


def u_name(index: int) -> str:
    if index < 0:
        raise ValueError("u(k) index must be non-negative")
    return f"U{index}"


def u_index(name: str) -> int | None:
    match = _U_NAME_RE.match(name)
    return int(match.group(1)) if match else None


def is_valid_symbol(name: str) -> bool:
    if name == "n" or u_index(name) is not None:
        return True
    return bool(_IDENT_RE.match(name)) and name not in RESERVED


class Expr:
    """Base of the immutable expression tree."""

    def __add__(self, other: "Expr") -> "Expr":
        return make_sum([self, other])

    def __mul__(self, other: "Expr") -> "Expr":
        return make_product([self, other])

    def __neg__(self) -> "Expr":
        return make_product([Const(GaussianRational(-1)), self])

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True, eq=True)
class Const(Expr):
    value: GaussianRational


@dataclass(frozen=True, eq=True)
class Var(Expr):
    name: str


@dataclass(frozen=True, eq=True)
class Sum(Expr):
    terms: Tuple[Expr, ...]


@dataclass(frozen=True, eq=True)
class Product(Expr):
    factors: Tuple[Expr, ...]


@dataclass(frozen=True, eq=True)
class IntPower(Expr):
    base: Expr
    exponent: int


@dataclass(frozen=True, eq=True)
class FunctionApp(Expr):
    name: str
    argument: Expr


def U(index: int) -> Var:
    return Var(u_name(index))


def const(value: Any) -> Const:
    return Const(GaussianRational.coerce(value))


def make_sum(terms: Iterable[Expr]) -> Expr:
    flat = []
    constant = None
    for term in terms:
        parts = term.terms if isinstance(term, Sum) else (term,)
        for part in parts:
            if isinstance(part, Const):
                constant = part.value if constant is None else constant + part.value
                continue
            flat.append(part)
    if constant is not None and (constant or not flat):
        flat.append(Const(constant))
    if len(flat) == 1:
        return flat[0]
    return Sum(tuple(flat))


def make_product(factors: Iterable[Expr]) -> Expr:
    flat = []
    constant = None
    for factor in factors:
        parts = factor.factors if isinstance(factor, Product) else (factor,)
        for part in parts:
            if isinstance(part, Const):
                constant = part.value if constant is None else constant * part.value
                continue
            flat.append(part)
    if constant is not None:
        if constant.is_zero():
            return Const(constant)
        if constant != GaussianRational(1) or not flat:
            flat.insert(0, Const(constant))
    if len(flat) == 1:
        return flat[0]
    return Product(tuple(flat))


def make_power(base: Expr, exponent: int) -> Expr:
    if exponent == 1:
        return base
    if isinstance(base, Const) and not (base.value.is_zero() and exponent < 0):
        return Const(base.value**exponent)
    if isinstance(base, IntPower):
        return IntPower(base.base, base.exponent * exponent)
    return IntPower(base, exponent)


def free_symbols(expr: Expr) -> Set[str]:
    if isinstance(expr, Var):
        return {expr.name}
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Sum):
        return set().union(*(free_symbols(t) for t in expr.terms))
    if isinstance(expr, Product):
        return set().union(*(free_symbols(f) for f in expr.factors))
    if isinstance(expr, IntPower):
        return free_symbols(expr.base)
    if isinstance(expr, FunctionApp):
        return free_symbols(expr.argument)
    raise TypeError(f"unknown node {expr!r}")


def has_function(expr: Expr) -> bool:
    if isinstance(expr, FunctionApp):
        return True
    if isinstance(expr, Sum):
        return any(has_function(t) for t in expr.terms)
    if isinstance(expr, Product):
        return any(has_function(f) for f in expr.factors)
    if isinstance(expr, IntPower):
        return has_function(expr.base)
    return False


def max_u_index(expr: Expr) -> int:
    indices = [u_index(name) for name in free_symbols(expr)]
    indices = [k for k in indices if k is not None]
    return max(indices) if indices else -1


def shift(expr: Expr, i: int) -> Expr:
    """Apply n -> n+i and u(k) -> u(k+i)."""
    if i == 0:
        return expr
    if isinstance(expr, Var):
        if expr.name == "n":
            return make_sum([expr, const(i)])
        index = u_index(expr.name)
        if index is not None:
            if index + i < 0:
                raise ValueError(f"shift by {i} leaves u({index}) with a negative index")
            return U(index + i)
        return expr
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Sum):
        return make_sum(shift(t, i) for t in expr.terms)
    if isinstance(expr, Product):
        return make_product(shift(f, i) for f in expr.factors)
    if isinstance(expr, IntPower):
        return make_power(shift(expr.base, i), expr.exponent)
    if isinstance(expr, FunctionApp):
        return FunctionApp(expr.name, shift(expr.argument, i))
    raise TypeError(f"unknown node {expr!r}")


def _evaluate(
    expr: Expr,
    bindings: Mapping[str, Any],
    convert: Callable[[GaussianRational], Any],
    function: Callable[[str, Any], Any],
    is_zero: Callable[[Any], bool],
) -> Any:
    if isinstance(expr, Const):
        return convert(expr.value)
    if isinstance(expr, Var):
        if expr.name not in bindings or bindings[expr.name] is None:
            raise UnboundSymbolError(f"symbol {render(expr)} is not bound")
        return bindings[expr.name]
    if isinstance(expr, Sum):
        values = [_evaluate(t, bindings, convert, function, is_zero) for t in expr.terms]
        total = values[0]
        for value in values[1:]:
            total = total + value
        return total
    if isinstance(expr, Product):
        values = [_evaluate(f, bindings, convert, function, is_zero) for f in expr.factors]
        total = values[0]
        for value in values[1:]:
            total = total * value
        return total
    if isinstance(expr, IntPower):
        base = _evaluate(expr.base, bindings, convert, function, is_zero)
        if expr.exponent < 0:
            if is_zero(base):
                raise NumericDivisionByZero(f"division by zero evaluating {render(expr)}")
            return convert(GaussianRational(1)) / base ** (-expr.exponent)
        return base**expr.exponent
    if isinstance(expr, FunctionApp):
        return function(expr.name, _evaluate(expr.argument, bindings, convert, function, is_zero))
    raise TypeError(f"unknown node {expr!r}")


_CMATH = {"exp": cmath.exp, "sin": cmath.sin, "cos": cmath.cos}


def eval_numeric(expr: Expr, bindings: Mapping[str, Any]) -> complex:
    numeric = {name: complex(value) for name, value in bindings.items() if value is not None}
    return complex(
        _evaluate(
            expr,
            numeric,
            convert=complex,
            function=lambda name, arg: _CMATH[name](arg),
            is_zero=lambda value: value == 0,
        )
    )


def _no_function(name: str, argument: Any) -> Any:
    raise NonRationalError(f"{name}(...) cannot be evaluated exactly")


def eval_exact(expr: Expr, bindings: Mapping[str, Any]) -> GaussianRational:
    exact = {
        name: GaussianRational.coerce(value) for name, value in bindings.items() if value is not None
    }
    return _evaluate(expr, exact, convert=lambda v: v, function=_no_function, is_zero=lambda v: v.is_zero())


def eval_algebraic(expr: Expr, bindings: Mapping[str, Any]) -> sympy.Expr:
    """Exact evaluation over sympy numbers (radicals allowed)."""
    values = {name: sympy.sympify(value) for name, value in bindings.items() if value is not None}
    result = _evaluate(
        expr,
        values,
        convert=lambda v: v.to_sympy(),
        function=_no_function,
        is_zero=lambda v: sympy.expand(v) == 0,
    )
    return sympy.expand(result)


_SYMPY_FUNCTIONS = {"exp": sympy.exp, "sin": sympy.sin, "cos": sympy.cos}


def to_sympy(expr: Expr) -> sympy.Expr:
    if isinstance(expr, Const):
        return expr.value.to_sympy()
    if isinstance(expr, Var):
        return sympy.Symbol(expr.name)
    if isinstance(expr, Sum):
        return sympy.Add(*(to_sympy(t) for t in expr.terms))
    if isinstance(expr, Product):
        return sympy.Mul(*(to_sympy(f) for f in expr.factors))
    if isinstance(expr, IntPower):
        return sympy.Pow(to_sympy(expr.base), expr.exponent)
    if isinstance(expr, FunctionApp):
        return _SYMPY_FUNCTIONS[expr.name](to_sympy(expr.argument))
    raise TypeError(f"unknown node {expr!r}")


def from_sympy(value: sympy.Basic) -> Expr:
    """Convert a sympy expression with Gaussian-rational numbers back into the tree."""
    value = sympy.sympify(value)
    if value.is_number:
        if not GaussianRational.is_gaussian(value):
            raise NonRationalError(f"{value} is not a Gaussian-rational constant")
        return Const(GaussianRational.from_sympy(value))
    if isinstance(value, sympy.Symbol):
        return Var(value.name)
    if isinstance(value, sympy.Add):
        return make_sum(from_sympy(arg) for arg in value.args)
    if isinstance(value, sympy.Mul):
        return make_product(from_sympy(arg) for arg in value.args)
    if isinstance(value, sympy.Pow):
        if not value.exp.is_Integer:
            raise NonRationalError(f"non-integer exponent in {value}")
        return make_power(from_sympy(value.base), int(value.exp))
    for name, function in _SYMPY_FUNCTIONS.items():
        if isinstance(value, function):
            return FunctionApp(name, from_sympy(value.args[0]))
    raise NonRationalError(f"cannot represent {value}")


def _render_const(value: GaussianRational, context: str) -> str:
    text = str(value)
    if value.im == 0:
        if context == "base" and (value.re < 0 or value.re.denominator != 1):
            return f"({text})"
        return text
    if value.re == 0 and context != "base":
        return text
    return f"({text})"


def _is_negative_term(term: Expr) -> bool:
    if isinstance(term, Const):
        return term.value.im == 0 and term.value.re < 0
    if isinstance(term, Product) and isinstance(term.factors[0], Const):
        lead = term.factors[0].value
        return lead.im == 0 and lead.re < 0
    return False


def _render_base(expr: Expr) -> str:
    if isinstance(expr, (Var, FunctionApp)):
        return render(expr)
    if isinstance(expr, Const):
        return _render_const(expr.value, "base")
    return f"({render(expr)})"


def _render_factor(expr: Expr) -> str:
    if isinstance(expr, Sum):
        return f"({render(expr)})"
    if isinstance(expr, Const):
        return _render_const(expr.value, "factor")
    return render(expr)


def _render_product(factors: Tuple[Expr, ...]) -> str:
    sign = ""
    numerator = []
    denominator = []
    for index, factor in enumerate(factors):
        if index == 0 and isinstance(factor, Const) and factor.value == GaussianRational(-1) and len(factors) > 1:
            sign = "-"
        elif isinstance(factor, IntPower) and factor.exponent < 0:
            inverse = make_power(factor.base, -factor.exponent)
            denominator.append(render(inverse) if isinstance(inverse, IntPower) else _render_base(inverse))
        else:
            numerator.append(_render_factor(factor))
    text = sign + ("*".join(numerator) if numerator else "1")
    for item in denominator:
        text += f"/{item}"
    return text


def render(expr: Expr) -> str:
    """Text form accepted by the parser."""
    if isinstance(expr, Const):
        return _render_const(expr.value, "top")
    if isinstance(expr, Var):
        index = u_index(expr.name)
        return f"u({index})" if index is not None else expr.name
    if isinstance(expr, FunctionApp):
        return f"{expr.name}({render(expr.argument)})"
    if isinstance(expr, IntPower):
        if expr.exponent < 0:
            return _render_product((expr,))
        return f"{_render_base(expr.base)}^{expr.exponent}"
    if isinstance(expr, Product):
        return _render_product(expr.factors)
    if isinstance(expr, Sum):
        pieces = []
        for index, term in enumerate(expr.terms):
            if index and _is_negative_term(term):
                pieces.append(f" - {render(-term)}")
            elif index:
                pieces.append(f" + {render(term) if not isinstance(term, Const) else _render_const(term.value, 'factor')}")
            else:
                pieces.append(render(term))
        return "".join(pieces)
    raise TypeError(f"unknown node {expr!r}")


def bindings_from(values: Mapping[str, Any]) -> Dict[str, Any]:
    """Accept ``u(0)``-style keys as well as internal ``U0`` names."""
    out: Dict[str, Any] = {}
    for key, value in values.items():
        match = re.match(r"^u\((\d+)\)$", key)
        out[u_name(int(match.group(1))) if match else key] = value
    return out
