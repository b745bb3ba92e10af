from __future__ import annotations

import cmath
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional

import sympy

from packages.eqmodel.equation import DifferenceEquation, EquationError
from packages.eqmodel.simulate import Trajectory
from packages.symexpr.gaussian import GaussianRational
from packages.symexpr.rational import RationalFunction, u_symbol

logger = logging.getLogger("dsym.eqmodel")


class NotLogLinear(EquationError):
    pass


@dataclass
class TransformResult:
    kind: str
    equation: DifferenceEquation
    forward: Callable[[Any], Any]
    backward: Callable[[Any], Any]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def map_trajectory(self, trajectory: Trajectory, direction: str = "forward") -> Trajectory:
        fn = self.forward if direction == "forward" else self.backward
        out = Trajectory(start=trajectory.start, mode=trajectory.mode)
        for value, flag in zip(trajectory.values, trajectory.flags):
            if value is None:
                out.values.append(None)
                out.flags.append(flag)
                continue
            try:
                out.values.append(fn(value))
                out.flags.append(flag)
            except ZeroDivisionError:
                out.values.append(None)
                out.flags.append("singular")
        return out


def _derived(eq: DifferenceEquation, omega: RationalFunction, suffix: str) -> DifferenceEquation:
    return DifferenceEquation(
        order=eq.order,
        omega=omega,
        parameters=eq.parameters,
        assumptions=eq.assumptions,
        values=eq.values,
        raw_omega_text="",
        name=f"{eq.name}:{suffix}" if eq.name else suffix,
        substitution=eq.substitution,
    )


def _inverse(value: Any) -> Any:
    if isinstance(value, GaussianRational):
        return GaussianRational(1) / value
    if isinstance(value, complex):
        if value == 0:
            raise ZeroDivisionError("reciprocal of zero")
        return 1 / value
    value = sympy.sympify(value)
    if sympy.expand(value) == 0:
        raise ZeroDivisionError("reciprocal of zero")
    return sympy.expand(sympy.radsimp(1 / value))


def reciprocal(eq: DifferenceEquation) -> TransformResult:
    """w = 1/u, so w(n+p) = 1/omega(1/w(n), ..., 1/w(n+p-1))."""
    if eq.omega.is_zero():
        raise EquationError("reciprocal transform needs omega that is not identically zero")
    inverted = {f"U{k}": RationalFunction(1 / u_symbol(k)) for k in range(eq.order)}
    omega = RationalFunction(1) / eq.omega.substitute_many(inverted)
    return TransformResult("reciprocal", _derived(eq, omega, "reciprocal"), _inverse, _inverse)


def affine(eq: DifferenceEquation, s: Any = 1, t: Any = 0) -> TransformResult:
    """u = s*w + t, so w(n+p) = (omega(s*w + t) - t)/s."""
    s = GaussianRational.coerce(s)
    t = GaussianRational.coerce(t)
    if s.is_zero():
        raise EquationError("affine transform needs s != 0")
    moved = {f"U{k}": RationalFunction(s.to_sympy() * u_symbol(k) + t.to_sympy()) for k in range(eq.order)}
    omega = (eq.omega.substitute_many(moved) - t) / s

    def forward(value: Any) -> Any:
        if isinstance(value, complex):
            return (value - complex(t)) / complex(s)
        return (GaussianRational.coerce(value) - t) / s

    def backward(value: Any) -> Any:
        if isinstance(value, complex):
            return complex(s) * value + complex(t)
        return s * GaussianRational.coerce(value) + t

    result = TransformResult("affine", _derived(eq, omega, "affine"), forward, backward)
    result.metadata = {"s": str(s), "t": str(t)}
    return result


def _monomial(poly_expr: sympy.Expr, gens: List[sympy.Symbol]) -> tuple:
    poly = sympy.Poly(poly_expr, *gens)
    terms = poly.terms()
    if len(terms) != 1:
        raise NotLogLinear(f"{poly_expr} is not a single monomial in u")
    exponents, coefficient = terms[0]
    return exponents, sympy.sympify(coefficient)


def log(eq: DifferenceEquation) -> TransformResult:
    """w = ln(u) for omega = c * prod u(k)^e_k with c free of n and u.

    The image w(n+p) = ln c + sum e_k w(n+k) is shifted by K = ln(c)/(1 - sum e_k)
    so the returned equation is homogeneous; K is reported as the offset.
    """
    gens = [u_symbol(k) for k in range(eq.order)]
    num_exp, num_c = _monomial(eq.omega.numerator, gens)
    den_exp, den_c = _monomial(eq.omega.denominator, gens)
    coefficient = sympy.cancel(num_c / den_c)
    if sympy.Symbol("n") in coefficient.free_symbols:
        raise NotLogLinear("log transform needs a coefficient independent of n")
    exponents = [a - b for a, b in zip(num_exp, den_exp)]
    total = sum(exponents)
    if total == 1 and coefficient != 1:
        raise NotLogLinear("exponents sum to 1; the constant ln c cannot be shifted away")
    omega = RationalFunction(sum(e * g for e, g in zip(exponents, gens)))
    offset = sympy.log(coefficient) / (1 - total) if coefficient != 1 else sympy.Integer(0)

    def _offset(bindings: Optional[Mapping[str, Any]] = None) -> complex:
        value = offset
        if bindings:
            value = value.xreplace({sympy.Symbol(k): GaussianRational.coerce(v).to_sympy() for k, v in bindings.items()})
        value = value.xreplace({sympy.Symbol(k): v.to_sympy() for k, v in eq.bound_values().items()})
        if value.free_symbols:
            raise EquationError(f"log offset {value} needs parameter values")
        return complex(sympy.N(value))

    def forward(value: Any) -> complex:
        value = complex(value)
        if value == 0:
            raise ZeroDivisionError("log of zero")
        return cmath.log(value) - _offset()

    def backward(value: Any) -> complex:
        return cmath.exp(complex(value) + _offset())

    result = TransformResult("log", _derived(eq, omega, "log"), forward, backward)
    result.metadata = {
        "coefficient": str(coefficient),
        "exponents": [int(e) for e in exponents],
        "offset": str(offset),
        "inhomogeneous": f"w(n+{eq.order}) = log({coefficient}) + "
        + " + ".join(f"({e})*w(n+{k})" for k, e in enumerate(exponents) if e),
    }
    logger.info("log transform of %s: offset %s", eq.name or eq.omega_text, offset)
    return result


def transform_equation(eq: DifferenceEquation, kind: str, s: Any = 1, t: Any = 0) -> TransformResult:
    if kind == "reciprocal":
        return reciprocal(eq)
    if kind == "log":
        return log(eq)
    if kind == "affine":
        return affine(eq, s, t)
    raise EquationError(f"unknown transform {kind!r}")


def is_linear_homogeneous(eq: DifferenceEquation) -> bool:
    gens = [u_symbol(k) for k in range(eq.order)]
    if eq.omega.denominator.free_symbols & set(gens):
        return False
    numerator = sympy.expand(eq.omega.numerator)
    if numerator == 0:
        return True
    poly = sympy.Poly(numerator, *gens)
    return all(sum(monomial) == 1 for monomial in poly.monoms())
