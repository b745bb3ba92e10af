from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import sympy

from packages.symexpr.expr import Expr, render, to_sympy, u_index
from packages.symexpr.gaussian import GaussianRational
from packages.symexpr.parser import parse_expr
from packages.symexpr.rational import RationalFunction, ordered_gens, symbol_rank

logger = logging.getLogger("dsym.eqmodel")

_ASSUMPTION_RE = re.compile(r"^(?P<lhs>[^=!]+?)\s*(?P<rel>!=|=)\s*(?P<rhs>[^=!]+)$")


class EquationError(ValueError):
    pass


class InconsistentAssumptions(EquationError):
    pass


class UnboundParameterError(EquationError):
    pass


@dataclass(frozen=True)
class Assumption:
    lhs: Expr
    rhs: Expr
    relation: str = "eq"

    @classmethod
    def parse(cls, text: str) -> "Assumption":
        match = _ASSUMPTION_RE.match(text.strip().replace("≠", "!="))
        if not match:
            raise EquationError(f"cannot read assumption {text!r}; expected 'lhs=rhs' or 'lhs!=rhs'")
        relation = "ne" if match.group("rel") == "!=" else "eq"
        return cls(parse_expr(match.group("lhs")), parse_expr(match.group("rhs")), relation)

    def difference(self) -> sympy.Expr:
        return sympy.expand(to_sympy(self.lhs) - to_sympy(self.rhs))

    def text(self) -> str:
        op = "!=" if self.relation == "ne" else "="
        return f"{render(self.lhs)}{op}{render(self.rhs)}"

    def __str__(self) -> str:
        return self.text()


def _is_zero(value: sympy.Expr) -> bool:
    num, _ = sympy.fraction(sympy.together(sympy.expand(value)))
    return sympy.expand(num) == 0


def solve_equalities(
    assumptions: Sequence[Assumption], parameters: Iterable[str]
) -> Dict[sympy.Symbol, sympy.Expr]:
    """Turn equality assumptions into a parameter substitution.

    A side that is a bare parameter is eliminated directly; otherwise the
    last parameter in variable order is solved for.
    """
    declared = set(parameters)
    substitution: Dict[sympy.Symbol, sympy.Expr] = {}
    for assumption in assumptions:
        if assumption.relation != "eq":
            continue
        lhs = to_sympy(assumption.lhs).xreplace(substitution)
        rhs = to_sympy(assumption.rhs).xreplace(substitution)
        diff = sympy.expand(lhs - rhs)
        if _is_zero(diff):
            continue
        unknowns = [s for s in diff.free_symbols if s.name in declared]
        if not unknowns:
            raise InconsistentAssumptions(f"assumption {assumption} reduces to {diff} = 0")
        if isinstance(lhs, sympy.Symbol) and lhs.name in declared and lhs not in rhs.free_symbols:
            target, value = lhs, rhs
        elif isinstance(rhs, sympy.Symbol) and rhs.name in declared and rhs not in lhs.free_symbols:
            target, value = rhs, lhs
        else:
            target = ordered_gens(unknowns)[0]
            solutions = sympy.solve(diff, target)
            if not solutions:
                raise InconsistentAssumptions(f"cannot solve {assumption} for {target}")
            value = solutions[0]
        substitution = {k: sympy.expand(v.xreplace({target: value})) for k, v in substitution.items()}
        substitution[target] = sympy.expand(value)
    return substitution


def check_inequations(
    assumptions: Sequence[Assumption],
    substitution: Mapping[sympy.Symbol, sympy.Expr],
) -> None:
    for assumption in assumptions:
        if assumption.relation != "ne":
            continue
        diff = assumption.difference().xreplace(dict(substitution))
        if _is_zero(diff):
            raise InconsistentAssumptions(f"assumption {assumption} contradicts the equalities")


@dataclass(frozen=True)
class DifferenceEquation:
    """u(n+p) = omega(n, u(n), ..., u(n+p-1)) with named parameters."""

    order: int
    omega: RationalFunction
    parameters: Tuple[str, ...] = ()
    assumptions: Tuple[Assumption, ...] = ()
    values: Tuple[Tuple[str, Optional[GaussianRational]], ...] = ()
    raw_omega_text: str = ""
    name: str = ""
    substitution: Tuple[Tuple[str, sympy.Expr], ...] = field(default=(), compare=False)

    @property
    def omega_text(self) -> str:
        return self.omega.render()

    def parameter_values(self) -> Dict[str, Optional[GaussianRational]]:
        return dict(self.values)

    def bound_values(self) -> Dict[str, GaussianRational]:
        return {k: v for k, v in self.values if v is not None}

    def free_parameters(self) -> List[str]:
        names = self.omega.variables() - {"n"}
        return sorted((v for v in names if u_index(v) is None), key=symbol_rank)

    def is_autonomous(self) -> bool:
        return "n" not in self.omega.variables()

    def bind(self, values: Mapping[str, Any]) -> "DifferenceEquation":
        """Substitute parameter values; inequations are rechecked on the bound point."""
        merged = dict(self.values)
        for name, value in values.items():
            if name not in self.parameters:
                raise EquationError(f"unknown parameter {name!r}")
            merged[name] = None if value is None else GaussianRational.coerce(value)
        exact = {sympy.Symbol(k): v.to_sympy() for k, v in merged.items() if v is not None}
        implied = {sympy.Symbol(k): sympy.expand(v.xreplace(exact)) for k, v in self.substitution}
        for target, value in implied.items():
            if target in exact and not value.free_symbols and not _is_zero(exact[target] - value):
                raise InconsistentAssumptions(f"value of {target} contradicts {target} = {value}")
        check_inequations(self.assumptions, {**implied, **exact})
        omega = self.omega.substitute_many({k.name: v for k, v in exact.items()}) if exact else self.omega
        return DifferenceEquation(
            order=self.order,
            omega=omega,
            parameters=self.parameters,
            assumptions=self.assumptions,
            values=tuple(sorted(merged.items())),
            raw_omega_text=self.raw_omega_text,
            name=self.name,
            substitution=self.substitution,
        )

    def instantiate(self, assumptions: Iterable[str | Assumption]) -> "DifferenceEquation":
        """Add assumptions: equalities are substituted into omega, inequations checked."""
        extra = tuple(a if isinstance(a, Assumption) else Assumption.parse(a) for a in assumptions)
        return make_equation(
            self.raw_omega_text or self.omega_text,
            self.order,
            params=self.parameters,
            assumptions=self.assumptions + extra,
            values=self.bound_values(),
            name=self.name,
        )

    def require_bound(self) -> None:
        free = self.free_parameters()
        if free:
            raise UnboundParameterError(f"parameters {', '.join(free)} have no value")

    def to_json(self) -> Dict[str, Any]:
        return {
            "omega": self.raw_omega_text or self.omega_text,
            "p": self.order,
            "params": {
                name: (str(value) if value is not None else None)
                for name, value in [(p, self.parameter_values().get(p)) for p in self.parameters]
            },
            "assumptions": [a.text() for a in self.assumptions],
        }

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "order": self.order,
            "omega": self.omega_text,
            "parameters": list(self.parameters),
            "assumptions": [a.text() for a in self.assumptions],
            "autonomous": self.is_autonomous(),
        }


def make_equation(
    omega_text: str,
    p: int,
    params: Iterable[str] = (),
    assumptions: Iterable[str | Assumption] = (),
    values: Optional[Mapping[str, Any]] = None,
    name: str = "",
) -> DifferenceEquation:
    if p < 1:
        raise EquationError("order p must be positive")
    params = tuple(params)
    for param in params:
        if not re.match(r"^[a-z][a-z0-9_]*$", param) or param in {"n", "i", "u", "exp", "sin", "cos"}:
            raise EquationError(f"invalid parameter name {param!r}")
    expr = parse_expr(omega_text)
    omega = RationalFunction.from_expr(expr)
    allowed = {"n", *params, *(f"U{k}" for k in range(p))}
    for var in omega.variables():
        index = u_index(var)
        if index is not None and index >= p:
            raise EquationError(f"u({index}) is not allowed in omega of an order-{p} equation")
        if var not in allowed:
            raise EquationError(f"undeclared symbol {var!r} in omega")
    parsed = tuple(a if isinstance(a, Assumption) else Assumption.parse(a) for a in assumptions)
    for assumption in parsed:
        stray = (assumption.difference().free_symbols) - {sympy.Symbol(x) for x in params}
        if stray:
            raise EquationError(f"assumption {assumption} uses undeclared symbols {sorted(map(str, stray))}")
    substitution = solve_equalities(parsed, params)
    check_inequations(parsed, substitution)
    if substitution:
        omega = omega.substitute_many({k.name: v for k, v in substitution.items()})
    equation = DifferenceEquation(
        order=p,
        omega=omega,
        parameters=params,
        assumptions=parsed,
        values=tuple(sorted((k, None) for k in params)),
        raw_omega_text=omega_text,
        name=name,
        substitution=tuple(sorted((k.name, v) for k, v in substitution.items())),
    )
    if values:
        equation = equation.bind(values)
    logger.debug("built equation %s: u(n+%d) = %s", name or "<anon>", p, equation.omega_text)
    return equation


def equation_from_json(payload: Mapping[str, Any] | str) -> DifferenceEquation:
    """Read {omega, p, params: {name: value|null}, assumptions: [..]}."""
    if isinstance(payload, str):
        payload = json.loads(payload)
    try:
        omega_text = str(payload["omega"])
        p = int(payload["p"])
    except (KeyError, TypeError, ValueError) as exc:
        raise EquationError(f"equation JSON needs 'omega' and integer 'p': {exc}") from exc
    params = payload.get("params") or {}
    if isinstance(params, list):
        params = {name: None for name in params}
    values = {k: v for k, v in params.items() if v is not None}
    return make_equation(
        omega_text,
        p,
        params=list(params),
        assumptions=payload.get("assumptions") or [],
        values={k: GaussianRational.parse(str(v)) for k, v in values.items()},
        name=str(payload.get("name", "")),
    )
