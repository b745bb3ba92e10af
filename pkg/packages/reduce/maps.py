from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import sympy

from packages.eqmodel.equation import DifferenceEquation
from packages.reduce.invariants import RATIO, Invariant, UnsupportedFamily
from packages.seqform.roots import NonCyclotomicRoot, identify_root
from packages.seqform.sequence import coefficient_text
from packages.symexpr.rational import u_symbol

logger = logging.getLogger("dsym.reduce")

V = sympy.Symbol("v")
N = sympy.Symbol("n")

LINEAR = "linear"
MOEBIUS = "moebius"
GENERAL = "general"

MAX_ORBIT_PERIOD = 12


class NotClosed(ValueError):
    pass


def _zero(value: sympy.Expr) -> bool:
    return sympy.expand(sympy.radsimp(value)) == 0


@dataclass(frozen=True)
class ReducedMap:
    """First-order map v(n+1) = expression(n, v)."""

    kind: str
    expression: sympy.Expr
    r: Optional[sympy.Expr] = None
    s: Optional[sympy.Expr] = None
    matrix: Optional[sympy.Matrix] = None

    def apply(self, v: Any, n: int = 0) -> sympy.Expr:
        v = sympy.sympify(v)
        if self.matrix is not None:
            (a, b), (c, d) = self.matrix.tolist()
            den = sympy.expand(c * v + d)
            if _zero(den):
                raise ZeroDivisionError(f"map is singular at v = {v}")
            return sympy.expand(sympy.radsimp((a * v + b) / den))
        num, den = sympy.fraction(sympy.together(self.expression.xreplace({V: v, N: n})))
        if _zero(den):
            raise ZeroDivisionError(f"map is singular at v = {v}, n = {n}")
        return sympy.expand(sympy.radsimp(num / den))

    def is_autonomous(self) -> bool:
        return N not in self.expression.free_symbols

    def text(self) -> str:
        return f"v(n+1) = {coefficient_text(self.expression)}"

    def to_json(self) -> Dict[str, Any]:
        payload: Dict[str, Any] = {"kind": self.kind, "map": coefficient_text(self.expression)}
        if self.kind == LINEAR:
            payload["r"] = coefficient_text(self.r)
            payload["s"] = coefficient_text(self.s)
        if self.matrix is not None:
            payload["matrix"] = [[coefficient_text(x) for x in row] for row in self.matrix.tolist()]
        return payload


def _classify(expression: sympy.Expr) -> ReducedMap:
    expression = sympy.cancel(sympy.together(expression))
    num, den = sympy.fraction(expression)
    num = sympy.expand(num)
    den = sympy.expand(den)
    num_degree = sympy.degree(num, V) if num != 0 else 0
    den_degree = sympy.degree(den, V)
    if den_degree == 0 and num_degree <= 1:
        r = sympy.cancel(num.coeff(V, 1) / den)
        s = sympy.cancel(num.coeff(V, 0) / den)
        if not _zero(r):
            return ReducedMap(LINEAR, expression, r=r, s=s)
    if num_degree <= 1 and den_degree <= 1 and N not in expression.free_symbols:
        a, b = num.coeff(V, 1), num.coeff(V, 0)
        c, d = den.coeff(V, 1), den.coeff(V, 0)
        lead = c if not _zero(c) else d
        matrix = sympy.ImmutableMatrix([[a, b], [c, d]]).applyfunc(lambda x: sympy.expand(sympy.radsimp(x / lead)))
        if not _zero(matrix.det()):
            return ReducedMap(MOEBIUS, expression, matrix=matrix)
    return ReducedMap(GENERAL, expression)


def reduced_map(eq: DifferenceEquation, inv: Invariant) -> ReducedMap:
    """Shift the invariant once, substitute u(2) = omega and eliminate u(0)."""
    if eq.order != 2:
        raise UnsupportedFamily(f"reduction is implemented for second-order equations, got order {eq.order}")
    u0, u1 = u_symbol(0), u_symbol(1)
    omega = eq.omega.as_sympy()
    if eq.substitution:
        omega = omega.xreplace({sympy.Symbol(k): v for k, v in eq.substitution})
    if inv.kind == RATIO:
        shifted = omega / u1
        replacement = V * u0
    else:
        rho = inv.rho_value()
        shifted = omega - rho * u1
        replacement = V + rho * u0
    expression = sympy.cancel(sympy.together(shifted.xreplace({u1: replacement})))
    if u0 in expression.free_symbols:
        raise NotClosed(f"{inv.text()} does not reduce {eq.name or eq.omega_text}: u(0) survives")
    result = _classify(expression)
    logger.info("reduced %s by %s: %s map", eq.name or eq.omega_text, inv.kind, result.kind)
    return result


def is_scalar(matrix: sympy.Matrix) -> bool:
    return _zero(matrix[0, 1]) and _zero(matrix[1, 0]) and _zero(matrix[0, 0] - matrix[1, 1])


def _eigen_power(value: sympy.Expr, n: int) -> sympy.Expr:
    try:
        return (identify_root(value) ** n).exact_value()
    except NonCyclotomicRoot:
        return sympy.expand(value**n)


def matrix_power(matrix: sympy.Matrix, n: int) -> sympy.Matrix:
    """M**n from the eigen decomposition, falling back to repeated products when defective."""
    if n < 0:
        raise ValueError("negative matrix power")
    if not matrix.is_diagonalizable():
        result = sympy.eye(2)
        for _ in range(n):
            result = result * matrix
        return result.applyfunc(lambda x: sympy.expand(sympy.radsimp(x)))
    P, D = matrix.diagonalize()
    powered = sympy.diag(*[_eigen_power(D[i, i], n) for i in range(D.rows)])
    return (P * powered * P.inv()).applyfunc(lambda x: sympy.expand(sympy.radsimp(x)))


def orbit_period(matrix: sympy.Matrix, limit: int = MAX_ORBIT_PERIOD) -> Optional[int]:
    """Least P <= limit with M**P scalar, so every orbit of the map repeats after P steps."""
    power = sympy.eye(2)
    for p in range(1, limit + 1):
        power = (power * matrix).applyfunc(lambda x: sympy.expand(sympy.radsimp(x)))
        if is_scalar(power):
            return p
    return None
