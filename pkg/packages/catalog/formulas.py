"""Published closed-form solutions, transcribed for auditing.

Each formula is stored exactly as printed, one FormulaBranch per reading of
its multivalued powers. Nothing here is assumed correct; the expected
verdicts are what the audit produces with u0 = 1, u1 = 3 over n = 0..30.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import sympy

from packages.reduce.audit import MATCH, MISMATCH, FormulaBranch
from packages.seqform.roots import RootOfUnityScalar


@dataclass(frozen=True)
class PublishedFormula:
    formula_id: str
    equation_id: str
    branch: str
    anchor: str
    display: str
    branches: Tuple[FormulaBranch, ...]
    expected: Dict[str, Tuple[str, Optional[int]]] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    def to_json(self) -> Dict[str, object]:
        return {
            "formula_id": self.formula_id,
            "equation": self.equation_id,
            "branch": self.branch,
            "anchor": self.anchor,
            "display": self.display,
            "branches": [b.branch for b in self.branches],
            "expected": {k: {"verdict": v, "first_fail_n": n} for k, (v, n) in self.expected.items()},
            "notes": list(self.notes),
        }


def _root_power(k: int, m: int, power: int) -> sympy.Expr:
    return (RootOfUnityScalar.make(1, k, m) ** power).exact_value()


def _fixed_point(k: int) -> FormulaBranch:
    def evaluate(n: int, u0: sympy.Expr, u1: sympy.Expr) -> sympy.Expr:
        return _root_power(k, 3, n) * u0

    return FormulaBranch(
        "dP1-fixed-point",
        "principal" if k == 1 else "conjugate",
        evaluate,
        "u(n) = exp(2*pi*i*n/3)*u0" if k == 1 else "u(n) = exp(-2*pi*i*n/3)*u0",
        data=lambda u0, u1: (u0, _root_power(k, 3, 1) * u0),
    )


def _dp1_characteristic(k: int) -> FormulaBranch:
    # (-1)^(2(n-1)/3) read as w^(n-1) with w = exp(+-2*pi*i/3); (-1)^(2/3) read as w.
    def evaluate(n: int, u0: sympy.Expr, u1: sympy.Expr) -> sympy.Expr:
        w = _root_power(k, 3, 1)
        bracket = 1 + _root_power(k, 3, -2 * n) * (1 - _root_power(k, 3, 2 * n)) / (-1 + w)
        return _root_power(k, 3, n - 1) * (u1 - w * u0) * bracket

    return FormulaBranch(
        "dP1-characteristic",
        "principal" if k == 1 else "conjugate",
        evaluate,
        "u(n) = (-1)^(2(n-1)/3)*(u1 - exp(2*pi*i/3)*u0)*[1 + exp(-4*i*n*pi/3)*(1 - exp(4*i*n*pi/3))/(-1 + (-1)^(2/3))]",
    )


def _dp2_general(k: int) -> FormulaBranch:
    unit = _root_power(k, 4, 1)

    def evaluate(n: int, u0: sympy.Expr, u1: sympy.Expr) -> sympy.Expr:
        weight = sympy.Rational(3, 2) - sympy.Rational(1, 2) * sympy.Integer(-1) ** n
        return (u1 - unit * u0) * weight * _root_power(k, 4, n - 1)

    return FormulaBranch(
        "dP2-general",
        "principal" if k == 1 else "conjugate",
        evaluate,
        "u(n) = (u1 - i*u0)*[3/2 - (1/2)*(-1)^n]*i^(n-1)",
    )


def _ceil_half(x: int) -> int:
    return -((-x) // 2)


def _dp4_ceiling() -> FormulaBranch:
    def evaluate(n: int, u0: sympy.Expr, u1: sympy.Expr) -> sympy.Expr:
        r = u0 / u1
        return (
            sympy.Integer(-1) ** (n - 1)
            * sympy.Integer(2) ** (n + _ceil_half(1 - n) - 1)
            * (2 - 2 * r) ** (_ceil_half(2 - n) - 1)
            * r ** (_ceil_half(1 - n) + 1)
        )

    return FormulaBranch(
        "dP4-ceiling",
        "principal",
        evaluate,
        "u(n) = (-1)^(n-1)*2^(n+ceil((1-n)/2)-1)*(2-2*u0/u1)^(ceil((2-n)/2)-1)*(u0/u1)^(ceil((1-n)/2)+1)",
    )


FORMULAS: List[PublishedFormula] = [
    PublishedFormula(
        "dP1-fixed-point",
        "dP1",
        "zero",
        "dP-I, reduction by the scaling symmetry: geometric solutions",
        "u(n) = exp(+-2*pi*i*n/3)*u0",
        (_fixed_point(1), _fixed_point(2)),
        expected={"principal": (MATCH, None), "conjugate": (MATCH, None)},
        notes=("particular solutions: u1 is pinned to exp(+-2*pi*i/3)*u0",),
    ),
    PublishedFormula(
        "dP1-characteristic",
        "dP1",
        "zero",
        "dP-I, reduction by X2 + i*X3",
        "u(n) = (-1)^(2(n-1)/3)*(u1 - exp(2*pi*i/3)*u0)*[...]",
        (_dp1_characteristic(1), _dp1_characteristic(2)),
        expected={"principal": (MISMATCH, 0), "conjugate": (MISMATCH, 0)},
        notes=(
            "both readings of the multivalued power satisfy the recurrence",
            "neither reproduces u0 at n = 0",
        ),
    ),
    PublishedFormula(
        "dP2-general",
        "dP2",
        "zero",
        "dP-II, general solution after reduction by X2 + i*X3",
        "u(n) = (u1 - i*u0)*[3/2 - (1/2)*(-1)^n]*i^(n-1)",
        (_dp2_general(1), _dp2_general(3)),
        expected={"principal": (MISMATCH, 0), "conjugate": (MISMATCH, 0)},
        notes=(
            "at n = 0 the formula gives -u0 - i*u1",
            "the reduced map is v -> -i*v, not v -> i*v as printed",
        ),
    ),
    PublishedFormula(
        "dP4-ceiling",
        "dP4",
        "zero",
        "dP-IV with mu = eps0 = 0, ceiling-function solution",
        "u(n) = (-1)^(n-1)*2^(n+ceil((1-n)/2)-1)*(2-2*u0/u1)^(ceil((2-n)/2)-1)*(u0/u1)^(ceil((1-n)/2)+1)",
        (_dp4_ceiling(),),
        expected={"principal": (MISMATCH, 0)},
        notes=(
            "initial data fails at n = 0 and the recurrence fails at n = 2",
            "the true ratio map is v -> -1/(1+v); every orbit has period 3",
        ),
    ),
]
