from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import sympy

from packages.eqmodel.equation import DifferenceEquation
from packages.eqmodel.simulate import OK, simulate
from packages.reduce.solutions import ClosedFormSolution
from packages.symexpr.gaussian import GaussianRational

logger = logging.getLogger("dsym.reduce")

DEFAULT_RANGE = (0, 30)
DEFAULT_TOLERANCE = 1e-9
DEFAULT_U0 = 1
DEFAULT_U1 = 3

MATCH = "match"
MISMATCH = "mismatch"

FormulaFn = Callable[[int, sympy.Expr, sympy.Expr], sympy.Expr]


@dataclass(frozen=True)
class FormulaBranch:
    """One branch of a published closed form u(n; u0, u1).

    ``data`` gives the initial values the formula claims to start from when
    it is a particular solution (for instance one that pins u1 to u0).
    """

    formula_id: str
    branch: str
    evaluate: FormulaFn
    description: str = ""
    data: Optional[Callable[[sympy.Expr, sympy.Expr], Tuple[sympy.Expr, sympy.Expr]]] = None


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    first_fail_n: Optional[int] = None
    max_abs_err: float = 0.0
    checked: List[int] = field(default_factory=list)

    def record(self, n: int, error: float, ok: bool) -> None:
        self.checked.append(n)
        self.max_abs_err = max(self.max_abs_err, error)
        if not ok and self.passed:
            self.passed = False
            self.first_fail_n = n

    def to_json(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "first_fail_n": self.first_fail_n,
            "max_abs_err": self.max_abs_err,
            "checked": len(self.checked),
        }


@dataclass
class AuditReport:
    formula_id: str
    branch: str
    verdict: str
    first_fail_n: Optional[int]
    max_abs_err: float
    range: Tuple[int, int]
    checks: List[CheckResult] = field(default_factory=list)
    initial_data: Tuple[str, str] = ("", "")
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "formula_id": self.formula_id,
            "branch": self.branch,
            "verdict": self.verdict,
            "first_fail_n": self.first_fail_n,
            "max_abs_err": self.max_abs_err,
            "range": list(self.range),
            "checks": [c.to_json() for c in self.checks],
            "initial_data": list(self.initial_data),
            "notes": self.notes,
        }


def _exact(value: Any) -> sympy.Expr:
    if isinstance(value, GaussianRational):
        return value.to_sympy()
    return sympy.sympify(value)


def _compare(got: sympy.Expr, want: sympy.Expr, tol: float) -> Tuple[float, bool]:
    difference = sympy.expand(sympy.radsimp(got - want))
    if difference == 0:
        return 0.0, True
    error = abs(complex(sympy.N(difference, 30)))
    scale = max(1.0, abs(complex(sympy.N(want, 30))))
    return error, error <= tol * scale


def as_branch(formula: Union[FormulaBranch, ClosedFormSolution], formula_id: str = "closed-form") -> FormulaBranch:
    if isinstance(formula, FormulaBranch):
        return formula
    return FormulaBranch(formula_id, "principal", lambda n, u0, u1: formula.value(n), formula.display)


def audit_published_solution(
    eq: DifferenceEquation,
    formula: Union[FormulaBranch, ClosedFormSolution],
    n_range: Tuple[int, int] = DEFAULT_RANGE,
    tol: float = DEFAULT_TOLERANCE,
    u0: Any = DEFAULT_U0,
    u1: Any = DEFAULT_U1,
) -> AuditReport:
    """Check a closed form two ways and never trust it.

    The initial-data check compares the formula at n < order with the
    declared u0, u1. The recurrence check iterates the equation exactly
    from the formula's own first values and compares over ``n_range``.
    The verdict is a match only when both pass.
    """
    branch = as_branch(formula)
    lo, hi = n_range
    if lo < 0 or hi < lo:
        raise ValueError(f"bad audit range {n_range}")
    u0 = _exact(u0)
    u1 = _exact(u1)
    declared = branch.data(u0, u1) if branch.data else (u0, u1)
    order = eq.order
    values: Dict[int, sympy.Expr] = {}

    def value(n: int) -> sympy.Expr:
        if n not in values:
            values[n] = sympy.expand(sympy.radsimp(branch.evaluate(n, u0, u1)))
        return values[n]

    initial = CheckResult("initial_data")
    for n, want in enumerate(declared[:order]):
        error, ok = _compare(value(n), want, tol)
        initial.record(n, error, ok)

    recurrence = CheckResult("recurrence")
    notes: List[str] = []
    trajectory = simulate(eq, [value(n) for n in range(order)], steps=max(hi - order + 1, 0), mode="exact")
    for n in range(max(lo, order), hi + 1):
        offset = n - trajectory.start
        if trajectory.flags[offset] != OK:
            notes.append(f"iteration from the formula's own data is singular at n = {n}")
            break
        error, ok = _compare(value(n), _exact(trajectory.values[offset]), tol)
        recurrence.record(n, error, ok)

    failures = [c.first_fail_n for c in (initial, recurrence) if not c.passed]
    report = AuditReport(
        formula_id=branch.formula_id,
        branch=branch.branch,
        verdict=MATCH if not failures else MISMATCH,
        first_fail_n=min(failures) if failures else None,
        max_abs_err=max(initial.max_abs_err, recurrence.max_abs_err),
        range=(lo, hi),
        checks=[initial, recurrence],
        initial_data=(str(declared[0]), str(declared[1]) if order > 1 else ""),
        notes=notes,
    )
    logger.info("audit %s/%s: %s (first failure %s)", report.formula_id, report.branch, report.verdict, report.first_fail_n)
    return report


def audit_branches(
    eq: DifferenceEquation,
    branches: Sequence[FormulaBranch],
    n_range: Tuple[int, int] = DEFAULT_RANGE,
    tol: float = DEFAULT_TOLERANCE,
    u0: Any = DEFAULT_U0,
    u1: Any = DEFAULT_U1,
) -> List[AuditReport]:
    return [audit_published_solution(eq, b, n_range, tol, u0, u1) for b in branches]
