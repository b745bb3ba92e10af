from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import sympy

from packages.eqmodel.equation import DifferenceEquation
from packages.eqmodel.simulate import defect_is_zero, recurrence_defect
from packages.reduce.invariants import RATIO, Invariant
from packages.reduce.maps import LINEAR, MOEBIUS, ReducedMap, matrix_power, orbit_period
from packages.seqform.roots import NonCyclotomicRoot, RootOfUnityScalar, identify_root
from packages.seqform.sequence import (
    SequenceClosedForm,
    Term,
    coefficient_text,
    constant,
    geometric,
    power_of_n,
    real_form,
)
from packages.symexpr.gaussian import GaussianRational

logger = logging.getLogger("dsym.reduce")

V0 = sympy.Symbol("v0")
RECONSTRUCT_CHECK_STEPS = 30


class SingularInitialData(ValueError):
    pass


class ReconstructionError(ValueError):
    pass


def _simplify(value: sympy.Expr) -> sympy.Expr:
    value = sympy.radsimp(sympy.cancel(sympy.together(value)))
    return sympy.expand(value) if not value.free_symbols else sympy.cancel(value)


def _sympy_value(value: Any) -> sympy.Expr:
    if isinstance(value, GaussianRational):
        return value.to_sympy()
    if isinstance(value, complex):
        return sympy.nsimplify(value.real) + sympy.I * sympy.nsimplify(value.imag)
    return sympy.sympify(value)


@dataclass
class ClosedFormSolution:
    """A solution n -> value in closed form.

    ``sequence`` is set when the solution is an exponential polynomial;
    otherwise ``evaluator`` computes values exactly, either from a closed
    formula (matrix powers, telescoped products) or, for ``kind == "lazy"``,
    by plain iteration.
    """

    variable: str
    kind: str
    evaluator: Callable[[int], sympy.Expr]
    sequence: Optional[SequenceClosedForm] = None
    period: Optional[int] = None
    display: str = ""
    notes: List[str] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
    source: Optional[ReducedMap] = None
    start: Optional[sympy.Expr] = None

    @property
    def is_closed(self) -> bool:
        return self.kind != "lazy"

    def value(self, n: int) -> sympy.Expr:
        if n < 0:
            raise ValueError("solutions are indexed from n = 0")
        if self.sequence is not None:
            return self.sequence.exact_value(n)
        return self.evaluator(n)

    def values(self, count: int) -> List[sympy.Expr]:
        return [self.value(n) for n in range(count)]

    def bind(self, symbol: sympy.Symbol, value: Any) -> "ClosedFormSolution":
        value = _sympy_value(value)
        if self.source is not None and self.start == symbol:
            return solve_first_order(self.source, value)
        sequence = None
        if self.sequence is not None:
            sequence = SequenceClosedForm.from_terms(
                Term(t.coefficient.xreplace({symbol: value}), t.root, t.degree) for t in self.sequence.terms
            )
        inner = self.evaluator
        return ClosedFormSolution(
            variable=self.variable,
            kind=self.kind,
            evaluator=lambda n: _simplify(inner(n).xreplace({symbol: value})),
            sequence=sequence,
            period=self.period,
            display=self.display,
            notes=list(self.notes),
            metadata=dict(self.metadata),
        )

    def to_json(self, preview: int = 6) -> Dict[str, Any]:
        payload: Dict[str, Any] = {
            "variable": self.variable,
            "kind": self.kind,
            "display": self.display,
            "period": self.period,
            "notes": self.notes,
        }
        if self.sequence is not None:
            payload["sequence"] = self.sequence.to_json()
            payload["real_form"] = real_form(self.sequence)
        payload["values"] = [coefficient_text(_simplify(v)) for v in self.values(preview)]
        payload.update(self.metadata)
        return payload


def _from_sequence(variable: str, seq: SequenceClosedForm, display: str = "") -> ClosedFormSolution:
    solution = ClosedFormSolution(variable, "sequence", evaluator=seq.exact_value, sequence=seq)
    solution.display = display or f"{variable}(n) = {seq.text()}"
    solution.metadata["real_display"] = f"{variable}(n) = {real_form(seq)}"
    return solution


def lazy_solution(m: ReducedMap, v0: Any, reason: str = "") -> ClosedFormSolution:
    """Iterate the map from v0 and memoize; not a closed form."""
    v0 = _sympy_value(v0)
    cache: List[sympy.Expr] = [v0]

    def evaluate(n: int) -> sympy.Expr:
        while len(cache) <= n:
            cache.append(_simplify(m.apply(cache[-1], len(cache) - 1)))
        return cache[n]

    if reason:
        logger.warning("no closed form for %s: %s", m.text(), reason)
    solution = ClosedFormSolution("v", "lazy", evaluator=evaluate, display=f"iterate {m.text()}")
    if reason:
        solution.notes.append(reason)
    return solution


def _solve_linear(m: ReducedMap, v0: sympy.Expr) -> ClosedFormSolution:
    r, s = m.r, m.s
    if not m.is_autonomous():
        return lazy_solution(m, v0, "coefficients depend on n")
    if s == 0 or defect_is_zero(s):
        try:
            root = identify_root(r)
        except NonCyclotomicRoot as exc:
            return lazy_solution(m, v0, str(exc))
        return _from_sequence("v", geometric(root, v0))
    if defect_is_zero(r - 1):
        return _from_sequence("v", constant(v0) + power_of_n(1, s))
    try:
        root = identify_root(r)
    except NonCyclotomicRoot as exc:
        return lazy_solution(m, v0, str(exc))
    fixed = _simplify(s / (1 - r))
    return _from_sequence("v", geometric(root, _simplify(v0 - fixed)) + constant(fixed))


def _solve_moebius(m: ReducedMap, v0: sympy.Expr) -> ClosedFormSolution:
    matrix = m.matrix
    for eigenvalue in matrix.eigenvals():
        try:
            identify_root(eigenvalue)
        except NonCyclotomicRoot as exc:
            return lazy_solution(m, v0, str(exc))
    cycle = orbit_period(matrix)

    def evaluate(n: int) -> sympy.Expr:
        step = n % cycle if cycle else n
        if step == 0 and (cycle or n == 0):
            return v0
        (a, b), (c, d) = matrix_power(matrix, step).tolist()
        den = _simplify(c * v0 + d)
        if den == 0:
            raise ZeroDivisionError(f"orbit of v0 = {v0} reaches the pole at n = {n}")
        return _simplify((a * v0 + b) / den)

    solution = ClosedFormSolution("v", "moebius", evaluator=evaluate, period=cycle)
    rows = [[coefficient_text(x) for x in row] for row in matrix.tolist()]
    solution.display = f"v(n) = M^n . v0 with M = {rows}"
    solution.metadata["matrix"] = rows
    solution.metadata["eigenvalues"] = [identify_root(e).text() for e in matrix.eigenvals()]
    if cycle:
        solution.notes.append(f"every orbit has period {cycle}")
    c, d = matrix[1, 0], matrix[1, 1]
    if c != 0:
        solution.notes.append(f"v0 = {coefficient_text(_simplify(-d / c))} and its preimages are excluded")
    return solution


def solve_first_order(m: ReducedMap, v0: Any = V0) -> ClosedFormSolution:
    """Closed form of v(n) for a linear or Moebius map; lazy iteration otherwise."""
    v0 = _sympy_value(v0)
    if m.kind == LINEAR:
        solution = _solve_linear(m, v0)
    elif m.kind == MOEBIUS:
        solution = _solve_moebius(m, v0)
    else:
        solution = lazy_solution(m, v0, "map is neither linear nor Moebius")
    solution.source = m
    solution.start = v0
    if solution.is_closed:
        try:
            stepped = m.apply(solution.value(0), 0)
            expected = solution.value(1)
        except ZeroDivisionError:
            stepped = expected = None
        if stepped is not None and _simplify(stepped - expected) != 0:
            raise RuntimeError(f"closed form for {m.text()} disagrees with one iteration step")
        logger.info("solved %s map: %s", m.kind, solution.display)
    return solution


def _ratio_product(v_solution: ClosedFormSolution, u0: sympy.Expr) -> ClosedFormSolution:
    cycle = v_solution.period
    if cycle is None and v_solution.sequence is not None and v_solution.sequence.terms:
        seq = v_solution.sequence
        if len(seq.terms) == 1 and seq.terms[0].degree == 0 and seq.terms[0].root == RootOfUnityScalar.one():
            try:
                root = identify_root(seq.terms[0].coefficient)
            except NonCyclotomicRoot:
                root = None
            if root is not None:
                return _from_sequence("u", geometric(root, u0))
    if cycle is not None:
        orbit = [v_solution.value(k) for k in range(cycle)]
        if all(_simplify(v - orbit[0]) == 0 for v in orbit[1:]):
            try:
                return _from_sequence("u", geometric(identify_root(orbit[0]), u0))
            except NonCyclotomicRoot:
                pass
        kappa = _simplify(sympy.Mul(*orbit))
        partial = [u0]
        for v in orbit[:-1]:
            partial.append(_simplify(partial[-1] * v))

        def evaluate(n: int) -> sympy.Expr:
            return _simplify(kappa ** (n // cycle) * partial[n % cycle])

        solution = ClosedFormSolution("u", "product", evaluator=evaluate, period=cycle if kappa == 1 else None)
        solution.display = f"u(n) = kappa^floor(n/{cycle}) * u0 * prod(v(k), k < n mod {cycle})"
        solution.metadata["kappa"] = coefficient_text(kappa)
        return solution

    def evaluate_product(n: int) -> sympy.Expr:
        value = u0
        for k in range(n):
            value = value * v_solution.value(k)
        return _simplify(value)

    solution = ClosedFormSolution("u", "product", evaluator=evaluate_product)
    solution.display = "u(n) = u0 * prod(v(k), k < n)"
    return solution


def _translation_sum(inv: Invariant, v_solution: ClosedFormSolution, u0: sympy.Expr) -> ClosedFormSolution:
    rho = inv.rho
    seq = v_solution.sequence
    if seq is not None and all(t.degree == 0 for t in seq.terms):
        # u(n) = rho^n u0 + sum over terms c*mu^n of c*(mu^n - rho^n)/(mu - rho)
        terms = [Term(u0, rho, 0)]
        rho_value = rho.exact_value()
        for t in seq.terms:
            if t.root == rho:
                terms.append(Term(_simplify(t.coefficient / rho_value), rho, 1))
                continue
            weight = _simplify(t.coefficient / (t.root.exact_value() - rho_value))
            terms.append(Term(weight, t.root, 0))
            terms.append(Term(-weight, rho, 0))
        return _from_sequence("u", SequenceClosedForm.from_terms(terms))

    rho_value = inv.rho_value()

    def evaluate(n: int) -> sympy.Expr:
        value = u0
        for k in range(n):
            value = _simplify(rho_value * value + v_solution.value(k))
        return value

    solution = ClosedFormSolution("u", "sum", evaluator=evaluate)
    solution.display = f"u(n+1) = {coefficient_text(rho_value, True)}*u(n) + v(n)"
    return solution


def reconstruct(
    eq: DifferenceEquation,
    inv: Invariant,
    v_solution: ClosedFormSolution,
    u0: Any,
    u1: Any,
    check_steps: int = RECONSTRUCT_CHECK_STEPS,
) -> ClosedFormSolution:
    """Recover u(n) from a solved invariant and the initial data u0, u1.

    The v solution may still carry the symbol v0; it is bound to the
    invariant's value on (u0, u1). The result is checked against the
    equation exactly for n = 0..check_steps.
    """
    u0 = _sympy_value(u0)
    u1 = _sympy_value(u1)
    if inv.kind == RATIO and sympy.expand(u0) == 0:
        raise SingularInitialData("ratio reduction needs u0 != 0")
    v_start = inv.evaluate(u0, u1)
    bound = v_solution.bind(V0, v_start)
    if inv.kind == RATIO:
        solution = _ratio_product(bound, u0)
    else:
        solution = _translation_sum(inv, bound, u0)
    solution.metadata["invariant"] = inv.text()
    try:
        _check(eq, solution, u0, u1, check_steps)
    except ZeroDivisionError as exc:
        raise SingularInitialData(str(exc)) from exc
    logger.info("reconstructed %s: %s", eq.name or eq.omega_text, solution.display)
    return solution


def _check(eq: DifferenceEquation, solution: ClosedFormSolution, u0: sympy.Expr, u1: sympy.Expr, steps: int) -> None:
    if _simplify(solution.value(0) - u0) != 0 or _simplify(solution.value(1) - u1) != 0:
        raise ReconstructionError("reconstructed solution does not reproduce u0, u1")
    values = solution.values(steps + eq.order)
    for n in range(steps):
        window = values[n : n + eq.order + 1]
        defect = recurrence_defect(eq, window, n)
        if defect.free_symbols:
            defect = sympy.cancel(sympy.together(defect))
        if not defect_is_zero(defect):
            raise ReconstructionError(f"reconstructed solution violates the equation at n = {n}")
