from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import sympy

from packages.eqmodel.equation import (
    Assumption,
    DifferenceEquation,
    check_inequations,
    solve_equalities,
)
from packages.eqmodel.transforms import is_linear_homogeneous
from packages.seqform.recurrence import RecurrenceConstraint, solve_recurrence
from packages.seqform.roots import NonCyclotomicRoot, RootOfUnityScalar, cyclotomic_roots
from packages.seqform.sequence import SequenceClosedForm, constant, geometric, seq_equal_span
from packages.symexpr.rational import polynomial_coefficients, u_symbol
from packages.symmetry.generator import DEFAULT_MAX_DEGREE, SymmetryGenerator, shift_generator

logger = logging.getLogger("dsym.symmetry")

N = sympy.Symbol("n")
LAM = sympy.Symbol("lam")
XI0 = sympy.Symbol("xi0")
XI1 = sympy.Symbol("xi1")


class DeterminingSystemError(ValueError):
    pass


def alpha_symbol(degree: int, shift: int) -> sympy.Symbol:
    """Unknown coefficient of u^degree in Q(n + shift, u)."""
    return sympy.Symbol(f"alpha_{degree}_{shift}")


def _is_zero(value: sympy.Expr) -> bool:
    value = sympy.expand(value)
    if value == 0:
        return True
    num, _ = sympy.fraction(sympy.together(value))
    num = sympy.expand(num)
    if num == 0:
        return True
    if num.is_number:
        return abs(complex(sympy.N(num, 50))) < 1e-40
    return False


@dataclass
class DeterminingSystem:
    equation: DifferenceEquation
    degree: int
    xi_mode: str
    unknowns: List[sympy.Symbol]
    equations: List[sympy.Expr]
    shifts: Dict[sympy.Symbol, Tuple[int, int]] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        return {
            "degree": self.degree,
            "xi_mode": self.xi_mode,
            "unknowns": [str(u) for u in self.unknowns],
            "equations": [str(e) for e in self.equations],
            "shifts": {str(k): list(v) for k, v in self.shifts.items()},
        }


def extract_determining_system(
    eq: DifferenceEquation,
    degree: int = DEFAULT_MAX_DEGREE,
    xi_mode: str = "affine",
) -> DeterminingSystem:
    """Collect the coefficients of the cleared residual under a polynomial ansatz.

    Q(n+i, x) = sum_j alpha_j_i x^j for i = 0..p and xi = xi1*n + xi0.
    """
    if xi_mode not in ("affine", "none"):
        raise DeterminingSystemError(f"unknown xi mode {xi_mode!r}")
    p = eq.order
    omega = eq.omega.as_sympy()
    shifts = {alpha_symbol(j, i): (j, i) for j in range(degree + 1) for i in range(p + 1)}
    xi = XI1 * N + XI0 if xi_mode == "affine" else sympy.Integer(0)
    total = sum(alpha_symbol(j, p) * omega**j for j in range(degree + 1))
    total -= xi * sympy.diff(omega, N)
    for k in range(p):
        d_omega = sympy.diff(omega, u_symbol(k))
        total -= sum(alpha_symbol(j, k) * u_symbol(k) ** j for j in range(degree + 1)) * d_omega
    numerator, _ = sympy.fraction(sympy.together(total))
    equations = polynomial_coefficients(numerator, [u_symbol(k) for k in range(p)])
    unknowns = list(shifts) + ([XI0, XI1] if xi_mode == "affine" else [])
    logger.info("determining system for %s: %d equations, %d unknowns", eq.name or eq.omega_text, len(equations), len(unknowns))
    return DeterminingSystem(eq, degree, xi_mode, unknowns, equations, shifts)


@dataclass
class RootReport:
    root: RootOfUnityScalar
    multiplicity: int
    nullity: int

    def to_json(self) -> Dict[str, Any]:
        return {"root": self.root.text(), "multiplicity": self.multiplicity, "nullity": self.nullity}


@dataclass
class DeterminingSolution:
    generators: List[SymmetryGenerator] = field(default_factory=list)
    constraints: List[Tuple[int, RecurrenceConstraint]] = field(default_factory=list)
    solutions: Dict[int, List[SequenceClosedForm]] = field(default_factory=dict)
    roots: List[RootReport] = field(default_factory=list)
    characteristic: Optional[sympy.Expr] = None
    notes: List[str] = field(default_factory=list)

    def to_json(self) -> Dict[str, Any]:
        return {
            "generators": [g.to_json() for g in self.generators],
            "constraints": [
                {"degree": degree, "coefficients": rc.to_json(), "text": rc.text()} for degree, rc in self.constraints
            ],
            "roots": [r.to_json() for r in self.roots],
            "characteristic": str(self.characteristic) if self.characteristic is not None else None,
            "notes": self.notes,
        }


def autonomous_shift_symmetry(eq: DifferenceEquation) -> Optional[SymmetryGenerator]:
    if eq.omega.diff("n").is_zero():
        return shift_generator()
    return None


def _coefficient_columns(degree: int) -> List[sympy.Symbol]:
    return [sympy.Symbol(f"c{j}") for j in range(degree + 1)]


def _ansatz_rows(ds: DeterminingSystem, equations: Sequence[sympy.Expr], with_xi: bool) -> List[List[sympy.Expr]]:
    """alpha_j_i -> c_j lam^i, then split each equation by powers of n into rows."""
    columns = _coefficient_columns(ds.degree)
    replacement = {symbol: columns[j] * LAM**i for symbol, (j, i) in ds.shifts.items()}
    if with_xi:
        columns = columns + [XI0, XI1]
    rows: List[List[sympy.Expr]] = []
    seen = set()
    for equation in equations:
        expr = sympy.expand(equation.xreplace(replacement))
        if not with_xi:
            expr = expr.xreplace({XI0: 0, XI1: 0})
        for part in polynomial_coefficients(expr, [N]):
            matrix, _ = sympy.linear_eq_to_matrix([part], columns)
            row = [sympy.expand(x) for x in matrix.row(0)]
            lead = next((x for x in row if x != 0), None)
            if lead is None:
                continue
            key = tuple(sympy.srepr(sympy.cancel(x / lead)) for x in row)
            if key in seen:
                continue
            seen.add(key)
            rows.append(row)
    return rows


def _characteristic(rows: List[List[sympy.Expr]], size: int) -> sympy.Expr:
    """gcd over lam of the maximal minors, with parameter content and lam factors removed."""
    matrix = sympy.Matrix(rows)[:, :size]
    g = sympy.Integer(0)
    for combo in combinations(range(matrix.rows), size):
        minor = sympy.expand(matrix.extract(list(combo), list(range(size))).det(method="berkowitz"))
        if minor == 0:
            continue
        g = minor if g == 0 else sympy.gcd(g, minor)
        if LAM not in g.free_symbols:
            return sympy.Integer(1)
    if g == 0:
        raise DeterminingSystemError("determining system is unconstrained: every lam admits solutions")
    poly = sympy.Poly(g, LAM)
    _, primitive = poly.primitive()
    expr = primitive.as_expr()
    kept = sympy.Integer(1)
    for factor, multiplicity in sympy.factor_list(expr)[1]:
        if LAM not in factor.free_symbols:
            continue
        if sympy.expand(factor - LAM) == 0:
            continue
        if factor.free_symbols - {LAM}:
            raise DeterminingSystemError(f"characteristic factor {factor} depends on parameters")
        kept *= factor**multiplicity
    return sympy.expand(kept)


def _nullspace(matrix: sympy.Matrix) -> List[List[sympy.Expr]]:
    vectors = matrix.nullspace(iszerofunc=_is_zero, simplify=False)
    return [[sympy.cancel(sympy.expand(x)) for x in vector] for vector in vectors]


def _normalize(vector: List[sympy.Expr]) -> List[sympy.Expr]:
    lead = next((x for x in vector if not _is_zero(x)), None)
    if lead is None:
        return vector
    scaled = [sympy.cancel(x / lead) for x in vector]
    denominators = [sympy.fraction(sympy.together(x))[1] for x in scaled]
    common = sympy.Integer(1)
    for den in denominators:
        if den.free_symbols:
            common = sympy.lcm(common, den)
    return [sympy.expand(sympy.cancel(x * common)) for x in scaled]


def _conjugate(value: sympy.Expr) -> sympy.Expr:
    return sympy.expand(value.xreplace({sympy.I: -sympy.I}))


def _annihilates(matrix: sympy.Matrix, vector: List[sympy.Expr]) -> bool:
    product = matrix * sympy.Matrix(vector)
    return all(_is_zero(x) for x in product)


def _parse_assumptions(items: Iterable[Any]) -> List[Assumption]:
    return [item if isinstance(item, Assumption) else Assumption.parse(str(item)) for item in items]


def solve_determining_system(
    ds: DeterminingSystem,
    assumptions: Iterable[Any] = (),
) -> DeterminingSolution:
    """Basis of the symmetry algebra within the ansatz class.

    Each coefficient is sought as c_j lam^n: lam runs over the roots of the
    characteristic gcd, and lam = 1 also carries the xi unknowns. Conjugate
    unit roots are paired into cos/sin generators.
    """
    eq = ds.equation
    extra = _parse_assumptions(assumptions)
    substitution = solve_equalities(extra, eq.parameters)
    prior = {sympy.Symbol(k): v for k, v in eq.substitution}
    check_inequations(list(eq.assumptions) + extra, {**prior, **substitution})
    equations = [sympy.expand(e.xreplace(substitution)) for e in ds.equations]
    equations = [e for e in equations if e != 0]

    autonomous = autonomous_shift_symmetry(eq) is not None
    with_xi = ds.xi_mode == "affine" and not autonomous
    size = ds.degree + 1
    rows = _ansatz_rows(ds, equations, with_xi)
    solution = DeterminingSolution()
    if len(rows) < size:
        raise DeterminingSystemError(
            f"determining system is unconstrained: {len(rows)} independent rows for {size} coefficients"
        )
    characteristic = _characteristic(rows, size)
    solution.characteristic = characteristic
    roots = cyclotomic_roots(characteristic, LAM) if LAM in characteristic.free_symbols else []
    one = RootOfUnityScalar.one()
    if one not in [r for r, _ in roots]:
        roots = [(one, 0)] + roots
    full = sympy.Matrix(rows)
    coefficient_block = full[:, :size]

    def at(root: RootOfUnityScalar, matrix: sympy.Matrix) -> sympy.Matrix:
        value = root.exact_value()
        return matrix.applyfunc(lambda x: sympy.expand(x.xreplace({LAM: value})))

    generators: List[SymmetryGenerator] = []
    done = set()
    root_set = {r for r, _ in roots}
    for root, multiplicity in roots:
        if root in done:
            continue
        done.add(root)
        matrix = at(root, full if root == one else coefficient_block)
        vectors = [_normalize(v) for v in _nullspace(matrix)]
        solution.roots.append(RootReport(root, multiplicity, len(vectors)))
        if root != one and len(vectors) < multiplicity:
            message = f"root {root.text()} has multiplicity {multiplicity} but only {len(vectors)} solutions; n*lam^n terms are not sought"
            logger.warning(message)
            solution.notes.append(message)
        if root == one:
            for vector in vectors:
                q = {j: constant(vector[j]) for j in range(size)}
                xi = (vector[size], vector[size + 1]) if with_xi else (0, 0)
                generators.append(SymmetryGenerator.make(xi, q, provenance="lam=1"))
            continue
        partner = root.conjugate()
        if partner != root and partner in root_set and root.is_unit():
            partner_matrix = at(partner, coefficient_block)
            conjugates = [[_conjugate(x) for x in v] for v in vectors]
            if all(_annihilates(partner_matrix, w) for w in conjugates):
                done.add(partner)
                solution.roots.append(RootReport(partner, dict(roots).get(partner, 0), len(conjugates)))
                for v, w in zip(vectors, conjugates):
                    cos_q = {j: geometric(root, v[j] / 2) + geometric(partner, w[j] / 2) for j in range(size)}
                    sin_q = {
                        j: geometric(root, v[j] / (2 * sympy.I)) + geometric(partner, -w[j] / (2 * sympy.I))
                        for j in range(size)
                    }
                    generators.append(SymmetryGenerator.make((0, 0), cos_q, provenance=f"lam={root.text()} cos"))
                    generators.append(SymmetryGenerator.make((0, 0), sin_q, provenance=f"lam={root.text()} sin"))
                continue
        for vector in vectors:
            q = {j: geometric(root, vector[j]) for j in range(size)}
            generators.append(SymmetryGenerator.make((0, 0), q, provenance=f"lam={root.text()}"))

    generators = [g for g in generators if not g.is_zero()]
    if is_linear_homogeneous(eq):
        _add_translations(eq, generators, solution)
    if autonomous:
        generators.append(shift_generator())
    solution.generators = generators
    _degree_constraints(generators, size, solution)
    logger.info("solved determining system of %s: %d generators", eq.name or eq.omega_text, len(generators))
    return solution


def _linear_recurrence(eq: DifferenceEquation) -> Optional[RecurrenceConstraint]:
    numerator = sympy.expand(eq.omega.as_sympy())
    coefficients = []
    for k in range(eq.order):
        c = sympy.expand(numerator.coeff(u_symbol(k)))
        if c.free_symbols:
            return None
        coefficients.append(-c)
    coefficients.append(sympy.Integer(1))
    if all(c == 0 for c in coefficients[:-1]):
        return None
    return RecurrenceConstraint.make(coefficients)


def _add_translations(eq: DifferenceEquation, generators: List[SymmetryGenerator], solution: DeterminingSolution) -> None:
    """Q = theta(n) for every solution theta of the equation itself."""
    constraint = _linear_recurrence(eq)
    if constraint is None:
        return
    try:
        basis = solve_recurrence(constraint)
    except NonCyclotomicRoot as exc:
        solution.notes.append(f"translation family not expanded: {exc}")
        return
    existing = [g.coefficient(0) for g in generators if not g.has_xi() and g.degree == 0]
    for seq in basis:
        if existing and seq_equal_span(existing + [seq], existing):
            continue
        existing.append(seq)
        generators.append(SymmetryGenerator.make((0, 0), {0: seq}, provenance="translation by solution"))
    solution.constraints.append((0, constraint))
    solution.notes.append(f"translation by solution: {constraint.text()}")


def _degree_constraints(generators: List[SymmetryGenerator], size: int, solution: DeterminingSolution) -> None:
    for degree in range(size):
        roots: List[RootOfUnityScalar] = []
        for g in generators:
            for term in g.coefficient(degree).terms:
                if term.degree == 0 and term.root not in roots:
                    roots.append(term.root)
        if not roots:
            continue
        if any(d == degree for d, _ in solution.constraints):
            continue
        constraint = RecurrenceConstraint.from_roots(roots)
        solution.constraints.append((degree, constraint))
        try:
            solution.solutions[degree] = solve_recurrence(constraint)
        except NonCyclotomicRoot as exc:
            solution.notes.append(f"constraint for degree {degree} not solved: {exc}")
    solution.constraints.sort(key=lambda item: item[0])


def determine(
    eq: DifferenceEquation,
    degree: int = DEFAULT_MAX_DEGREE,
    xi_mode: str = "affine",
    assumptions: Iterable[Any] = (),
) -> DeterminingSolution:
    return solve_determining_system(extract_determining_system(eq, degree, xi_mode), assumptions)


def describe_constraints(solution: DeterminingSolution) -> List[str]:
    return [f"degree {degree}: {rc.text()}" for degree, rc in solution.constraints]
