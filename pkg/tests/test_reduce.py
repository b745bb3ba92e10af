import pytest
import sympy

from packages.catalog.entries import get
from packages.eqmodel.equation import make_equation
from packages.reduce.audit import MATCH, MISMATCH, FormulaBranch, audit_published_solution
from packages.reduce.invariants import RATIO, TRANSLATION, UnsupportedFamily, invariant_from_generator
from packages.reduce.maps import GENERAL, LINEAR, MOEBIUS, NotClosed, matrix_power, orbit_period, reduced_map
from packages.reduce.solutions import SingularInitialData, reconstruct, solve_first_order
from packages.seqform.roots import RootOfUnityScalar
from packages.seqform.sequence import cos_seq, geometric
from packages.symmetry.generator import SymmetryGenerator, scaling_generator, shift_generator

DP4_ZERO = "-u(0)*u(1)/(u(0) + u(1))"


def _same(left: list, right: list) -> bool:
    return len(left) == len(right) and all(sympy.expand(sympy.sympify(a) - b) == 0 for a, b in zip(left, right))


def _quarter_turn() -> SymmetryGenerator:
    return SymmetryGenerator.make((0, 0), {0: geometric(RootOfUnityScalar.make(1, 1, 4))})


def test_invariant_families() -> None:
    eq = make_equation(DP4_ZERO, 2)
    assert invariant_from_generator(eq, scaling_generator(1)).kind == RATIO
    translation = invariant_from_generator(eq, _quarter_turn())
    assert translation.kind == TRANSLATION
    assert translation.rho_value() == sympy.I
    assert translation.evaluate(1, 3) == 3 - sympy.I
    with pytest.raises(UnsupportedFamily):
        invariant_from_generator(eq, shift_generator())
    with pytest.raises(UnsupportedFamily):
        invariant_from_generator(eq, SymmetryGenerator.make((0, 0), {0: cos_seq(1, 4)}))
    with pytest.raises(UnsupportedFamily):
        invariant_from_generator(make_equation("u(2)", 3), scaling_generator(1))


def test_ratio_invariant_at_zero() -> None:
    inv = invariant_from_generator(make_equation(DP4_ZERO, 2), scaling_generator(1))
    with pytest.raises(ZeroDivisionError):
        inv.evaluate(0, 1)


def test_dp4_zero_ratio_map_has_period_three() -> None:
    eq = make_equation(DP4_ZERO, 2)
    m = reduced_map(eq, invariant_from_generator(eq, scaling_generator(1)))
    assert m.kind == MOEBIUS
    assert m.is_autonomous()
    assert m.apply(1) == sympy.Rational(-1, 2)
    assert orbit_period(m.matrix) == 3
    assert matrix_power(m.matrix, 3) == -sympy.eye(2)
    assert len(m.to_json()["matrix"]) == 2


def test_dp2_zero_translation_map_is_rotation() -> None:
    eq = get("dP2", "zero").equation
    m = reduced_map(eq, invariant_from_generator(eq, _quarter_turn()))
    assert m.kind == LINEAR
    assert m.r == -sympy.I
    assert m.s == 0


def test_dp1_zero_ratio_map_matrix() -> None:
    eq = get("dP1", "zero").equation
    m = reduced_map(eq, invariant_from_generator(eq, scaling_generator(1)))
    assert m.kind == MOEBIUS
    assert m.matrix == sympy.Matrix([[-1, -1], [1, 0]])
    assert orbit_period(m.matrix) == 3


def test_non_closing_invariant() -> None:
    eq = get("dP1", "a_nonzero").equation
    with pytest.raises(NotClosed):
        reduced_map(eq, invariant_from_generator(eq, scaling_generator(1)))


def test_moebius_orbit_values() -> None:
    eq = make_equation(DP4_ZERO, 2)
    m = reduced_map(eq, invariant_from_generator(eq, scaling_generator(1)))
    solution = solve_first_order(m, 1)
    assert solution.kind == "moebius"
    assert solution.period == 3
    assert solution.values(4) == [1, sympy.Rational(-1, 2), -2, 1]
    assert solution.to_json()["period"] == 3


def test_reconstruct_dp4_zero_ratio() -> None:
    eq = make_equation(DP4_ZERO, 2)
    inv = invariant_from_generator(eq, scaling_generator(1))
    solution = reconstruct(eq, inv, solve_first_order(reduced_map(eq, inv)), 1, 2)
    assert _same(solution.values(6), [1, 2, sympy.Rational(-2, 3), 1, 2, sympy.Rational(-2, 3)])
    assert solution.metadata["invariant"] == "v = u(1)/u(0)"
    with pytest.raises(SingularInitialData):
        reconstruct(eq, inv, solve_first_order(reduced_map(eq, inv)), 0, 2)


def test_reconstruct_dp2_zero_translation() -> None:
    eq = get("dP2", "zero").equation
    inv = invariant_from_generator(eq, _quarter_turn())
    v_solution = solve_first_order(reduced_map(eq, inv))
    assert v_solution.sequence is not None
    solution = reconstruct(eq, inv, v_solution, 1, 3)
    assert _same(solution.values(6), [1, 3, -1, -3, 1, 3])
    assert solution.sequence is not None


def test_general_map_is_iterated() -> None:
    eq = make_equation("u(1)^3/u(0)^2", 2)
    inv = invariant_from_generator(eq, scaling_generator(1))
    m = reduced_map(eq, inv)
    assert m.kind == GENERAL
    v_solution = solve_first_order(m, 2)
    assert not v_solution.is_closed
    assert v_solution.values(3) == [2, 4, 16]
    solution = reconstruct(eq, inv, v_solution, 1, 2, check_steps=3)
    assert solution.values(4) == [1, 2, 8, 128]


def test_audit_of_a_reconstructed_solution_matches() -> None:
    eq = make_equation(DP4_ZERO, 2)
    inv = invariant_from_generator(eq, scaling_generator(1))
    solution = reconstruct(eq, inv, solve_first_order(reduced_map(eq, inv)), 1, 2)
    report = audit_published_solution(eq, solution, n_range=(0, 12), u0=1, u1=2)
    assert report.verdict == MATCH
    assert report.first_fail_n is None
    assert report.to_json()["range"] == [0, 12]


def test_audit_reports_first_failure() -> None:
    eq = make_equation(DP4_ZERO, 2)
    constant = FormulaBranch("constant", "principal", lambda n, u0, u1: u0)
    report = audit_published_solution(eq, constant, n_range=(0, 10), u0=1, u1=2)
    assert report.verdict == MISMATCH
    assert report.first_fail_n == 1
    assert [c.passed for c in report.checks] == [False, False]
    with pytest.raises(ValueError):
        audit_published_solution(eq, constant, n_range=(5, 2))
