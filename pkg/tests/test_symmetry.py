import pytest
import sympy
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from packages.catalog.entries import get, list_entries
from packages.eqmodel.equation import InconsistentAssumptions, make_equation
from packages.seqform.sequence import constant, cos_seq, power_of_n, seq_equal_span
from packages.symmetry.determining import (
    DeterminingSystemError,
    autonomous_shift_symmetry,
    describe_constraints,
    determine,
    extract_determining_system,
    solve_determining_system,
)
from packages.symmetry.generator import GeneratorError, SymmetryGenerator, scaling_generator, shift_generator
from packages.symmetry.residual import residual
from packages.symmetry.verify import VerificationError, verify, verify_numeric, verify_symbolic

DP1 = "-u(0)-u(1)+(a*n+b)/u(1)+c"


def _dp1(*assumptions: str) -> object:
    return make_equation(DP1, 2, params=["a", "b", "c"], assumptions=list(assumptions), name="dP1")


def test_generator_make_and_text() -> None:
    g = SymmetryGenerator.make((0, 0), {2: constant(3)}, provenance="g")
    assert g.degree == 2
    assert g.coefficient(0).is_zero()
    assert g.q_text() == "[(3)]*u^2"
    assert not g.has_xi()
    with pytest.raises(GeneratorError):
        SymmetryGenerator.make((0,), None)


def test_generator_degree_checks() -> None:
    with pytest.raises(GeneratorError):
        SymmetryGenerator.make((0, 0), {3: constant(1)}).check_degree(2)
    with pytest.raises(GeneratorError):
        SymmetryGenerator.make().check_degree()
    shift_generator().check_degree()


def test_generator_linear_combination() -> None:
    g = scaling_generator(1) + shift_generator().scaled(2)
    assert g.xi_expr() == 2
    assert g.coefficient(1) == constant(1)
    assert (g + g.scaled(-1)).is_zero()


def test_generator_json() -> None:
    g = SymmetryGenerator.make(("2*b", "2*a"), {1: constant("a"), 0: cos_seq(1, 4)}, provenance="X")
    again = SymmetryGenerator.from_json(g.to_json())
    assert again == g
    with pytest.raises(GeneratorError):
        SymmetryGenerator.from_json({"q": [[{"bad": 1}]]})


def test_residual_of_scaling_on_linear_equation() -> None:
    eq = make_equation("-u(0)-u(1)", 2)
    res = residual(eq, scaling_generator(1))
    assert res.canonical().is_zero()
    rotating = residual(eq, SymmetryGenerator.make((0, 0), {0: cos_seq(1, 3)}))
    assert all(rotating.at_residue(r).is_zero() for r in range(3))


def test_dp1_single_generator_verifies() -> None:
    view = get("dP1", "a_nonzero")
    report = verify_symbolic(view.equation, view.generators[0])
    assert report.passed
    assert report.residues_checked == [0]


def test_dp5_generators_verify_per_residue() -> None:
    view = get("dP5", "default")
    report = verify_symbolic(view.equation, view.generators[1])
    assert report.passed
    assert report.residues_checked == [0, 1, 2]


def test_wrong_generator_fails_symbolically_and_numerically() -> None:
    eq = get("dP2", "zero").equation
    g = scaling_generator(1, degree=2, provenance="u^2")
    symbolic = verify(eq, g)
    assert not symbolic.passed
    assert symbolic.failing_residue == 0
    numeric = verify(eq, g, mode="numeric", samples=20, seed=3)
    assert numeric.verdict == "fail"
    assert numeric.witness is not None
    assert numeric.residual_norm > 1e-9
    with pytest.raises(VerificationError):
        verify(eq, g, mode="guess")


def test_numeric_verification_is_seeded() -> None:
    view = get("dP4", "general")
    first = verify_numeric(view.equation, view.generators[0], samples=30, seed=7)
    second = verify_numeric(view.equation, view.generators[0], samples=30, seed=7)
    assert first.passed
    assert first.to_json() == second.to_json()


def test_dp3_reciprocal_needs_the_periodic_factor() -> None:
    view = get("dP3", "reciprocal_case")
    stored = view.generators[0]
    assert verify_symbolic(view.equation, stored).passed
    constant_plus = SymmetryGenerator.make((0, 0), {0: constant(1), 2: constant("1/a")})
    assert not verify_symbolic(view.equation, constant_plus).passed
    assert verify_symbolic(view.equation, view.generators[2]).passed


def test_non_periodic_coefficients_need_numeric_mode() -> None:
    eq = get("dP2", "zero").equation
    g = SymmetryGenerator.make((0, 0), {1: power_of_n(1)})
    with pytest.raises(VerificationError):
        verify_symbolic(eq, g)


def test_shift_symmetry_only_for_autonomous_equations() -> None:
    assert autonomous_shift_symmetry(get("dP5", "default").equation) is not None
    assert autonomous_shift_symmetry(_dp1("a!=0", "c=0")) is None


def test_dp1_nonzero_a_has_one_generator() -> None:
    solution = determine(_dp1("a!=0", "c=0"), degree=1)
    assert len(solution.generators) == 1
    g = solution.generators[0]
    assert g.has_xi()
    assert verify_symbolic(_dp1("a!=0", "c=0"), g).passed


def test_dp1_zero_parameters_give_four_generators() -> None:
    eq = _dp1("a=0", "b=0", "c=0")
    solution = determine(eq, degree=1)
    assert len(solution.generators) == 4
    for g in solution.generators:
        if not g.has_xi():
            assert verify_symbolic(eq, g).passed


def test_dp3_product_case_constraint() -> None:
    eq = get("dP3", "bcase").equation
    solution = determine(eq)
    constraints = dict(solution.constraints)
    assert constraints[1].coefficients == (1, 1, 1)
    assert len(solution.generators) == 3
    assert any("alpha(n+2)" in line for line in describe_constraints(solution))


def test_assumptions_passed_to_the_solver() -> None:
    system = extract_determining_system(_dp1(), degree=1)
    assert system.to_json()["xi_mode"] == "affine"
    solution = solve_determining_system(system, ["a!=0", "c=0"])
    assert len(solution.generators) == 1
    with pytest.raises(InconsistentAssumptions):
        solve_determining_system(extract_determining_system(_dp1("a!=0"), degree=1), ["a=0"])


def test_unknown_xi_mode() -> None:
    with pytest.raises(DeterminingSystemError):
        extract_determining_system(_dp1(), xi_mode="quadratic")


def _sample_row(g: SymmetryGenerator, points: int = 8) -> list:
    a = {sympy.Symbol("a"): 2}
    row = [sympy.expand(x.xreplace(a)) for x in g.xi]
    for degree in range(3):
        row.extend(sympy.expand(g.coefficient(degree).exact_value(n).xreplace(a)) for n in range(points))
    return row


def _rank(generators: list) -> int:
    return sympy.Matrix([_sample_row(g) for g in generators]).rank(simplify=True)


def test_dp3_reciprocal_solver_spans_catalog_generators() -> None:
    view = get("dP3", "reciprocal_case")
    solution = determine(view.equation, degree=2)
    assert len(solution.generators) == 7
    assert _rank(solution.generators) == 7
    assert _rank(view.generators) == 7
    assert _rank(solution.generators + view.generators) == 7
    for degree in range(3):
        found = [g.coefficient(degree) for g in solution.generators]
        listed = [g.coefficient(degree) for g in view.generators]
        assert seq_equal_span(found, listed)


def test_dp3_reciprocal_constraints_follow_alpha_links() -> None:
    # u(n+2) = a/u(n): alpha0(n+2) = -a*alpha2(n), alpha1(n+2) = -alpha1(n), a*alpha2(n+2) = -alpha0(n)
    a = sympy.Symbol("a")
    solution = determine(get("dP3", "reciprocal_case").equation, degree=2)
    constraints = dict(solution.constraints)
    assert constraints[0].coefficients == (-1, 0, 0, 0, 1)
    assert constraints[1].coefficients == (1, 0, 1)
    assert constraints[2].coefficients == (-1, 0, 0, 0, 1)
    for g in solution.generators:
        q0, q1, q2 = (g.coefficient(d) for d in range(3))
        for n in range(8):
            assert sympy.expand(q0.exact_value(n + 2) + a * q2.exact_value(n)) == 0
            assert sympy.expand(q1.exact_value(n + 2) + q1.exact_value(n)) == 0
            assert sympy.expand(a * q2.exact_value(n + 2) + q0.exact_value(n)) == 0
        for degree, constraint in constraints.items():
            assert constraint.satisfied_by(g.coefficient(degree), 8)


BRANCHES = [(row["id"], row["branch"]) for row in list_entries() if row["generators"]]
small = st.integers(min_value=-5, max_value=5)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_residual_is_linear(data) -> None:
    entry_id, branch = data.draw(st.sampled_from(BRANCHES))
    view = get(entry_id, branch)
    first = data.draw(st.sampled_from(view.generators))
    second = data.draw(st.sampled_from(view.generators))
    c = sympy.Rational(data.draw(small), data.draw(st.integers(1, 4))) + sympy.I * data.draw(small)
    combined = first + second.scaled(c)
    assume(not combined.is_zero())
    left = residual(view.equation, combined)
    r1 = residual(view.equation, first)
    r2 = residual(view.equation, second)
    for r in range(12):
        assert left.at_residue(r) == r1.at_residue(r) + r2.at_residue(r) * c
