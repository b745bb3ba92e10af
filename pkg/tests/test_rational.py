from fractions import Fraction

import pytest
import sympy
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from packages.symexpr.expr import eval_exact
from packages.symexpr.gaussian import GaussianRational
from packages.symexpr.rational import (
    IdenticallySingularError,
    RationalFunction,
    UnknownSymbolError,
    ordered_gens,
    polynomial_coefficients,
    to_rational,
    u_symbol,
)
from packages.symexpr.parser import parse_expr


def test_canonical_form_is_lowest_terms() -> None:
    value = RationalFunction.from_text("(u(0)^2 - 1)/(2*u(0) - 2)")
    assert value == RationalFunction.from_text("(u(0) + 1)/2")
    assert value.is_polynomial()


def test_denominator_is_monic_under_graded_order() -> None:
    value = RationalFunction.from_text("1/(3*u(1) + 6)")
    assert value.denominator == u_symbol(1) + 2
    assert value.numerator == sympy.Rational(1, 3)


def test_equality_is_cross_multiplied() -> None:
    left = RationalFunction.from_text("a/u(0) + b")
    right = RationalFunction.from_text("(a + b*u(0))/u(0)")
    assert left == right
    assert left != RationalFunction.from_text("a/u(0)")


def test_arithmetic() -> None:
    x = RationalFunction.from_text("u(0)")
    y = RationalFunction.from_text("u(1)")
    assert (x + y) * (x - y) == x**2 - y**2
    assert (x / y) * y == x
    assert 1 - x == RationalFunction.from_text("1 - u(0)")
    with pytest.raises(IdenticallySingularError):
        x / RationalFunction(0)
    with pytest.raises(IdenticallySingularError):
        RationalFunction(0) ** -1


def test_diff_and_shift() -> None:
    value = RationalFunction.from_text("a*n/u(0) + u(1)^2")
    assert value.diff("U0") == RationalFunction.from_text("-a*n/u(0)^2")
    assert value.diff("n") == RationalFunction.from_text("a/u(0)")
    assert value.shift(1) == RationalFunction.from_text("a*(n+1)/u(1) + u(2)^2")
    with pytest.raises(UnknownSymbolError):
        value.diff("exp")


def test_substitute_detects_identically_singular_denominator() -> None:
    value = RationalFunction.from_text("1/(u(0) - a)")
    assert value.substitute("a", 2) == RationalFunction.from_text("1/(u(0) - 2)")
    with pytest.raises(IdenticallySingularError):
        RationalFunction.from_text("1/(a - b)").substitute_many({"a": 1, "b": 1})


def test_degree_and_variables() -> None:
    value = RationalFunction.from_text("(u(1)^3 + a)/(u(1) + n)")
    assert value.degree_in("U1") == 2
    assert value.variables() == {"U1", "a", "n"}
    assert value.u_indices() == {1}
    assert not value.is_constant()
    assert RationalFunction.from_text("2/3 + i").is_constant()


def test_to_rational_matches_from_text() -> None:
    assert to_rational(parse_expr("u(0)/u(0) + n")) == RationalFunction.from_text("1 + n")


def test_render_reparses_to_same_function() -> None:
    value = RationalFunction.from_text("u(1)*(u(1) - a)*(u(1) - b)/(u(0)*(u(1) - c))")
    assert RationalFunction.from_text(value.render()) == value


def test_variable_order_puts_u_highest() -> None:
    names = [s.name for s in ordered_gens(sympy.symbols("n a eps0 U0 U1 mu"))]
    assert names == ["U1", "U0", "eps0", "mu", "a", "n"]


def test_polynomial_coefficients_only_in_given_gens() -> None:
    a, u0 = sympy.symbols("a U0")
    coefficients = polynomial_coefficients((a + 1) * u0**2 + a * u0, [u0])
    assert sorted(coefficients, key=str) == sorted([a + 1, a], key=str)
    assert polynomial_coefficients(sympy.Integer(0), [u0]) == []


U0, U1, N = u_symbol(0), u_symbol(1), sympy.Symbol("n")
MONOMIALS = [sympy.Integer(1), U0, U1, N, U0 * U1, U0**2, U1**2 * N]
STEP = GaussianRational(Fraction(1, 10**9))

integer_coefficients = st.integers(min_value=-4, max_value=4)


@st.composite
def polynomials(draw, gaussian: bool = True) -> sympy.Expr:
    total = sympy.Integer(0)
    for monomial in MONOMIALS:
        coefficient = draw(integer_coefficients)
        if gaussian:
            coefficient += sympy.I * draw(st.integers(min_value=-2, max_value=2))
        total += coefficient * monomial
    return sympy.expand(total)


@st.composite
def rational_functions(draw, gaussian: bool = True) -> RationalFunction:
    numerator = draw(polynomials(gaussian))
    denominator = draw(polynomials(gaussian))
    assume(denominator != 0)
    return RationalFunction(numerator / denominator)


points = st.builds(
    lambda re, im: GaussianRational(Fraction(re, 2), Fraction(im, 2)),
    st.integers(min_value=-6, max_value=6),
    st.integers(min_value=-2, max_value=2),
)


@settings(max_examples=1000, deadline=None)
@given(polynomials(gaussian=False), polynomials(gaussian=False), polynomials(gaussian=False))
def test_canonical_form_ignores_common_factors(p: sympy.Expr, q: sympy.Expr, h: sympy.Expr) -> None:
    assume(q != 0 and h != 0)
    plain = RationalFunction(p / q)
    padded = RationalFunction(sympy.expand(p * h) / sympy.expand(q * h))
    assert sympy.expand(plain.numerator - padded.numerator) == 0
    assert sympy.expand(plain.denominator - padded.denominator) == 0
    again = RationalFunction(plain.as_sympy())
    assert (again.numerator, again.denominator) == (plain.numerator, plain.denominator)


def _value(f: RationalFunction, at: dict) -> GaussianRational:
    return eval_exact(f.numerator_expr, at) / eval_exact(f.denominator_expr, at)


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(rational_functions(), points, points, points)
def test_diff_matches_central_difference(f: RationalFunction, x0, x1, n) -> None:
    at = {"U0": x0, "U1": x1, "n": n}
    assume(abs(complex(eval_exact(f.denominator_expr, at))) >= 0.25)
    for name in ("U0", "U1", "n"):
        exact = complex(_value(f.diff(name), at))
        ahead = {**at, name: at[name] + STEP}
        behind = {**at, name: at[name] - STEP}
        estimate = complex((_value(f, ahead) - _value(f, behind)) / (STEP + STEP))
        assert abs(estimate - exact) <= 1e-6 * max(1.0, abs(exact))


@settings(max_examples=1000, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(rational_functions(), rational_functions(), st.integers(min_value=0, max_value=2))
def test_shift_is_a_homomorphism(f: RationalFunction, g: RationalFunction, i: int) -> None:
    assert (f * g).shift(i) == f.shift(i) * g.shift(i)
    assert (f + g).shift(i) == f.shift(i) + g.shift(i)
    assert f.shift(i).shift(1) == f.shift(i + 1)
