from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from packages.symexpr.expr import (
    NonRationalError,
    NumericDivisionByZero,
    UnboundSymbolError,
    bindings_from,
    eval_exact,
    eval_numeric,
    free_symbols,
    from_sympy,
    has_function,
    max_u_index,
    render,
    shift,
    to_sympy,
)
from packages.symexpr.gaussian import GaussianRational
from packages.symexpr.parser import ExprSyntaxError, UnknownFunctionError, parse_expr


def _value(text: str, **bindings) -> GaussianRational:
    return eval_exact(parse_expr(text), bindings_from(bindings))


def test_precedence_and_associativity() -> None:
    assert _value("1-2-3") == GaussianRational(-4)
    assert _value("8/2/2") == GaussianRational(2)
    assert _value("-2^2") == GaussianRational(-4)
    assert _value("2^-1") == GaussianRational(Fraction(1, 2))
    assert _value("2*3+4") == GaussianRational(10)
    assert _value("(1+i)^2") == GaussianRational(0, 2)
    assert _value("x^0", x=5) == GaussianRational(1)


def test_dp1_right_hand_side_evaluates() -> None:
    text = "-u(1) - u(0) + (a*n + b)/u(1) + c"
    value = eval_exact(parse_expr(text), {"U0": 1, "U1": 2, "a": 1, "b": 0, "c": 0, "n": 3})
    assert value == GaussianRational(Fraction(-3, 2))


@pytest.mark.parametrize(
    "text, offset",
    [
        ("1 + * 2", 4),
        ("u(x)", 2),
        ("1 $", 2),
        ("(1+2", 4),
        ("2^x", 2),
        ("", 0),
    ],
)
def test_syntax_errors_carry_offset(text: str, offset: int) -> None:
    with pytest.raises(ExprSyntaxError) as info:
        parse_expr(text)
    assert info.value.offset == offset


def test_unknown_function_is_reported() -> None:
    with pytest.raises(UnknownFunctionError):
        parse_expr("tan(n)")
    for name in ("sqrt", "log"):
        with pytest.raises(UnknownFunctionError):
            parse_expr(f"{name}(u(0))")
    for name in ("exp", "sin", "cos"):
        assert has_function(parse_expr(f"{name}(u(0))"))


def test_reserved_identifier_rejected() -> None:
    with pytest.raises(ExprSyntaxError):
        parse_expr("exp + 1")


def test_free_symbols_and_u_index() -> None:
    expr = parse_expr("a*u(0) + b/u(2) + n")
    assert free_symbols(expr) == {"a", "b", "n", "U0", "U2"}
    assert max_u_index(expr) == 2
    assert not has_function(expr)
    assert has_function(parse_expr("cos(2*n)"))


def test_shift_moves_n_and_u() -> None:
    shifted = shift(parse_expr("n*u(0) + u(1)"), 2)
    value = eval_exact(shifted, {"n": 1, "U2": 5, "U3": 7})
    assert value == GaussianRational(3 * 5 + 7)
    with pytest.raises(ValueError):
        shift(parse_expr("u(0)"), -1)


def test_eval_errors() -> None:
    with pytest.raises(UnboundSymbolError):
        eval_exact(parse_expr("a + 1"), {})
    with pytest.raises(NumericDivisionByZero):
        eval_exact(parse_expr("1/u(0)"), {"U0": 0})
    with pytest.raises(ZeroDivisionError):
        eval_numeric(parse_expr("1/(n-1)"), {"n": 1})
    with pytest.raises(NonRationalError):
        eval_exact(parse_expr("exp(n)"), {"n": 0})


def test_numeric_evaluation_of_functions() -> None:
    value = eval_numeric(parse_expr("cos(n)^2 + sin(n)^2"), {"n": 0.7})
    assert abs(value - 1) < 1e-12


def test_sympy_bridge() -> None:
    expr = parse_expr("(a + i)*u(0)^2 - 1/2")
    converted = to_sympy(expr)
    a, u0 = sympy.symbols("a U0")
    assert sympy.expand(converted - ((a + sympy.I) * u0**2 - sympy.Rational(1, 2))) == 0
    back = from_sympy(converted)
    assert sympy.expand(to_sympy(back) - converted) == 0
    with pytest.raises(NonRationalError):
        from_sympy(sympy.sqrt(2) * a)


@pytest.mark.parametrize(
    "text",
    [
        "-u(1) - u(0) + (a*n + b)/u(1) + c",
        "(a*n + b)*u(1)/(1 - u(1)^2) - u(0)",
        "u(1)*(u(1) - a)*(u(1) - b)/(u(0)*(u(1) - c))",
        "-u(0)*u(1)/(u(0) + u(1))",
        "(1/2 - 3/4*i)*u(0)^-2",
        "cos(2*n/3)*u(0)",
    ],
)
def test_render_is_reparseable(text: str) -> None:
    expr = parse_expr(text)
    again = parse_expr(render(expr))
    assert sympy.simplify(to_sympy(again) - to_sympy(expr)) == 0


small_ints = st.integers(min_value=-6, max_value=6)


@given(small_ints, small_ints, small_ints, st.integers(min_value=1, max_value=5))
def test_exact_and_numeric_evaluation_agree(p: int, q: int, r: int, x: int) -> None:
    text = f"({p}*x^2 + {q}*x + {r})/(x^2 + {x})"
    expr = parse_expr(text)
    exact = eval_exact(expr, {"x": x})
    numeric = eval_numeric(expr, {"x": x})
    assert abs(complex(exact) - numeric) < 1e-9
