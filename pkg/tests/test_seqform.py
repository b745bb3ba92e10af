import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from packages.seqform.recurrence import RecurrenceConstraint, RecurrenceError, solve_recurrence
from packages.seqform.roots import NonCyclotomicRoot, RootOfUnityScalar, cyclotomic_roots, identify_root
from packages.seqform.sequence import (
    SequenceClosedForm,
    alternating,
    constant,
    cos_seq,
    eval_seq,
    geometric,
    period,
    power_of_n,
    real_form,
    seq_equal_span,
    seq_mul,
    seq_shift,
    sin_seq,
)
from packages.symexpr.gaussian import GaussianRational

X = sympy.Symbol("x")
OMEGA = RootOfUnityScalar.make(1, 1, 3)


def test_root_normalization() -> None:
    assert RootOfUnityScalar.make(1, 4, 4) == RootOfUnityScalar.one()
    assert RootOfUnityScalar.make(-1) == RootOfUnityScalar.make(1, 1, 2)
    assert RootOfUnityScalar.make("i") == RootOfUnityScalar.make(1, 1, 4)
    assert (OMEGA**3) == RootOfUnityScalar.one()
    assert OMEGA.conjugate() == RootOfUnityScalar.make(1, 2, 3)
    with pytest.raises(ValueError):
        RootOfUnityScalar.make(0)
    with pytest.raises(ValueError):
        RootOfUnityScalar.make(1, 1, 0)


def test_gaussian_power() -> None:
    assert RootOfUnityScalar.make(2, 1, 4).gaussian_power(2) == GaussianRational(-4)
    assert OMEGA.gaussian_power(1) is None
    assert OMEGA.gaussian_power(3) == GaussianRational(1)


def test_identify_root() -> None:
    assert identify_root(sympy.I) == RootOfUnityScalar.make(1, 1, 4)
    assert identify_root(-sympy.Rational(1, 2) + sympy.sqrt(3) * sympy.I / 2) == OMEGA
    root = identify_root(sympy.sqrt(2))
    assert sympy.expand(root.exact_value() - sympy.sqrt(2)) == 0
    with pytest.raises(NonCyclotomicRoot):
        identify_root(sympy.GoldenRatio)
    with pytest.raises(NonCyclotomicRoot):
        identify_root(sympy.Integer(0))


def test_cyclotomic_roots_with_multiplicity() -> None:
    roots = cyclotomic_roots(X**3 - 1, X)
    assert roots == [(RootOfUnityScalar.one(), 1), (OMEGA, 1), (RootOfUnityScalar.make(1, 2, 3), 1)]
    assert cyclotomic_roots((X - 1) ** 2 * (X + 1), X) == [
        (RootOfUnityScalar.one(), 2),
        (RootOfUnityScalar.make(1, 1, 2), 1),
    ]
    with pytest.raises(NonCyclotomicRoot):
        cyclotomic_roots(X**2 - X - 1, X)


def test_eval_seq_exact_and_irrational() -> None:
    assert eval_seq(cos_seq(1, 3), 1) == GaussianRational.parse("-1/2")
    assert abs(eval_seq(sin_seq(1, 3), 1) - 3**0.5 / 2) < 1e-12
    assert eval_seq(alternating(2), 3) == GaussianRational(-2)
    assert eval_seq(geometric(RootOfUnityScalar.make(1, 1, 4)), 3) == GaussianRational(0, -1)


def test_shift_and_product() -> None:
    shifted = seq_shift(power_of_n(1), 2)
    assert shifted.exact_value(0) == 2
    assert shifted.exact_value(5) == 7
    square = seq_mul(cos_seq(1, 4), cos_seq(1, 4))
    assert [square.exact_value(n) for n in range(4)] == [1, 0, 1, 0]


def test_period() -> None:
    assert period(cos_seq(1, 3)) == 3
    assert period(constant(5)) == 1
    assert period(sin_seq(1, 4) + alternating()) == 4
    assert period(power_of_n(1)) is None
    assert period(geometric(RootOfUnityScalar.make(2))) is None


def test_real_form_pairs_conjugates() -> None:
    assert real_form(cos_seq(1, 3)) == "(1)*cos(2*pi*n/3)"
    assert real_form(sin_seq(1, 3)) == "(1)*sin(2*pi*n/3)"
    assert real_form(alternating(3)) == "(3)*(-1)^n"
    assert real_form(SequenceClosedForm()) == "0"


def test_json_round_trip_keeps_values() -> None:
    s = cos_seq(1, 3).scaled(sympy.Symbol("a")) + power_of_n(2, "1/2")
    again = SequenceClosedForm.from_json(s.to_json())
    assert again == s
    assert again.free_parameters() == ["a"]


def test_recurrence_validation() -> None:
    with pytest.raises(RecurrenceError):
        RecurrenceConstraint.make([1])
    with pytest.raises(RecurrenceError):
        RecurrenceConstraint.make([1, 0])
    with pytest.raises(RecurrenceError):
        RecurrenceConstraint.make(["a", 1])
    with pytest.raises(RecurrenceError):
        solve_recurrence(RecurrenceConstraint.make([0, 1]))


def test_third_roots_recurrence() -> None:
    rc = RecurrenceConstraint.make([1, 1, 1])
    assert rc.text() == "(1)*alpha(n+2) + (1)*alpha(n+1) + (1)*alpha(n) = 0"
    basis = solve_recurrence(rc)
    assert seq_equal_span(basis, [cos_seq(1, 3), sin_seq(1, 3)])
    assert rc.apply(cos_seq(1, 3)).is_zero()
    assert RecurrenceConstraint.from_roots([OMEGA, OMEGA.conjugate()]).coefficients == (1, 1, 1)


def test_repeated_root_gives_polynomial_terms() -> None:
    basis = solve_recurrence(RecurrenceConstraint.make([1, -2, 1]))
    assert seq_equal_span(basis, [constant(), power_of_n(1)])


def test_quarter_turn_recurrence() -> None:
    basis = solve_recurrence(RecurrenceConstraint.make([1, 0, 1]))
    assert seq_equal_span(basis, [cos_seq(1, 4), sin_seq(1, 4)])


def test_non_cyclotomic_recurrence_is_rejected() -> None:
    with pytest.raises(NonCyclotomicRoot):
        solve_recurrence(RecurrenceConstraint.make([-1, -1, 1]))


small = st.integers(min_value=-5, max_value=5)


@settings(max_examples=25, deadline=None)
@given(small, small)
def test_cos_sin_combinations_satisfy_third_roots(a: int, b: int) -> None:
    s = cos_seq(1, 3).scaled(a) + sin_seq(1, 3).scaled(b)
    assert RecurrenceConstraint.make([1, 1, 1]).satisfied_by(s, 9)


@settings(max_examples=25, deadline=None)
@given(small, small, st.integers(min_value=0, max_value=3), st.integers(min_value=0, max_value=3))
def test_shifts_compose(a: int, b: int, i: int, j: int) -> None:
    s = alternating(a) + power_of_n(1, b) + geometric(RootOfUnityScalar.make(1, 1, 4), 1)
    left = seq_shift(seq_shift(s, i), j)
    right = seq_shift(s, i + j)
    for n in range(4):
        assert sympy.expand(left.exact_value(n) - right.exact_value(n)) == 0
