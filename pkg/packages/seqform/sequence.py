from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import sympy

from packages.seqform.roots import RootOfUnityScalar
from packages.symexpr.expr import NonRationalError, UnboundSymbolError, from_sympy, render, to_sympy
from packages.symexpr.gaussian import GaussianRational
from packages.symexpr.parser import ExprSyntaxError, parse_expr

Coefficient = sympy.Expr
SeqValue = Union[GaussianRational, complex]


def _coefficient(value: Any) -> sympy.Expr:
    if isinstance(value, GaussianRational):
        return value.to_sympy()
    if isinstance(value, complex):
        return sympy.Float(value.real) + sympy.I * sympy.Float(value.imag)
    return sympy.expand(sympy.sympify(value))


def _is_zero(value: sympy.Expr) -> bool:
    value = sympy.expand(value)
    if value == 0:
        return True
    if value.is_number and not value.free_symbols:
        return abs(complex(sympy.N(value, 50))) < 1e-40
    return False


@dataclass(frozen=True)
class Term:
    coefficient: Coefficient
    root: RootOfUnityScalar
    degree: int = 0


@dataclass(frozen=True)
class SequenceClosedForm:
    """Finite sum of c * lambda**n * n**d."""

    terms: Tuple[Term, ...] = ()

    @classmethod
    def from_terms(cls, terms: Iterable[Term]) -> "SequenceClosedForm":
        merged: Dict[Tuple[RootOfUnityScalar, int], sympy.Expr] = {}
        for term in terms:
            key = (term.root, term.degree)
            merged[key] = merged.get(key, sympy.Integer(0)) + term.coefficient
        kept = [
            Term(sympy.expand(c), root, degree)
            for (root, degree), c in merged.items()
            if not _is_zero(c)
        ]
        kept.sort(key=lambda t: (t.degree, t.root.m, t.root.k, float(t.root.scale.norm())))
        return cls(tuple(kept))

    def is_zero(self) -> bool:
        return not self.terms

    def is_exact(self) -> bool:
        return not any(term.coefficient.has(sympy.Float) for term in self.terms)

    def free_parameters(self) -> List[str]:
        names = set()
        for term in self.terms:
            names |= {s.name for s in term.coefficient.free_symbols}
        return sorted(names)

    def exact_value(self, n: int, bindings: Optional[Mapping[str, Any]] = None) -> sympy.Expr:
        total = sympy.Integer(0)
        for term in self.terms:
            power = term.root.gaussian_power(n)
            lam = power.to_sympy() if power is not None else term.root.exact_value() ** n
            total += term.coefficient * lam * sympy.Integer(n) ** term.degree
        if bindings:
            total = total.xreplace({sympy.Symbol(k): _coefficient(v) for k, v in bindings.items()})
        return sympy.expand(total)

    def __add__(self, other: "SequenceClosedForm") -> "SequenceClosedForm":
        return SequenceClosedForm.from_terms(self.terms + other.terms)

    def __neg__(self) -> "SequenceClosedForm":
        return self.scaled(-1)

    def __sub__(self, other: "SequenceClosedForm") -> "SequenceClosedForm":
        return self + (-other)

    def __mul__(self, other: Any) -> "SequenceClosedForm":
        if isinstance(other, SequenceClosedForm):
            return seq_mul(self, other)
        return self.scaled(other)

    __rmul__ = __mul__

    def scaled(self, factor: Any) -> "SequenceClosedForm":
        factor = _coefficient(factor)
        return SequenceClosedForm.from_terms(
            Term(t.coefficient * factor, t.root, t.degree) for t in self.terms
        )

    def to_json(self) -> List[Dict[str, Any]]:
        out = []
        for term in self.terms:
            item: Dict[str, Any] = {
                "c": coefficient_text(term.coefficient),
                "k": term.root.k,
                "m_root": term.root.m,
                "deg": term.degree,
            }
            if not term.root.is_unit():
                item["scale"] = str(term.root.scale)
            out.append(item)
        return out

    @classmethod
    def from_json(cls, items: Sequence[Mapping[str, Any]]) -> "SequenceClosedForm":
        terms = []
        for item in items:
            root = RootOfUnityScalar.make(
                GaussianRational.parse(str(item.get("scale", "1"))), int(item["k"]), int(item["m_root"])
            )
            coefficient = parse_coefficient(str(item["c"]))
            terms.append(Term(coefficient, root, int(item.get("deg", 0))))
        return cls.from_terms(terms)

    def text(self) -> str:
        if not self.terms:
            return "0"
        pieces = []
        for term in self.terms:
            coefficient = coefficient_text(term.coefficient)
            piece = f"({coefficient}) * {term.root.text()}^n"
            if term.degree:
                piece += f" * n^{term.degree}"
            pieces.append(piece)
        return " + ".join(pieces)

    def __str__(self) -> str:
        return self.text()


def geometric(root: RootOfUnityScalar, coefficient: Any = 1, degree: int = 0) -> SequenceClosedForm:
    return SequenceClosedForm.from_terms([Term(_coefficient(coefficient), root, degree)])


def constant(value: Any = 1) -> SequenceClosedForm:
    return geometric(RootOfUnityScalar.one(), value)


def power_of_n(degree: int, coefficient: Any = 1) -> SequenceClosedForm:
    return geometric(RootOfUnityScalar.one(), coefficient, degree)


def alternating(coefficient: Any = 1) -> SequenceClosedForm:
    return geometric(RootOfUnityScalar.make(1, 1, 2), coefficient)


def cos_seq(k: int, m: int) -> SequenceClosedForm:
    """cos(2*pi*k*n/m) in the exponential basis."""
    half = sympy.Rational(1, 2)
    return SequenceClosedForm.from_terms(
        [
            Term(half, RootOfUnityScalar.make(1, k, m)),
            Term(half, RootOfUnityScalar.make(1, -k, m)),
        ]
    )


def sin_seq(k: int, m: int) -> SequenceClosedForm:
    """sin(2*pi*k*n/m) in the exponential basis."""
    half_i = sympy.I / 2
    return SequenceClosedForm.from_terms(
        [
            Term(-half_i, RootOfUnityScalar.make(1, k, m)),
            Term(half_i, RootOfUnityScalar.make(1, -k, m)),
        ]
    )


def eval_seq(
    s: SequenceClosedForm, n: int, bindings: Optional[Mapping[str, Any]] = None
) -> SeqValue:
    if not s.is_exact():
        total = 0j
        for term in s.terms:
            coefficient = term.coefficient
            if bindings:
                coefficient = coefficient.xreplace({sympy.Symbol(k): _coefficient(v) for k, v in bindings.items()})
            if coefficient.free_symbols:
                raise UnboundSymbolError(f"unbound parameters in {coefficient}")
            total += complex(coefficient) * complex(term.root) ** n * n**term.degree
        return total
    value = s.exact_value(n, bindings)
    if value.free_symbols:
        raise UnboundSymbolError(f"unbound parameters {sorted(str(x) for x in value.free_symbols)}")
    if GaussianRational.is_gaussian(value):
        return GaussianRational.from_sympy(value)
    return complex(sympy.N(value, 30))


def seq_shift(s: SequenceClosedForm, j: int) -> SequenceClosedForm:
    if j == 0:
        return s
    terms = []
    for term in s.terms:
        factor = term.coefficient * (term.root**j).exact_value()
        for t in range(term.degree + 1):
            weight = math.comb(term.degree, t) * sympy.Integer(j) ** (term.degree - t)
            terms.append(Term(sympy.expand(factor * weight), term.root, t))
    return SequenceClosedForm.from_terms(terms)


def seq_mul(a: SequenceClosedForm, b: SequenceClosedForm) -> SequenceClosedForm:
    return SequenceClosedForm.from_terms(
        Term(x.coefficient * y.coefficient, x.root * y.root, x.degree + y.degree)
        for x in a.terms
        for y in b.terms
    )


def period(s: SequenceClosedForm) -> Optional[int]:
    result = 1
    for term in s.terms:
        if term.degree or not term.root.is_unit():
            return None
        result = result * term.root.m // math.gcd(result, term.root.m)
    return result


def _span_rank(rows: List[List[sympy.Expr]]) -> int:
    if not rows:
        return 0
    return sympy.Matrix(rows).rank(iszerofunc=_is_zero, simplify=False)


def seq_equal_span(a: Sequence[SequenceClosedForm], b: Sequence[SequenceClosedForm]) -> bool:
    """True iff both lists span the same space of sequences.

    Sequences built from d distinct (root, degree) pairs are determined by
    d consecutive values, so sampling that many points decides the question.
    """
    pairs = {(t.root, t.degree) for s in list(a) + list(b) for t in s.terms}
    points = max(len(pairs), len(a) + len(b) + 1)
    rows_a = [[s.exact_value(n) for n in range(points)] for s in a]
    rows_b = [[s.exact_value(n) for n in range(points)] for s in b]
    rank_a = _span_rank(rows_a)
    rank_b = _span_rank(rows_b)
    return rank_a == rank_b == _span_rank(rows_a + rows_b)


def real_form(s: SequenceClosedForm) -> str:
    """Display conjugate unit-root pairs as cos/sin combinations."""
    remaining = {(t.root, t.degree): t.coefficient for t in s.terms}
    pieces = []
    for term in s.terms:
        key = (term.root, term.degree)
        if key not in remaining:
            continue
        c1 = remaining.pop(key)
        root = term.root
        suffix = f"*n^{term.degree}" if term.degree else ""
        if not root.is_unit():
            pieces.append(f"{coefficient_text(c1, True)}*{root.text()}^n{suffix}")
        elif root.m == 1:
            pieces.append(f"{coefficient_text(c1, True)}{suffix}")
        elif root.m == 2:
            pieces.append(f"{coefficient_text(c1, True)}*(-1)^n{suffix}")
        else:
            c2 = remaining.pop((root.conjugate(), term.degree), sympy.Integer(0))
            angle = f"2*pi*{root.k}*n/{root.m}" if root.k != 1 else f"2*pi*n/{root.m}"
            cos_part = sympy.expand(c1 + c2)
            sin_part = sympy.expand(sympy.I * (c1 - c2))
            if not _is_zero(cos_part):
                pieces.append(f"{coefficient_text(cos_part, True)}*cos({angle}){suffix}")
            if not _is_zero(sin_part):
                pieces.append(f"{coefficient_text(sin_part, True)}*sin({angle}){suffix}")
    return " + ".join(pieces) if pieces else "0"


def coefficient_text(value: sympy.Expr, grouped: bool = False) -> str:
    try:
        text = render(from_sympy(value))
    except NonRationalError:
        text = str(value)
    return f"({text})" if grouped else text


def parse_coefficient(text: str) -> sympy.Expr:
    try:
        return to_sympy(parse_expr(text))
    except ExprSyntaxError:
        return sympy.expand(sympy.sympify(text))
