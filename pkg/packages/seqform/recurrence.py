from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Iterable, List, Sequence, Tuple

import sympy

from packages.seqform.roots import RootOfUnityScalar, cyclotomic_roots
from packages.seqform.sequence import SequenceClosedForm, coefficient_text, geometric, seq_shift
from packages.symexpr.gaussian import GaussianRational

logger = logging.getLogger("dsym.seqform")

X = sympy.Symbol("x")


class RecurrenceError(ValueError):
    pass


def _exact(value: Any) -> sympy.Expr:
    if isinstance(value, GaussianRational):
        return value.to_sympy()
    return sympy.expand(sympy.sympify(value))


@dataclass(frozen=True)
class RecurrenceConstraint:
    """c_r*alpha(n+r) + ... + c_0*alpha(n) = 0 for every n."""

    coefficients: Tuple[sympy.Expr, ...]

    @classmethod
    def make(cls, coefficients: Iterable[Any]) -> "RecurrenceConstraint":
        values = tuple(_exact(c) for c in coefficients)
        if len(values) < 2:
            raise RecurrenceError("a recurrence needs order r >= 1")
        if values[-1] == 0:
            raise RecurrenceError("leading coefficient c_r must be nonzero")
        if any(v.free_symbols for v in values):
            raise RecurrenceError("recurrence coefficients must be numeric")
        return cls(values)

    @classmethod
    def from_polynomial(cls, poly: sympy.Expr, x: sympy.Symbol = X) -> "RecurrenceConstraint":
        coeffs = sympy.Poly(sympy.expand(poly), x).all_coeffs()
        return cls.make(reversed(coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[RootOfUnityScalar]) -> "RecurrenceConstraint":
        poly = sympy.Integer(1)
        for root in roots:
            poly *= X - root.exact_value()
        return cls.from_polynomial(poly)

    @property
    def order(self) -> int:
        return len(self.coefficients) - 1

    def characteristic_polynomial(self, x: sympy.Symbol = X) -> sympy.Expr:
        return sympy.expand(sum(c * x**j for j, c in enumerate(self.coefficients)))

    def apply(self, s: SequenceClosedForm) -> SequenceClosedForm:
        total = SequenceClosedForm()
        for j, c in enumerate(self.coefficients):
            total = total + seq_shift(s, j).scaled(c)
        return total

    def satisfied_by(self, s: SequenceClosedForm, points: int) -> bool:
        for n in range(points):
            value = sum(c * s.exact_value(n + j) for j, c in enumerate(self.coefficients))
            if sympy.expand(value) != 0 and abs(complex(sympy.N(value, 50))) > 1e-40:
                return False
        return True

    def text(self) -> str:
        pieces = []
        for j in range(self.order, -1, -1):
            c = self.coefficients[j]
            if c == 0:
                continue
            shift = f"alpha(n+{j})" if j else "alpha(n)"
            pieces.append(f"({coefficient_text(c)})*{shift}")
        return " + ".join(pieces) + " = 0"

    def to_json(self) -> List[str]:
        return [coefficient_text(c) for c in self.coefficients]


def solve_recurrence(rc: RecurrenceConstraint) -> List[SequenceClosedForm]:
    """Basis of the solution space: n**t * lambda**n for each root and t below its multiplicity."""
    if sympy.expand(rc.coefficients[0]) == 0:
        raise RecurrenceError("c_0 = 0 gives a zero characteristic root; divide out the shift first")
    basis: List[SequenceClosedForm] = []
    for root, multiplicity in cyclotomic_roots(rc.characteristic_polynomial(), X):
        for t in range(multiplicity):
            basis.append(geometric(root, 1, t))
    points = 4 * rc.order + 1
    for s in basis:
        if not rc.satisfied_by(s, points):
            raise RuntimeError(f"basis element {s} fails {rc.text()}")
    logger.info("solved %s: %d basis sequences", rc.text(), len(basis))
    return basis
