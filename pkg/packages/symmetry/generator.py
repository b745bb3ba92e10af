from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from packages.seqform.sequence import (
    SequenceClosedForm,
    coefficient_text,
    constant,
    parse_coefficient,
    real_form,
)

DEFAULT_MAX_DEGREE = 2
N = sympy.Symbol("n")


class GeneratorError(ValueError):
    pass


def _exact(value: Any) -> sympy.Expr:
    return sympy.expand(sympy.sympify(value))


@dataclass(frozen=True)
class SymmetryGenerator:
    """X = xi(n) d/dn + Q(n, u) d/du with xi = xi1*n + xi0 and Q = sum_j q_j(n) u^j."""

    xi: Tuple[sympy.Expr, sympy.Expr] = (sympy.Integer(0), sympy.Integer(0))
    q_coeffs: Tuple[SequenceClosedForm, ...] = ()
    provenance: str = ""

    @classmethod
    def make(
        cls,
        xi: Sequence[Any] = (0, 0),
        q: Optional[Mapping[int, SequenceClosedForm] | Sequence[SequenceClosedForm]] = None,
        provenance: str = "",
    ) -> "SymmetryGenerator":
        if len(xi) != 2:
            raise GeneratorError("xi must be given as [xi0, xi1]")
        coeffs: List[SequenceClosedForm] = []
        if isinstance(q, Mapping):
            for degree, seq in q.items():
                while len(coeffs) <= degree:
                    coeffs.append(SequenceClosedForm())
                coeffs[degree] = coeffs[degree] + seq
        elif q:
            coeffs = list(q)
        while coeffs and coeffs[-1].is_zero():
            coeffs.pop()
        return cls((_exact(xi[0]), _exact(xi[1])), tuple(coeffs), provenance)

    @property
    def degree(self) -> int:
        return len(self.q_coeffs) - 1

    def xi_expr(self) -> sympy.Expr:
        return sympy.expand(self.xi[0] + self.xi[1] * N)

    def has_xi(self) -> bool:
        return self.xi_expr() != 0

    def is_zero(self) -> bool:
        return not self.has_xi() and all(s.is_zero() for s in self.q_coeffs)

    def coefficient(self, degree: int) -> SequenceClosedForm:
        if degree < len(self.q_coeffs):
            return self.q_coeffs[degree]
        return SequenceClosedForm()

    def check_degree(self, max_degree: int = DEFAULT_MAX_DEGREE) -> None:
        if self.degree > max_degree:
            raise GeneratorError(f"generator has u-degree {self.degree} > configured maximum {max_degree}")
        if self.is_zero():
            raise GeneratorError("generator has xi = 0 and Q = 0")

    def __add__(self, other: "SymmetryGenerator") -> "SymmetryGenerator":
        size = max(len(self.q_coeffs), len(other.q_coeffs))
        return SymmetryGenerator.make(
            (self.xi[0] + other.xi[0], self.xi[1] + other.xi[1]),
            [self.coefficient(j) + other.coefficient(j) for j in range(size)],
            provenance=" + ".join(p for p in (self.provenance, other.provenance) if p),
        )

    def scaled(self, factor: Any) -> "SymmetryGenerator":
        factor = _exact(factor)
        return SymmetryGenerator.make(
            (self.xi[0] * factor, self.xi[1] * factor),
            [s.scaled(factor) for s in self.q_coeffs],
            provenance=self.provenance,
        )

    def with_provenance(self, provenance: str) -> "SymmetryGenerator":
        return SymmetryGenerator(self.xi, self.q_coeffs, provenance)

    def q_text(self) -> str:
        pieces = []
        for degree, seq in enumerate(self.q_coeffs):
            if seq.is_zero():
                continue
            power = "" if degree == 0 else ("*u" if degree == 1 else f"*u^{degree}")
            pieces.append(f"[{real_form(seq)}]{power}")
        return " + ".join(pieces) if pieces else "0"

    def text(self) -> str:
        return f"xi = {coefficient_text(self.xi_expr())}; Q = {self.q_text()}"

    def __str__(self) -> str:
        return self.text()

    def to_json(self) -> Dict[str, Any]:
        return {
            "xi": [coefficient_text(self.xi[0]), coefficient_text(self.xi[1])],
            "q": [s.to_json() for s in self.q_coeffs],
            "provenance": self.provenance,
            "display": self.text(),
        }

    @classmethod
    def from_json(cls, payload: Mapping[str, Any]) -> "SymmetryGenerator":
        xi = payload.get("xi") or ["0", "0"]
        try:
            xi_values = [parse_coefficient(str(x)) for x in xi]
            q = [SequenceClosedForm.from_json(items) for items in payload.get("q") or []]
        except (KeyError, TypeError, ValueError) as exc:
            raise GeneratorError(f"malformed generator JSON: {exc}") from exc
        return cls.make(xi_values, q, str(payload.get("provenance", "")))


def shift_generator(provenance: str = "d/dn") -> SymmetryGenerator:
    return SymmetryGenerator.make((1, 0), None, provenance)


def scaling_generator(coefficient: Any = 1, degree: int = 1, provenance: str = "") -> SymmetryGenerator:
    return SymmetryGenerator.make((0, 0), {degree: constant(coefficient)}, provenance)
