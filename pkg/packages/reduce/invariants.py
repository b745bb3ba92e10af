from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional

import sympy

from packages.eqmodel.equation import DifferenceEquation
from packages.seqform.roots import RootOfUnityScalar
from packages.seqform.sequence import SequenceClosedForm, coefficient_text
from packages.symexpr.rational import u_symbol
from packages.symmetry.generator import SymmetryGenerator

logger = logging.getLogger("dsym.reduce")

RATIO = "ratio"
TRANSLATION = "translation"


class UnsupportedFamily(ValueError):
    pass


@dataclass(frozen=True)
class Invariant:
    """v = u(1)/u(0) (ratio) or v = u(1) - rho*u(0) (translation)."""

    kind: str
    rho: Optional[RootOfUnityScalar] = None

    def rho_value(self) -> sympy.Expr:
        if self.rho is None:
            return sympy.Integer(0)
        return self.rho.exact_value()

    def expression(self) -> sympy.Expr:
        u0, u1 = u_symbol(0), u_symbol(1)
        if self.kind == RATIO:
            return u1 / u0
        return u1 - self.rho_value() * u0

    def evaluate(self, u0: Any, u1: Any) -> sympy.Expr:
        u0 = sympy.sympify(u0)
        u1 = sympy.sympify(u1)
        if self.kind == RATIO:
            if sympy.expand(u0) == 0:
                raise ZeroDivisionError("ratio invariant undefined at u(0) = 0")
            return sympy.expand(sympy.radsimp(u1 / u0))
        return sympy.expand(u1 - self.rho_value() * u0)

    def text(self) -> str:
        if self.kind == RATIO:
            return "v = u(1)/u(0)"
        return f"v = u(1) - {coefficient_text(self.rho_value(), True)}*u(0)"

    def to_json(self) -> Dict[str, Any]:
        return {
            "kind": self.kind,
            "rho": self.rho.text() if self.rho is not None else None,
            "display": self.text(),
        }


def _single_term(seq: SequenceClosedForm):
    if len(seq.terms) != 1 or seq.terms[0].degree != 0:
        return None
    return seq.terms[0]


def invariant_from_generator(eq: DifferenceEquation, g: SymmetryGenerator) -> Invariant:
    """Invariant of a scaling or pure translation generator, with f the identity."""
    if eq.order != 2:
        raise UnsupportedFamily(f"reduction is implemented for second-order equations, got order {eq.order}")
    if g.has_xi():
        raise UnsupportedFamily("generators moving n are not reduced")
    if g.degree == 1 and g.coefficient(0).is_zero():
        term = _single_term(g.coefficient(1))
        if term is None or term.root.m != 1 or not term.root.is_unit():
            raise UnsupportedFamily("ratio invariant needs Q = c*u with a constant c")
        return Invariant(RATIO)
    if g.degree == 0:
        term = _single_term(g.coefficient(0))
        if term is None:
            raise UnsupportedFamily("translation invariant needs Q = c*lam^n with a single root")
        logger.debug("translation invariant with rho = %s", term.root)
        return Invariant(TRANSLATION, term.root)
    raise UnsupportedFamily(f"no invariant family for Q = {g.q_text()}")
