from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import sympy

from packages.eqmodel.equation import DifferenceEquation
from packages.seqform.sequence import SequenceClosedForm, Term, seq_shift
from packages.symexpr.rational import RationalFunction, u_symbol
from packages.symmetry.generator import DEFAULT_MAX_DEGREE, SymmetryGenerator

logger = logging.getLogger("dsym.symmetry")

N = sympy.Symbol("n")


def q_symbol(degree: int, shift: int) -> sympy.Symbol:
    """Opaque stand-in for q_degree(n + shift)."""
    return sympy.Symbol(f"q{degree}_{shift}")


@dataclass
class Residual:
    """R = S^p Q - xi dω/dn - sum_k Q(n+k, U(k)) dω/dU(k).

    Coefficient sequences stay as opaque symbols q{j}_{k} until evaluated;
    ``bindings`` maps each symbol to the shifted sequence it stands for.
    """

    equation: DifferenceEquation
    generator: SymmetryGenerator
    terms: List[sympy.Expr]
    bindings: Dict[sympy.Symbol, SequenceClosedForm] = field(default_factory=dict)

    def template(self) -> sympy.Expr:
        return sympy.Add(*self.terms)

    def numerator(self, values: Optional[Dict[sympy.Symbol, sympy.Expr]] = None) -> sympy.Expr:
        expr = self.template()
        if values:
            expr = expr.xreplace(values)
        num, _ = sympy.fraction(sympy.together(expr))
        return sympy.expand(num)

    def has_sequence_symbols(self) -> bool:
        return any(not _is_plain_constant(s) for s in self.bindings.values())

    def constant_values(self) -> Dict[sympy.Symbol, sympy.Expr]:
        values = {}
        for symbol, seq in self.bindings.items():
            values[symbol] = seq.terms[0].coefficient if seq.terms else sympy.Integer(0)
        return values

    def values_at(self, n: int) -> Dict[sympy.Symbol, sympy.Expr]:
        return {symbol: seq.exact_value(n) for symbol, seq in self.bindings.items()}

    def canonical(self) -> RationalFunction:
        """Canonical rational function; only defined when every coefficient sequence is constant."""
        if self.has_sequence_symbols():
            raise ValueError("residual carries non-constant coefficient sequences; evaluate per residue")
        return RationalFunction(self.template().xreplace(self.constant_values()))

    def at_residue(self, r: int) -> RationalFunction:
        return RationalFunction(self.template().xreplace(self.values_at(r)))


def _is_plain_constant(seq: SequenceClosedForm) -> bool:
    if seq.is_zero():
        return True
    return len(seq.terms) == 1 and seq.terms[0].degree == 0 and seq.terms[0].root.m == 1 and seq.terms[0].root.is_unit()


def residual(
    eq: DifferenceEquation,
    g: SymmetryGenerator,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> Residual:
    g.check_degree(max_degree)
    p = eq.order
    omega = eq.omega.as_sympy()
    terms: List[sympy.Expr] = []
    bindings: Dict[sympy.Symbol, SequenceClosedForm] = {}
    substitution = {sympy.Symbol(k): v for k, v in eq.substitution}
    substitution.update({sympy.Symbol(k): v.to_sympy() for k, v in eq.bound_values().items()})

    def symbol_for(degree: int, shift: int) -> sympy.Symbol:
        symbol = q_symbol(degree, shift)
        bindings[symbol] = seq_shift(g.coefficient(degree), shift)
        if substitution:
            bindings[symbol] = _substituted(bindings[symbol], substitution)
        return symbol

    for degree, seq in enumerate(g.q_coeffs):
        if seq.is_zero():
            continue
        terms.append(symbol_for(degree, p) * omega**degree)
    xi = g.xi_expr().xreplace(substitution) if substitution else g.xi_expr()
    if xi != 0:
        terms.append(-xi * sympy.diff(omega, N))
    for k in range(p):
        d_omega = sympy.diff(omega, u_symbol(k))
        if d_omega == 0:
            continue
        for degree, seq in enumerate(g.q_coeffs):
            if seq.is_zero():
                continue
            terms.append(-symbol_for(degree, k) * u_symbol(k) ** degree * d_omega)
    return Residual(eq, g, terms, bindings)


def _substituted(seq: SequenceClosedForm, substitution: Dict[sympy.Symbol, sympy.Expr]) -> SequenceClosedForm:
    return SequenceClosedForm.from_terms(
        Term(sympy.expand(t.coefficient.xreplace(substitution)), t.root, t.degree) for t in seq.terms
    )
