from __future__ import annotations

import functools
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from packages.catalog.formulas import FORMULAS, PublishedFormula
from packages.eqmodel.equation import DifferenceEquation, make_equation
from packages.seqform.sequence import SequenceClosedForm, alternating, constant, cos_seq, sin_seq
from packages.symmetry.generator import SymmetryGenerator, shift_generator

logger = logging.getLogger("dsym.catalog")

VERIFIED = "verified"
AUDIT = "audit"


class CatalogError(ValueError):
    pass


@dataclass(frozen=True)
class GeneratorRecord:
    label: str
    generator: SymmetryGenerator
    anchor: str
    expected: str = VERIFIED
    note: str = ""

    def to_json(self) -> Dict[str, Any]:
        payload = self.generator.to_json()
        payload.update({"label": self.label, "anchor": self.anchor, "expected": self.expected})
        if self.note:
            payload["note"] = self.note
        return payload


@dataclass(frozen=True)
class Branch:
    name: str
    assumptions: Tuple[str, ...]
    generators: Tuple[GeneratorRecord, ...]
    anchor: str = ""
    notes: Tuple[str, ...] = ()


@dataclass(frozen=True)
class CatalogEntry:
    id: str
    title: str
    omega: str
    params: Tuple[str, ...]
    branches: Tuple[Branch, ...]
    anchor: str = ""

    def branch(self, name: str) -> Branch:
        for branch in self.branches:
            if branch.name == name:
                return branch
        known = ", ".join(b.name for b in self.branches)
        raise CatalogError(f"{self.id} has no branch {name!r} (known: {known})")

    def equation(self, branch: str) -> DifferenceEquation:
        return _equation(self.id, branch)


@dataclass
class EntryView:
    """A catalog entry instantiated on one branch."""

    entry: CatalogEntry
    branch: Branch
    equation: DifferenceEquation
    formulas: List[PublishedFormula] = field(default_factory=list)

    @property
    def generators(self) -> List[SymmetryGenerator]:
        return [record.generator for record in self.branch.generators]

    def to_json(self) -> Dict[str, Any]:
        return {
            "id": self.entry.id,
            "title": self.entry.title,
            "branch": self.branch.name,
            "anchor": self.branch.anchor or self.entry.anchor,
            "equation": self.equation.to_json(),
            "omega": self.equation.omega_text,
            "generators": [record.to_json() for record in self.branch.generators],
            "notes": list(self.branch.notes),
            "solutions": [f.to_json() for f in self.formulas],
        }


def _q(label: str, anchor: str, terms: Dict[int, SequenceClosedForm], note: str = "") -> GeneratorRecord:
    return GeneratorRecord(label, SymmetryGenerator.make((0, 0), terms, provenance=label), anchor, note=note)


def _dn(label: str, anchor: str) -> GeneratorRecord:
    return GeneratorRecord(label, shift_generator(provenance=label), anchor)


def _third(kind: str) -> SequenceClosedForm:
    # (-1)^n cos(n*pi/3) = cos(2*pi*n/3) and (-1)^n sin(n*pi/3) = -sin(2*pi*n/3)
    return cos_seq(1, 3) if kind == "cos" else sin_seq(1, 3).scaled(-1)


def _build() -> Tuple[CatalogEntry, ...]:
    cos4, sin4 = cos_seq(1, 4), sin_seq(1, 4)
    cos3, sin3 = cos_seq(1, 3), sin_seq(1, 3)
    dp1 = CatalogEntry(
        "dP1",
        "discrete Painleve I",
        "-u(0)-u(1)+(a*n+b)/u(1)+c",
        ("a", "b", "c"),
        (
            Branch(
                "a_nonzero",
                ("a!=0", "c=0"),
                (
                    GeneratorRecord(
                        "X",
                        SymmetryGenerator.make(("2*b", "2*a"), {1: constant("a")}, provenance="X"),
                        "dP-I, a != 0: the single generator",
                    ),
                ),
                anchor="dP-I, case a != 0",
            ),
            Branch(
                "zero",
                ("a=0", "b=0", "c=0"),
                (
                    _q("X1", "dP-I, a = b = 0: scaling", {1: constant(1)}),
                    _q("X2", "dP-I, a = b = 0: (-1)^n cos(n*pi/3)", {0: _third("cos")}),
                    _q("X3", "dP-I, a = b = 0: (-1)^n sin(n*pi/3)", {0: _third("sin")}),
                    _dn("X4", "dP-I, a = b = 0: d/dn"),
                ),
                anchor="dP-I, case a = b = 0",
                notes=("printed (-1)^n cos(n*pi/3) is stored as cos(2*pi*n/3), the same sequence",),
            ),
            Branch(
                "c_two",
                ("a=0", "b=0", "c=2"),
                (),
                anchor="dP-V, image under u -> 1/u",
                notes=("reciprocal image of dP5/default; no generators are printed for it",),
            ),
        ),
        anchor="dP-I: u(n+2) = -u(n) - u(n+1) + (a*n+b)/u(n+1) + c",
    )
    dp2 = CatalogEntry(
        "dP2",
        "discrete Painleve II",
        "-u(0)+(u(1)*(a*n+b)+c)/(1-u(1)^2)",
        ("a", "b", "c"),
        (
            Branch(
                "zero",
                ("a=0", "b=0", "c=0"),
                (
                    _dn("X1", "dP-II, a = b = c = 0: d/dn"),
                    _q("X2", "dP-II, a = b = c = 0: cos(n*pi/2)", {0: cos4}),
                    _q("X3", "dP-II, a = b = c = 0: sin(n*pi/2)", {0: sin4}),
                ),
                anchor="dP-II, case a = b = c = 0",
                notes=(
                    "Q = alpha(n) where alpha satisfies the original equation alpha(n+2) = -alpha(n)",
                    "the determining solver also finds u, (-1)^n*u and the (u^2)*lam^n family",
                ),
            ),
        ),
        anchor="dP-II: u(n+2) = -u(n) + (u(n+1)*(a*n+b) + c)/(1 - u(n+1)^2)",
    )
    dp3 = CatalogEntry(
        "dP3",
        "discrete Painleve III",
        "(a*u(1)^2+b*u(1)+c)/(u(0)*(u(1)^2+d*u(1)+e))",
        ("a", "b", "c", "d", "e"),
        (
            Branch(
                "reciprocal_case",
                ("a!=0", "b=a*d", "c=a*e"),
                (
                    _q("X1", "dP-III, ad = b, ae = c: 1 - u^2/a", {0: constant(1), 2: constant("-1/a")}),
                    _q("X2", "dP-III, ad = b, ae = c: sin(n*pi/2)(1 + u^2/a)", {0: sin4, 2: sin4.scaled("1/a")}),
                    _q("X3", "dP-III, ad = b, ae = c: cos(n*pi/2)(1 + u^2/a)", {0: cos4, 2: cos4.scaled("1/a")}),
                    _q("X4", "dP-III, ad = b, ae = c: (-1)^n(1 - u^2/a)", {0: alternating(1), 2: alternating("-1/a")}),
                    _q("X5", "dP-III, ad = b, ae = c: cos(n*pi/2) u", {1: cos4}),
                    _q("X6", "dP-III, ad = b, ae = c: sin(n*pi/2) u", {1: sin4}),
                    _dn("X7", "dP-III, ad = b, ae = c: d/dn"),
                ),
                anchor="dP-III, case ad = b, ae = c: u(n+2) = a/u(n)",
                notes=(
                    "X1 is printed with a minus sign on its u(n+1) component; Q(n+1, u) = +(1 - u^2/a) is stored",
                    "log(u) maps this branch to dP2/zero up to an additive constant",
                ),
            ),
            Branch(
                "bcase",
                ("a=0", "c=0", "d=0", "e=0", "b!=0"),
                (
                    _q("X1", "dP-III, d^2 = -2e: (-1)^n cos(n*pi/3) u", {1: cos3}),
                    _q("X2", "dP-III, d^2 = -2e: (-1)^n sin(n*pi/3) u", {1: sin3.scaled(-1)}),
                    _dn("X3", "dP-III, d^2 = -2e: d/dn"),
                ),
                anchor="dP-III, case d^2 = -2e: u(n+2) = b/(u(n)*u(n+1))",
                notes=(
                    "alpha(n+2) + alpha(n+1) + alpha(n) = 0",
                    "log(u) maps this branch to dP1/zero up to an additive constant",
                ),
            ),
        ),
        anchor="dP-III: u(n+2) = (a*u(n+1)^2 + b*u(n+1) + c)/(u(n)*(u(n+1)^2 + d*u(n+1) + e))",
    )
    dp4 = CatalogEntry(
        "dP4",
        "discrete Painleve IV",
        "(-u(0)*u(1)+mu/u(1)^2+eps0)/(u(0)+u(1))",
        ("mu", "eps0"),
        (
            Branch(
                "general",
                ("mu=0",),
                (
                    _q("X1", "dP-IV: cos(2*n*pi/3)(u^2 + eps0)", {0: cos3.scaled("eps0"), 2: cos3}),
                    _q("X2", "dP-IV: sin(2*n*pi/3)(u^2 + eps0)", {0: sin3.scaled("eps0"), 2: sin3}),
                    _dn("X3", "dP-IV: d/dn"),
                ),
                anchor="dP-IV, symmetries presented without details",
                notes=(
                    "X1 and X2 only verify when mu = 0; the branch records that restriction",
                    "omega is autonomous for constant mu and eps0, so d/dn is consistent",
                    "verified per residue mod 3",
                ),
            ),
            Branch(
                "zero",
                ("mu=0", "eps0=0"),
                (
                    _q("X1", "dP-IV, mu = eps0 = 0: scaling", {1: constant(1)}),
                    _q("X2", "dP-IV, mu = eps0 = 0: (-1)^n cos(n*pi/3) u^2", {2: _third("cos")}),
                    _q("X3", "dP-IV, mu = eps0 = 0: (-1)^n sin(n*pi/3) u^2", {2: _third("sin")}),
                    _dn("X4", "dP-IV, mu = eps0 = 0: d/dn"),
                ),
                anchor="dP-IV, case mu = eps0 = 0",
                notes=(
                    "the prose says three symmetries; four are displayed and all four are kept",
                    "u -> 1/u maps this branch to dP1/zero",
                ),
            ),
        ),
        anchor="dP-IV: u(n+2) = (-u(n)*u(n+1) + mu/u(n+1)^2 + eps0)/(u(n) + u(n+1))",
    )
    dp5 = CatalogEntry(
        "dP5",
        "discrete Painleve V",
        "u(0)*u(1)/(2*u(1)*u(0)-u(0)-u(1))",
        (),
        (
            Branch(
                "default",
                (),
                (
                    _q("X1", "dP-V: u - (2/3)u^2", {1: constant(1), 2: constant("-2/3")}),
                    _q("X2", "dP-V: (-1)^n cos(n*pi/3) u^2", {2: _third("cos")}),
                    _q("X3", "dP-V: (-1)^n sin(n*pi/3) u^2", {2: _third("sin")}),
                    _dn("X4", "dP-V: d/dn"),
                ),
                anchor="dP-V with the remaining parameters set to zero",
                notes=("u -> 1/u maps this equation to dP1/c_two",),
            ),
        ),
        anchor="dP-V: u(n+2) = u(n)*u(n+1)/(2*u(n+1)*u(n) - u(n) - u(n+1))",
    )
    return (dp1, dp2, dp3, dp4, dp5)


ENTRIES: Tuple[CatalogEntry, ...] = _build()


def entry(entry_id: str) -> CatalogEntry:
    for item in ENTRIES:
        if item.id.lower() == entry_id.lower():
            return item
    raise CatalogError(f"unknown catalog entry {entry_id!r}")


@functools.lru_cache(maxsize=None)
def _equation(entry_id: str, branch: str) -> DifferenceEquation:
    item = entry(entry_id)
    chosen = item.branch(branch)
    return make_equation(
        item.omega,
        2,
        params=item.params,
        assumptions=chosen.assumptions,
        name=f"{item.id}/{chosen.name}",
    )


def get(entry_id: str, branch: str, values: Optional[Dict[str, Any]] = None) -> EntryView:
    item = entry(entry_id)
    chosen = item.branch(branch)
    equation = _equation(item.id, chosen.name)
    if values:
        equation = equation.bind(values)
    formulas = [f for f in FORMULAS if f.equation_id == item.id and f.branch == chosen.name]
    return EntryView(item, chosen, equation, formulas)


def list_entries() -> List[Dict[str, Any]]:
    rows = []
    for item in ENTRIES:
        for branch in item.branches:
            rows.append(
                {
                    "id": item.id,
                    "branch": branch.name,
                    "title": item.title,
                    "omega": item.omega,
                    "assumptions": list(branch.assumptions),
                    "generators": len(branch.generators),
                    "notes": list(branch.notes),
                }
            )
    return rows


def total_generators() -> int:
    return sum(len(b.generators) for item in ENTRIES for b in item.branches)


def get_formula(formula_id: str) -> PublishedFormula:
    for formula in FORMULAS:
        if formula.formula_id == formula_id:
            return formula
    raise CatalogError(f"unknown published formula {formula_id!r}")


def export(entry_id: str, branch: str) -> Dict[str, Any]:
    view = get(entry_id, branch)
    logger.debug("export %s/%s", view.entry.id, view.branch.name)
    return view.to_json()
