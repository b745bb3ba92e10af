from __future__ import annotations

import argparse
import json
import logging
import os
import re
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from packages.catalog import (
    FORMULAS,
    CatalogError,
    EntryView,
    PublishedFormula,
    get,
    get_formula,
    list_entries,
    total_generators,
)
from packages.catalog.entries import ENTRIES, VERIFIED, entry
from packages.eqmodel.equation import DifferenceEquation, equation_from_json
from packages.eqmodel.simulate import DEFAULT_SINGULAR_TOL, simulate
from packages.eqmodel.transforms import transform_equation
from packages.reduce import (
    audit_branches,
    audit_published_solution,
    invariant_from_generator,
    reconstruct,
    reduced_map,
    solve_first_order,
)
from packages.reduce.audit import MATCH
from packages.seqform.recurrence import RecurrenceConstraint, solve_recurrence
from packages.seqform.sequence import real_form
from packages.symexpr.expr import eval_exact, free_symbols, render
from packages.symexpr.gaussian import GaussianRational
from packages.symexpr.parser import ExprSyntaxError, parse_expr
from packages.symexpr.rational import RationalFunction
from packages.symmetry.determining import describe_constraints, extract_determining_system, solve_determining_system
from packages.symmetry.generator import SymmetryGenerator
from packages.symmetry.verify import DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOLERANCE, verify

logger = logging.getLogger("dsym.cli")

STATUS_OK = "ok"
STATUS_FAILED = "verification_failed"
STATUS_ERROR = "error"
EXIT_CODES = {STATUS_OK: 0, STATUS_FAILED: 2, STATUS_ERROR: 1}

_TERM_RE = re.compile(r"\s*([+-]?)\s*(?:\(?([^()*X]*?)\)?\s*\*\s*)?X(\d+)\s*")


@dataclass
class CliReport:
    command: List[str]
    status: str = STATUS_OK
    payload: Dict[str, Any] = field(default_factory=dict)
    elapsed_ms: Optional[float] = None
    text: Optional[str] = None
    output_format: str = "json"

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    def to_json(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {"command": self.command, "status": self.status, "payload": self.payload}
        if self.elapsed_ms is not None:
            out["elapsed_ms"] = self.elapsed_ms
        return out


def _configure_logging() -> None:
    level = os.getenv("DSYM_LOG_LEVEL", "INFO").upper()
    log_path = os.getenv("DSYM_LOG_PATH")
    kwargs: Dict[str, Any] = {
        "level": getattr(logging, level, logging.INFO),
        "format": "%(asctime)s %(levelname)s %(name)s %(message)s",
    }
    if log_path:
        kwargs["filename"] = log_path
    else:
        kwargs["stream"] = sys.stderr
    logging.basicConfig(**kwargs)


def _default_singular_tol() -> float:
    raw = os.getenv("DSYM_FLOAT_SINGULAR_TOL", "").strip()
    if not raw:
        return DEFAULT_SINGULAR_TOL
    try:
        return float(raw)
    except ValueError:
        logger.warning("ignoring DSYM_FLOAT_SINGULAR_TOL=%r", raw)
        return DEFAULT_SINGULAR_TOL


def _literal(text: str) -> GaussianRational:
    try:
        return GaussianRational.parse(text.strip())
    except ValueError:
        return eval_exact(parse_expr(text), {})


def _params(items: Optional[Sequence[str]]) -> Dict[str, GaussianRational]:
    values: Dict[str, GaussianRational] = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--param expects name=value, got {item!r}")
        values[name.strip()] = _literal(value)
    return values


def _load_equation(args: argparse.Namespace) -> Tuple[DifferenceEquation, Optional[EntryView]]:
    ref = args.eq
    if os.path.exists(ref):
        with open(ref, "r", encoding="utf-8") as handle:
            eq = equation_from_json(handle.read())
        values = _params(getattr(args, "param", None))
        return (eq.bind(values) if values else eq), None
    catalog_id, _, inline_branch = ref.partition("/")
    branch = args.branch or inline_branch or entry(catalog_id).branches[0].name
    view = get(catalog_id, branch, _params(getattr(args, "param", None)) or None)
    return view.equation, view


def _combine(combination: str, view: EntryView) -> SymmetryGenerator:
    """Linear combination of catalog generators, for example "X2+i*X3"."""
    records = {record.label: record.generator for record in view.branch.generators}
    total: Optional[SymmetryGenerator] = None
    position = 0
    compact = combination.replace(" ", "")
    while position < len(compact):
        match = _TERM_RE.match(compact, position)
        if not match or match.end() == position:
            raise ValueError(f"cannot read generator combination {combination!r}")
        sign, coefficient, index = match.groups()
        label = f"X{index}"
        if label not in records:
            raise CatalogError(f"{view.entry.id}/{view.branch.name} has no generator {label}")
        factor = _literal(coefficient) if coefficient else GaussianRational(1)
        if sign == "-":
            factor = -factor
        term = records[label].scaled(factor.to_sympy())
        total = term if total is None else total + term
        position = match.end()
    if total is None:
        raise ValueError("empty generator reference")
    return total.with_provenance(combination)


def _load_generator(args: argparse.Namespace, view: Optional[EntryView]) -> SymmetryGenerator:
    ref = args.gen
    if os.path.exists(ref):
        with open(ref, "r", encoding="utf-8") as handle:
            return SymmetryGenerator.from_json(json.load(handle))
    if view is None:
        raise ValueError("catalog generator references need a catalog equation")
    if ref.isdigit():
        index = int(ref)
        records = view.branch.generators
        if not 1 <= index <= len(records):
            raise CatalogError(f"generator index {index} out of range 1..{len(records)}")
        return records[index - 1].generator
    return _combine(ref, view)


def _anchor(view: Optional[EntryView]) -> Optional[str]:
    if view is None:
        return None
    return view.branch.anchor or view.entry.anchor


def _resolve_formula(ref: str, view: Optional[EntryView]) -> PublishedFormula:
    """Exact formula id, or a unique suffix among the formulas of the chosen entry."""
    try:
        return get_formula(ref)
    except CatalogError:
        candidates = [f for f in (view.formulas if view else []) if f.formula_id.endswith(ref)]
        if len(candidates) == 1:
            return candidates[0]
        raise


def cmd_parse(args: argparse.Namespace) -> CliReport:
    report = CliReport(["parse"])
    try:
        expr = parse_expr(args.expr)
    except ExprSyntaxError as exc:
        report.status = STATUS_ERROR
        report.payload = {"error": str(exc), "offset": exc.offset}
        return report
    payload: Dict[str, Any] = {"rendered": render(expr), "symbols": sorted(free_symbols(expr))}
    try:
        rational = RationalFunction.from_expr(expr)
        payload["canonical"] = rational.render()
    except ValueError as exc:
        payload["canonical"] = None
        payload["note"] = str(exc)
    report.payload = payload
    return report


def cmd_verify(args: argparse.Namespace) -> CliReport:
    eq, view = _load_equation(args)
    generator = _load_generator(args, view)
    result = verify(
        eq,
        generator,
        mode=args.mode,
        samples=args.samples,
        tol=args.tol,
        seed=args.seed,
        max_degree=args.max_degree,
    )
    report = CliReport(["verify", args.eq, args.gen])
    report.status = STATUS_OK if result.passed else STATUS_FAILED
    report.payload = {
        "equation": eq.describe(),
        "generator": generator.to_json(),
        "anchor": _anchor(view),
        "report": result.to_json(),
    }
    return report


def cmd_determine(args: argparse.Namespace) -> CliReport:
    eq, view = _load_equation(args)
    system = extract_determining_system(eq, args.degree, args.xi)
    solution = solve_determining_system(system, args.assume or ())
    report = CliReport(["determine", args.eq])
    report.payload = {
        "equation": eq.describe(),
        "anchor": _anchor(view),
        "system": {"equations": len(system.equations), "unknowns": [str(u) for u in system.unknowns]},
        "solution": solution.to_json(),
        "constraints": describe_constraints(solution),
    }
    if args.show_system:
        report.payload["system"] = system.to_json()
    return report


def cmd_simulate(args: argparse.Namespace) -> CliReport:
    eq, view = _load_equation(args)
    init = [_literal(x) for x in args.init.split(",")]
    trajectory = simulate(
        eq,
        init,
        n0=args.n0,
        steps=args.steps,
        mode=args.mode,
        singular_tol=args.singular_tol,
    )
    report = CliReport(["simulate", args.eq])
    report.payload = {
        "equation": eq.describe(),
        "mode": trajectory.mode,
        "first_singular": trajectory.first_singular(),
        "trajectory": trajectory.to_json(),
    }
    if args.out == "csv":
        report.text = trajectory.to_csv()
    return report


def cmd_transform(args: argparse.Namespace) -> CliReport:
    eq, _ = _load_equation(args)
    result = transform_equation(eq, args.kind, _literal(args.s), _literal(args.t))
    report = CliReport(["transform", args.eq, args.kind])
    report.payload = {
        "kind": result.kind,
        "source": eq.omega_text,
        "omega": result.equation.omega_text,
        "metadata": result.metadata,
    }
    return report


def cmd_reduce_solve(args: argparse.Namespace) -> CliReport:
    eq, view = _load_equation(args)
    generator = _load_generator(args, view)
    invariant = invariant_from_generator(eq, generator)
    reduced = reduced_map(eq, invariant)
    v_solution = solve_first_order(reduced)
    u0, u1 = _literal(args.u0), _literal(args.u1)
    u_solution = reconstruct(eq, invariant, v_solution, u0, u1)
    report = CliReport(["reduce", args.eq, args.gen])
    report.payload = {
        "equation": eq.describe(),
        "anchor": _anchor(view),
        "generator": generator.to_json(),
        "invariant": invariant.to_json(),
        "map": reduced.to_json(),
        "v": v_solution.to_json(),
        "u": u_solution.to_json(),
    }
    if args.audit:
        formula = _resolve_formula(args.audit, view)
        audits = audit_branches(eq, formula.branches, u0=u0, u1=u1)
        report.payload["audit"] = [a.to_json() for a in audits]
        if any(a.verdict != MATCH for a in audits):
            report.status = STATUS_FAILED
    return report


def cmd_solve_recurrence(args: argparse.Namespace) -> CliReport:
    rc = RecurrenceConstraint.make(_literal(c).to_sympy() for c in args.coeffs.split(","))
    basis = solve_recurrence(rc)
    report = CliReport(["solve-recurrence", args.coeffs])
    report.payload = {
        "recurrence": rc.text(),
        "basis": [s.to_json() for s in basis],
        "display": [real_form(s) for s in basis],
    }
    return report


def cmd_catalog(args: argparse.Namespace) -> CliReport:
    report = CliReport(["catalog", args.action])
    if args.action == "list":
        report.payload = {"entries": list_entries(), "total_generators": total_generators()}
        return report
    if not args.id:
        raise ValueError("catalog export needs --id")
    catalog_id = args.id
    branch = args.branch or entry(catalog_id).branches[0].name
    report.command += [catalog_id, branch]
    report.payload = get(catalog_id, branch).to_json()
    return report


def selftest_payload() -> Tuple[bool, Dict[str, Any]]:
    """Verify every catalog generator and audit every published formula."""
    generators = []
    healthy = True
    for item in ENTRIES:
        for branch in item.branches:
            eq = item.equation(branch.name)
            for record in branch.generators:
                result = verify(eq, record.generator, mode="symbolic")
                expected_pass = record.expected == VERIFIED
                ok = result.passed == expected_pass
                healthy = healthy and ok
                generators.append(
                    {
                        "id": f"{item.id}/{branch.name}/{record.label}",
                        "verdict": result.verdict,
                        "residues": result.residues_checked,
                        "as_expected": ok,
                    }
                )
    audits = []
    for formula in FORMULAS:
        eq = get(formula.equation_id, formula.branch).equation
        for branch in formula.branches:
            result = audit_published_solution(eq, branch)
            verdict, first_fail = formula.expected.get(branch.branch, (None, None))
            ok = result.verdict == verdict and result.first_fail_n == first_fail
            healthy = healthy and ok
            audits.append(
                {
                    "formula_id": formula.formula_id,
                    "branch": branch.branch,
                    "verdict": result.verdict,
                    "first_fail_n": result.first_fail_n,
                    "as_expected": ok,
                }
            )
    return healthy, {"generators": generators, "audits": audits}


def cmd_selftest(args: argparse.Namespace) -> CliReport:
    healthy, payload = selftest_payload()
    report = CliReport(["selftest"], payload=payload)
    report.status = STATUS_OK if healthy else STATUS_FAILED
    return report


COMMANDS: Dict[str, Callable[[argparse.Namespace], CliReport]] = {
    "parse": cmd_parse,
    "verify": cmd_verify,
    "determine": cmd_determine,
    "simulate": cmd_simulate,
    "transform": cmd_transform,
    "reduce": cmd_reduce_solve,
    "solve-recurrence": cmd_solve_recurrence,
    "catalog": cmd_catalog,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)
    common.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    common.add_argument("--singular-tol", type=float, default=None)

    eq_args = argparse.ArgumentParser(add_help=False)
    eq_args.add_argument("--eq", required=True, help="catalog id (dP1..dP5, optionally id/branch) or equation JSON file")
    eq_args.add_argument("--branch", default=None)
    eq_args.add_argument("--param", action="append", help="bind a parameter, name=value")

    parser = argparse.ArgumentParser(prog="dsym", description="Lie point symmetries of discrete Painleve equations")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", parents=[common])
    p.add_argument("--expr", required=True)

    p = sub.add_parser("verify", parents=[common, eq_args])
    p.add_argument("--gen", required=True, help="catalog index, label combination like X2+i*X3, or generator JSON file")
    p.add_argument("--mode", choices=["symbolic", "numeric"], default="symbolic")
    p.add_argument("--max-degree", type=int, default=2)

    p = sub.add_parser("determine", parents=[common, eq_args])
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--xi", choices=["none", "affine"], default="affine")
    p.add_argument("--assume", action="append", help="extra assumption such as a!=0")
    p.add_argument("--show-system", action="store_true")

    p = sub.add_parser("simulate", parents=[common, eq_args])
    p.add_argument("--init", required=True, help="comma separated initial values, e.g. 1,1/2+i")
    p.add_argument("--n0", type=int, default=0)
    p.add_argument("--steps", type=int, default=30)
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--out", choices=["json", "csv"], default="json")

    p = sub.add_parser("transform", parents=[common, eq_args])
    p.add_argument("--kind", choices=["reciprocal", "log", "affine"], required=True)
    p.add_argument("--s", default="1")
    p.add_argument("--t", default="0")

    p = sub.add_parser("reduce", parents=[common, eq_args])
    p.add_argument("--gen", required=True)
    p.add_argument("--u0", default="1")
    p.add_argument("--u1", default="3")
    p.add_argument("--audit", default=None, help="published formula id, e.g. dP4-ceiling")

    p = sub.add_parser("solve-recurrence", parents=[common])
    p.add_argument("--coeffs", required=True, help="c0,c1,...,cr of c_r*alpha(n+r) + ... + c_0*alpha(n) = 0")

    p = sub.add_parser("catalog", parents=[common])
    p.add_argument("action", choices=["list", "export"])
    p.add_argument("--id", default=None)
    p.add_argument("--branch", default=None)

    sub.add_parser("selftest", parents=[common])
    return parser


def _text(value: Any, indent: int = 0) -> List[str]:
    pad = "  " * indent
    if isinstance(value, dict):
        lines = []
        for key, item in value.items():
            if isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}{key}:")
                lines.extend(_text(item, indent + 1))
            else:
                lines.append(f"{pad}{key}: {item}")
        return lines
    if isinstance(value, list):
        lines = []
        for item in value:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {item}")
        return lines
    return [f"{pad}{value}"]


def render_report(report: CliReport, output_format: str) -> str:
    if report.text is not None and report.status == STATUS_OK:
        return report.text
    if output_format == "text":
        return "\n".join([f"status: {report.status}"] + _text(report.payload)) + "\n"
    return json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"


def run(argv: Optional[Sequence[str]] = None) -> CliReport:
    args = build_parser().parse_args(argv)
    if args.singular_tol is None:
        args.singular_tol = _default_singular_tol()
    started = time.perf_counter()
    try:
        report = COMMANDS[args.command](args)
    except (ValueError, ZeroDivisionError, OSError) as exc:
        logger.info("%s failed: %s", args.command, exc)
        report = CliReport([args.command], status=STATUS_ERROR, payload={"error": str(exc)})
    except RuntimeError as exc:
        logger.exception("%s hit an internal consistency failure", args.command)
        report = CliReport([args.command], status=STATUS_ERROR, payload={"error": str(exc)})
    # selftest output stays byte-stable across runs
    if args.command != "selftest":
        report.elapsed_ms = round((time.perf_counter() - started) * 1000, 3)
    report.output_format = args.format
    return report


def main(argv: Optional[Sequence[str]] = None) -> int:
    _configure_logging()
    report = run(argv)
    sys.stdout.write(render_report(report, report.output_format))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
