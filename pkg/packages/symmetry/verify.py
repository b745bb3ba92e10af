from __future__ import annotations

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import sympy

from packages.eqmodel.equation import DifferenceEquation
from packages.seqform.sequence import eval_seq, period
from packages.symexpr.expr import NumericDivisionByZero, eval_numeric, from_sympy, u_name
from packages.symmetry.generator import DEFAULT_MAX_DEGREE, SymmetryGenerator
from packages.symmetry.residual import residual

logger = logging.getLogger("dsym.symmetry")

DEFAULT_SAMPLES = 100
DEFAULT_TOLERANCE = 1e-9
DEFAULT_SEED = 0
MIN_DENOMINATOR = 1e-6
MAX_SAMPLE_N = 40


class VerificationError(ValueError):
    pass


@dataclass
class VerificationReport:
    mode: str
    verdict: str
    residual_norm: Optional[float] = None
    witness: Optional[Dict[str, Any]] = None
    residues_checked: List[int] = field(default_factory=list)
    failing_residue: Optional[int] = None
    samples_used: int = 0
    samples_skipped: int = 0

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "verdict": self.verdict,
            "residual_norm": self.residual_norm,
            "witness": self.witness,
            "residues_checked": self.residues_checked,
            "failing_residue": self.failing_residue,
            "samples_used": self.samples_used,
            "samples_skipped": self.samples_skipped,
        }


def _coefficient_period(g: SymmetryGenerator) -> int:
    result = 1
    for seq in g.q_coeffs:
        seq_period = period(seq)
        if seq_period is None:
            raise VerificationError(f"coefficient sequence {seq} has no finite period; use numeric mode")
        result = result * seq_period // math.gcd(result, seq_period)
    return result


def verify_symbolic(eq: DifferenceEquation, g: SymmetryGenerator, max_degree: int = DEFAULT_MAX_DEGREE) -> VerificationReport:
    res = residual(eq, g, max_degree)
    length = _coefficient_period(g)
    report = VerificationReport(mode="symbolic", verdict="pass")
    for r in range(length):
        report.residues_checked.append(r)
        if res.numerator(res.values_at(r)) != 0:
            report.verdict = "fail"
            report.failing_residue = r
            logger.info("symbolic verification of %s failed at residue %d", g.provenance or g.text(), r)
            break
    return report


def _complex_point(rng: random.Random, radius: float = 2.0) -> complex:
    return complex(rng.uniform(-radius, radius), rng.uniform(-radius, radius))


def verify_numeric(
    eq: DifferenceEquation,
    g: SymmetryGenerator,
    samples: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOLERANCE,
    seed: int = DEFAULT_SEED,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> VerificationReport:
    """Sample the residual at random complex points.

    Free parameters get random complex values at each sample; the relative
    residual is |R| / max(1, sum of |terms|).
    """
    res = residual(eq, g, max_degree)
    terms = [from_sympy(sympy.together(term)) for term in res.terms]
    _, denominator = sympy.fraction(sympy.together(res.template()))
    denominator_expr = from_sympy(sympy.expand(denominator))
    params = sorted(
        {s.name for term in res.terms for s in term.free_symbols}
        - {"n"}
        - {u_name(k) for k in range(eq.order)}
        - {s.name for s in res.bindings}
    )
    rng = random.Random(seed)
    cache: Dict[Any, complex] = {}
    report = VerificationReport(mode="numeric", verdict="pass", residual_norm=0.0)
    attempts = 0
    while report.samples_used < samples and attempts < 20 * max(samples, 1):
        attempts += 1
        n = rng.randint(0, MAX_SAMPLE_N)
        bindings: Dict[str, Any] = {"n": n}
        for name in params:
            bindings[name] = _complex_point(rng)
        for k in range(eq.order):
            bindings[u_name(k)] = _complex_point(rng)
        param_values = {name: bindings[name] for name in params}
        for symbol, seq in res.bindings.items():
            key = (symbol, n)
            if seq.free_parameters():
                bindings[symbol.name] = complex(eval_seq(seq, n, param_values))
                continue
            if key not in cache:
                cache[key] = complex(eval_seq(seq, n))
            bindings[symbol.name] = cache[key]
        try:
            if abs(eval_numeric(denominator_expr, bindings)) < MIN_DENOMINATOR:
                report.samples_skipped += 1
                continue
            values = [eval_numeric(term, bindings) for term in terms]
        except NumericDivisionByZero:
            report.samples_skipped += 1
            continue
        report.samples_used += 1
        total = sum(values)
        relative = abs(total) / max(1.0, sum(abs(v) for v in values))
        if relative > report.residual_norm:
            report.residual_norm = relative
            if relative > tol:
                report.verdict = "fail"
                report.witness = {
                    "n": n,
                    "u_n": [bindings[u_name(0)].real, bindings[u_name(0)].imag],
                    "u_n1": [bindings[u_name(1)].real, bindings[u_name(1)].imag] if eq.order > 1 else None,
                    "params": {k: [v.real, v.imag] for k, v in param_values.items()},
                    "residual": [total.real, total.imag],
                }
    if report.samples_used == 0:
        raise VerificationError("every sample point was singular")
    if report.samples_skipped:
        logger.warning("skipped %d singular sample points", report.samples_skipped)
    return report


def verify(
    eq: DifferenceEquation,
    g: SymmetryGenerator,
    mode: str = "symbolic",
    samples: int = DEFAULT_SAMPLES,
    tol: float = DEFAULT_TOLERANCE,
    seed: int = DEFAULT_SEED,
    max_degree: int = DEFAULT_MAX_DEGREE,
) -> VerificationReport:
    if mode == "symbolic":
        report = verify_symbolic(eq, g, max_degree)
    elif mode == "numeric":
        report = verify_numeric(eq, g, samples=samples, tol=tol, seed=seed, max_degree=max_degree)
    else:
        raise VerificationError(f"unknown verification mode {mode!r}")
    logger.info("verify %s %s: %s", mode, g.provenance or g.text(), report.verdict)
    return report
