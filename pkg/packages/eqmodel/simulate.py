from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import sympy

from packages.eqmodel.equation import DifferenceEquation, EquationError, UnboundParameterError
from packages.symexpr.expr import eval_algebraic, eval_exact, eval_numeric, u_name
from packages.symexpr.gaussian import GaussianRational

logger = logging.getLogger("dsym.eqmodel")

DEFAULT_SINGULAR_TOL = 1e-12

OK = "ok"
SINGULAR = "singular"
POST_SINGULAR = "post-singular"


class SingularValueError(EquationError):
    pass


@dataclass
class Trajectory:
    start: int
    values: List[Any] = field(default_factory=list)
    flags: List[str] = field(default_factory=list)
    mode: str = "exact"

    def value_at(self, n: int) -> Any:
        return self.values[n - self.start]

    def first_singular(self) -> Optional[int]:
        for offset, flag in enumerate(self.flags):
            if flag == SINGULAR:
                return self.start + offset
        return None

    def rows(self) -> List[Tuple[int, Optional[str], Optional[str], str]]:
        out = []
        for offset, (value, flag) in enumerate(zip(self.values, self.flags)):
            n = self.start + offset
            if value is None:
                out.append((n, None, None, flag))
                continue
            re_text, im_text = _parts(value)
            out.append((n, re_text, im_text, flag))
        return out

    def to_csv(self) -> str:
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["n", "re", "im", "flag"])
        for n, re_text, im_text, flag in self.rows():
            writer.writerow([n, re_text or "", im_text or "", flag])
        return buffer.getvalue()

    def to_json(self) -> List[Dict[str, Any]]:
        return [{"n": n, "re": re_text, "im": im_text, "flag": flag} for n, re_text, im_text, flag in self.rows()]

    def dumps(self) -> str:
        return json.dumps(self.to_json())


def _parts(value: Any) -> Tuple[str, str]:
    if isinstance(value, GaussianRational):
        return str(value.re), str(value.im)
    if isinstance(value, complex):
        return repr(value.real), repr(value.imag)
    real, imag = sympy.expand(value).as_real_imag()
    return str(real), str(imag)


def _exact_zero(value: sympy.Expr) -> bool:
    return sympy.expand(sympy.radsimp(value)) == 0


@dataclass(frozen=True)
class _Backend:
    name: str
    coerce: Callable[[Any], Any]
    evaluate: Callable[..., Any]
    is_singular: Callable[[Any, Any], bool]
    divide: Callable[[Any, Any], Any]


def _backend(mode: str, values: Sequence[Any], singular_tol: float) -> _Backend:
    if mode == "float":
        return _Backend(
            "float",
            coerce=complex,
            evaluate=eval_numeric,
            is_singular=lambda num, den: abs(den) < singular_tol * (1 + abs(num)),
            divide=lambda num, den: num / den,
        )
    if mode != "exact":
        raise EquationError(f"unknown simulation mode {mode!r}")
    try:
        [GaussianRational.coerce(v) for v in values]
        return _Backend(
            "exact",
            coerce=GaussianRational.coerce,
            evaluate=eval_exact,
            is_singular=lambda num, den: den.is_zero(),
            divide=lambda num, den: num / den,
        )
    except (TypeError, ValueError):
        return _Backend(
            "algebraic",
            coerce=lambda v: sympy.expand(sympy.sympify(v.to_sympy() if isinstance(v, GaussianRational) else v)),
            evaluate=eval_algebraic,
            is_singular=lambda num, den: _exact_zero(den),
            divide=lambda num, den: sympy.expand(sympy.radsimp(num / den)),
        )


def simulate(
    eq: DifferenceEquation,
    init: Sequence[Any],
    n0: int = 0,
    steps: int = 30,
    mode: str = "exact",
    params: Optional[Mapping[str, Any]] = None,
    singular_tol: float = DEFAULT_SINGULAR_TOL,
) -> Trajectory:
    """Iterate u(n+p) = omega from p initial values.

    The trajectory holds the p initial values followed by ``steps`` computed
    ones. A vanishing denominator flags the entry singular and every later
    entry post-singular; no value is produced for them.
    """
    if len(init) != eq.order:
        raise EquationError(f"expected {eq.order} initial values, got {len(init)}")
    if params:
        eq = eq.bind(params)
    eq.require_bound()
    backend = _backend(mode, list(init) + list(eq.bound_values().values()), singular_tol)
    numerator = eq.omega.numerator_expr
    denominator = eq.omega.denominator_expr
    trajectory = Trajectory(start=n0, mode=backend.name)
    for value in init:
        trajectory.values.append(backend.coerce(value))
        trajectory.flags.append(OK)
    dead = False
    for k in range(steps):
        if dead:
            trajectory.values.append(None)
            trajectory.flags.append(POST_SINGULAR)
            continue
        bindings: Dict[str, Any] = {"n": n0 + k}
        for j in range(eq.order):
            bindings[u_name(j)] = trajectory.values[k + j]
        num = backend.evaluate(numerator, bindings)
        den = backend.evaluate(denominator, bindings)
        if backend.is_singular(num, den):
            logger.info("singular step at n=%d while iterating %s", n0 + k + eq.order, eq.name or eq.omega_text)
            trajectory.values.append(None)
            trajectory.flags.append(SINGULAR)
            dead = True
            continue
        trajectory.values.append(backend.divide(num, den))
        trajectory.flags.append(OK)
    return trajectory


def recurrence_defect(
    eq: DifferenceEquation,
    window: Sequence[Any],
    n: int,
    params: Optional[Mapping[str, Any]] = None,
) -> sympy.Expr:
    """u(n+p)*den - num on exact values u(n)..u(n+p), without dividing."""
    if len(window) != eq.order + 1:
        raise EquationError(f"defect window needs {eq.order + 1} values")
    if params:
        eq = eq.bind(params)
    eq.require_bound()
    bindings: Dict[str, Any] = {"n": n}
    for j in range(eq.order):
        value = window[j]
        bindings[u_name(j)] = value.to_sympy() if isinstance(value, GaussianRational) else value
    last = window[-1]
    last = last.to_sympy() if isinstance(last, GaussianRational) else sympy.sympify(last)
    num = eval_algebraic(eq.omega.numerator_expr, bindings)
    den = eval_algebraic(eq.omega.denominator_expr, bindings)
    return sympy.expand(sympy.radsimp(last * den - num))


def defect_is_zero(value: sympy.Expr) -> bool:
    if _exact_zero(value):
        return True
    if value.free_symbols:
        return False
    return abs(complex(sympy.N(value, 60))) < 1e-40
