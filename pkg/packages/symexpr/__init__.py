from packages.symexpr.expr import (
    Expr,
    NonRationalError,
    NumericDivisionByZero,
    UnboundSymbolError,
    eval_exact,
    eval_numeric,
    render,
    shift,
)
from packages.symexpr.gaussian import GaussianRational
from packages.symexpr.parser import ExprSyntaxError, UnknownFunctionError, parse_expr
from packages.symexpr.rational import (
    IdenticallySingularError,
    RationalFunction,
    UnknownSymbolError,
    to_rational,
)

__all__ = [
    "Expr",
    "ExprSyntaxError",
    "GaussianRational",
    "IdenticallySingularError",
    "NonRationalError",
    "NumericDivisionByZero",
    "RationalFunction",
    "UnboundSymbolError",
    "UnknownFunctionError",
    "UnknownSymbolError",
    "eval_exact",
    "eval_numeric",
    "parse_expr",
    "render",
    "shift",
    "to_rational",
]
