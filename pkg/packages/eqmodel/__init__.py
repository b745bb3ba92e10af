from packages.eqmodel.equation import (
    Assumption,
    DifferenceEquation,
    EquationError,
    InconsistentAssumptions,
    UnboundParameterError,
    equation_from_json,
    make_equation,
)
from packages.eqmodel.simulate import Trajectory, recurrence_defect, simulate
from packages.eqmodel.transforms import NotLogLinear, TransformResult, is_linear_homogeneous, transform_equation

__all__ = [
    "Assumption",
    "DifferenceEquation",
    "EquationError",
    "InconsistentAssumptions",
    "NotLogLinear",
    "Trajectory",
    "TransformResult",
    "UnboundParameterError",
    "equation_from_json",
    "is_linear_homogeneous",
    "make_equation",
    "recurrence_defect",
    "simulate",
    "transform_equation",
]
