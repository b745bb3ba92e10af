from packages.reduce.audit import AuditReport, FormulaBranch, audit_branches, audit_published_solution
from packages.reduce.invariants import Invariant, UnsupportedFamily, invariant_from_generator
from packages.reduce.maps import NotClosed, ReducedMap, matrix_power, orbit_period, reduced_map
from packages.reduce.solutions import (
    ClosedFormSolution,
    ReconstructionError,
    SingularInitialData,
    reconstruct,
    solve_first_order,
)

__all__ = [
    "AuditReport",
    "ClosedFormSolution",
    "FormulaBranch",
    "Invariant",
    "NotClosed",
    "ReconstructionError",
    "ReducedMap",
    "SingularInitialData",
    "UnsupportedFamily",
    "audit_branches",
    "audit_published_solution",
    "invariant_from_generator",
    "matrix_power",
    "orbit_period",
    "reconstruct",
    "reduced_map",
    "solve_first_order",
]
