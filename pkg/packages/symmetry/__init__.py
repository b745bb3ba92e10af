from packages.symmetry.determining import (
    DeterminingSolution,
    DeterminingSystem,
    DeterminingSystemError,
    autonomous_shift_symmetry,
    determine,
    extract_determining_system,
    solve_determining_system,
)
from packages.symmetry.generator import GeneratorError, SymmetryGenerator
from packages.symmetry.residual import Residual, residual
from packages.symmetry.verify import VerificationError, VerificationReport, verify

__all__ = [
    "DeterminingSolution",
    "DeterminingSystem",
    "DeterminingSystemError",
    "GeneratorError",
    "Residual",
    "SymmetryGenerator",
    "VerificationError",
    "VerificationReport",
    "autonomous_shift_symmetry",
    "determine",
    "extract_determining_system",
    "residual",
    "solve_determining_system",
    "verify",
]
