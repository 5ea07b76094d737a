"""Analytic torsion verification workbench."""
from .errors import (
    CalibrationFailure,
    DegenerateInput,
    DomainError,
    NumericalFailure,
    PreconditionError,
    UnsupportedInput,
)

__version__ = "0.1.0"

__all__ = [
    "CalibrationFailure",
    "DegenerateInput",
    "DomainError",
    "NumericalFailure",
    "PreconditionError",
    "UnsupportedInput",
    "__version__",
]
