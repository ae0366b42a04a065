"""nvlab - numerical experiments for the Novikov-Veselov equation at fixed energy."""

from nvlab.errors import (
    BlowUpReachedError,
    DomainError,
    InstabilityDetectedError,
    NVLabError,
    OutputError,
    ResolutionInsufficientError,
)
from nvlab.solver import FieldState, Scheme, StepperConfig, evolve, step
from nvlab.stationary import StationaryPointSet, stationary_set
from nvlab.symbol import eval_phase, eval_symbol

__version__ = "0.1.0"
__all__ = [
    "BlowUpReachedError",
    "DomainError",
    "FieldState",
    "InstabilityDetectedError",
    "NVLabError",
    "OutputError",
    "ResolutionInsufficientError",
    "Scheme",
    "StationaryPointSet",
    "StepperConfig",
    "eval_phase",
    "eval_symbol",
    "evolve",
    "stationary_set",
    "step",
]
