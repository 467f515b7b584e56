"""Numerical laboratory for multi-frequency angular synchronization."""

__version__ = "0.1.0"

from synclab.errors import (
    BudgetError,
    ConditioningError,
    ConvergenceError,
    DegenerateEstimatorError,
    DomainError,
    InvalidParameterError,
)
from synclab.model import (
    JointObservation,
    ModelParams,
    MultiFreqObservation,
    PhaseSignal,
    attach_external,
    lift_frequency,
    sample_gue,
    sample_null,
    sample_phases,
    sample_planted,
)

__all__ = [
    "__version__",
    "BudgetError",
    "ConditioningError",
    "ConvergenceError",
    "DegenerateEstimatorError",
    "DomainError",
    "InvalidParameterError",
    "JointObservation",
    "ModelParams",
    "MultiFreqObservation",
    "PhaseSignal",
    "attach_external",
    "lift_frequency",
    "sample_gue",
    "sample_null",
    "sample_phases",
    "sample_planted",
]
