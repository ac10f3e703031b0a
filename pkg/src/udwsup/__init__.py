"""Unruh-DeWitt detector response on a quantum-controlled superposition of
trajectories: correlator kernels, adaptive oscillatory quadrature, transition
probabilities and transition rates for thermal Minkowski, de Sitter and
parallel-accelerated scenarios, plus the figure-data CLI.
"""

from ._backend import backend_name
from .correlators import (
    DE_SITTER_COMOVING,
    PARALLEL_ACCELERATED,
    THERMAL_MINKOWSKI,
    CorrelatorKernel,
    Scenario,
)
from .quadrature import EpsilonSchedule, IntegralEstimate, QuadratureSpec
from .switching import SwitchingProfile

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "backend_name",
    "THERMAL_MINKOWSKI",
    "DE_SITTER_COMOVING",
    "PARALLEL_ACCELERATED",
    "Scenario",
    "CorrelatorKernel",
    "SwitchingProfile",
    "QuadratureSpec",
    "EpsilonSchedule",
    "IntegralEstimate",
]
