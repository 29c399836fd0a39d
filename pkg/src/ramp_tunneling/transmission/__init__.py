"""
Transmission estimators, sensitivity cutoffs and initial-condition sampling.
"""

from .estimators import (
    cutoff_from_sensitivity,
    deviation_sigma,
    erfc_transmission,
    gamma_ratio,
    jacobian_check,
    monte_carlo_transmission,
    sensitivity_multiplier,
)
from .sampling import percentile_positions, sample_initial_positions

__all__ = [
    "cutoff_from_sensitivity",
    "deviation_sigma",
    "erfc_transmission",
    "gamma_ratio",
    "jacobian_check",
    "monte_carlo_transmission",
    "percentile_positions",
    "sample_initial_positions",
    "sensitivity_multiplier",
]
