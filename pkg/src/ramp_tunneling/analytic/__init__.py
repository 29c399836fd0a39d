"""
Closed-form solution of a Gaussian packet on a linear ramp and its Bohmian trajectories.
"""

from .bohmian import (
    bohm_velocity,
    critical_delta,
    onset_fast_boost,
    onset_numeric,
    onset_resting,
    onset_slow_boost,
    recommend_onset_regime,
    separation_ratio,
    trajectory,
    turning_point_v0zero,
    turning_time_general,
    turning_time_v0zero,
)
from .ramp import classical_path, mean_energy, psi, rho, sigma_t, spreading_rate

__all__ = [
    "bohm_velocity",
    "classical_path",
    "critical_delta",
    "mean_energy",
    "onset_fast_boost",
    "onset_numeric",
    "onset_resting",
    "onset_slow_boost",
    "psi",
    "recommend_onset_regime",
    "rho",
    "separation_ratio",
    "sigma_t",
    "spreading_rate",
    "trajectory",
    "turning_point_v0zero",
    "turning_time_general",
    "turning_time_v0zero",
]
