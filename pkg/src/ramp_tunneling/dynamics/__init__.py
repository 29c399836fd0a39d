"""
Grid propagation of the packet and trajectories guided by the numeric wavefunction.
"""

from .tdse import (
    SplitStepPropagator,
    WavePacketRun,
    build_potential,
    default_grid,
    default_truncated_ramp,
    propagate,
    restricted_probability,
    run_to_asymptote,
)
from .trajectories import (
    TrajectoryTracker,
    ensemble_run,
    integrate_trajectory,
    locate_boundary,
    velocity_from_state,
)

__all__ = [
    "SplitStepPropagator",
    "TrajectoryTracker",
    "WavePacketRun",
    "build_potential",
    "default_grid",
    "default_truncated_ramp",
    "ensemble_run",
    "integrate_trajectory",
    "locate_boundary",
    "propagate",
    "restricted_probability",
    "run_to_asymptote",
    "velocity_from_state",
]
