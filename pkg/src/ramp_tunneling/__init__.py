"""
Ramp Tunneling - Bohmian estimators and wave-packet simulations of tunneling
through truncated linear-ramp barriers.
"""

__version__ = "0.1.0"
__author__ = "RampTunneling Team"

from .contracts import (
    GaussianPacket,
    RampSpec,
    SweepConfig,
    TransmissionResult,
    TruncatedRampSpec,
)
from .dynamics.tdse import WavePacketRun, run_to_asymptote
from .sweep.runner import run_sweep

__all__ = [
    "GaussianPacket",
    "RampSpec",
    "SweepConfig",
    "TransmissionResult",
    "TruncatedRampSpec",
    "WavePacketRun",
    "run_sweep",
    "run_to_asymptote",
]
