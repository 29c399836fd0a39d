"""
Contracts for the ramp tunneling toolkit.

Physical quantities are plain floats in the units of the packet (hbar = m = 1
by default). Array-valued states carry numpy arrays.
"""

import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class GaussianPacket(BaseModel):
    model_config = ConfigDict(frozen=True)

    x0: float = Field(0.0, description="Centroid position at t = 0")
    p0: float = Field(0.0, ge=0.0, description="Centroid momentum (forward only)")
    sigma0: float = Field(..., gt=0.0, description="Initial width")
    mass: float = Field(1.0, gt=0.0, description="Particle mass")
    hbar: float = Field(1.0, gt=0.0, description="Reduced Planck constant")

    @property
    def v0(self) -> float:
        return self.p0 / self.mass

    @property
    def v_s(self) -> float:
        """Spreading velocity hbar / (2 m sigma0)."""
        return self.hbar / (2.0 * self.mass * self.sigma0)

    @property
    def p_s(self) -> float:
        return self.mass * self.v_s

    @property
    def alpha_s(self) -> float:
        """Boost acceleration v_s^2 / sigma0."""
        return self.v_s ** 2 / self.sigma0

    def with_velocity(self, v0: float) -> "GaussianPacket":
        return self.model_copy(update={"p0": self.mass * v0})


class RampSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0.0, description="Ramp slope (acceleration)")

    def potential(self, x, mass: float = 1.0):
        return mass * self.alpha * np.asarray(x, dtype=float)


class TruncatedRampSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float = Field(..., gt=0.0, description="Ramp slope (acceleration)")
    x_minus: float = Field(..., description="Left truncation")
    x_cutoff: float = Field(..., description="Right truncation")
    V0: float = Field(..., description="Plateau value on both sides")
    mass: float = Field(1.0, gt=0.0, description="Particle mass")

    @model_validator(mode="after")
    def _check_order(self) -> "TruncatedRampSpec":
        if not self.x_minus < self.x_cutoff:
            raise ValueError(
                f"x_minus ({self.x_minus}) must lie below x_cutoff ({self.x_cutoff})"
            )
        return self

    @property
    def ramp(self) -> RampSpec:
        return RampSpec(alpha=self.alpha)

    @property
    def step_height(self) -> float:
        """Size of the downward step at x_cutoff."""
        return self.mass * self.alpha * self.x_cutoff - self.V0

    def potential(self, x):
        x = np.asarray(x, dtype=float)
        ramp = self.mass * self.alpha * x
        inside = (x >= self.x_minus) & (x <= self.x_cutoff)
        return np.where(inside, ramp, self.V0)


class TurningKind(str, Enum):
    TRUE_TURNING = "true_turning"
    IMMEDIATE_BACKWARD = "immediate_backward"


class TrajectoryInitial(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_init: float = Field(..., description="Trajectory position at t = 0")
    delta0: float = Field(..., description="Offset from the packet centroid, x_init - x0")

    @classmethod
    def at(cls, packet: GaussianPacket, x_init: float) -> "TrajectoryInitial":
        return cls(x_init=x_init, delta0=x_init - packet.x0)

    @classmethod
    def offset(cls, packet: GaussianPacket, delta0: float) -> "TrajectoryInitial":
        return cls(x_init=packet.x0 + delta0, delta0=delta0)


class TurningEvent(BaseModel):
    t_tp: float = Field(..., ge=0.0, description="Turning time")
    x_tp: float = Field(..., description="Turning position")
    kind: TurningKind = Field(..., description="True turning point or immediate backward motion")


class OnsetRegime(str, Enum):
    RESTING = "resting"
    SLOW_BOOST = "slow_boost"
    FAST_BOOST = "fast_boost"
    NUMERIC = "numeric"


class OnsetEstimate(BaseModel):
    x0_min: float = Field(..., description="Smallest initial position leading to transmission")
    regime: OnsetRegime = Field(..., description="Estimator used")

    @field_validator("x0_min")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("x0_min must be finite")
        return value


class EnergyBudget(BaseModel):
    total: float = Field(..., description="Mean energy")
    classical: float = Field(..., description="Translational (classical-like) part")
    spreading: float = Field(..., description="Spreading part hbar^2 / 8 m sigma0^2")


class SpatialGrid(BaseModel):
    model_config = ConfigDict(frozen=True)

    x_min: float = Field(..., description="Left edge (first sample)")
    x_max: float = Field(..., description="Right edge (periodic image of x_min)")
    n_points: int = Field(..., ge=1024, description="Number of samples")

    @model_validator(mode="after")
    def _check_span(self) -> "SpatialGrid":
        if not self.x_min < self.x_max:
            raise ValueError(f"x_min ({self.x_min}) must lie below x_max ({self.x_max})")
        return self

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def x(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def k(self) -> np.ndarray:
        """Angular wavenumbers in FFT order."""
        return 2.0 * np.pi * np.fft.fftfreq(self.n_points, d=self.dx)

    def contains(self, x: float) -> bool:
        return self.x_min <= x <= self.x_max


class PacketState(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: SpatialGrid = Field(..., description="Sampling grid")
    amplitudes: np.ndarray = Field(..., description="Complex samples of the wavefunction")
    t: float = Field(0.0, ge=0.0, description="Time of the snapshot")
    mass: float = Field(1.0, gt=0.0)
    hbar: float = Field(1.0, gt=0.0)

    @field_validator("amplitudes")
    @classmethod
    def _complex_vector(cls, value: np.ndarray) -> np.ndarray:
        value = np.asarray(value, dtype=np.complex128)
        if value.ndim != 1:
            raise ValueError("amplitudes must be one-dimensional")
        if not np.all(np.isfinite(value)):
            raise ValueError("amplitudes must be finite")
        return value

    @model_validator(mode="after")
    def _check_length(self) -> "PacketState":
        if self.amplitudes.shape[0] != self.grid.n_points:
            raise ValueError(
                f"{self.amplitudes.shape[0]} amplitudes for a grid of {self.grid.n_points} points"
            )
        return self

    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.sum(self.density()) * self.grid.dx)


class TransmissionTrace(BaseModel):
    times: List[float] = Field(default_factory=list, description="Sample times")
    T_of_t: List[float] = Field(default_factory=list, description="Restricted probability samples")
    T_inf: Optional[float] = Field(None, description="Plateau value")
    converged: bool = Field(False, description="Plateau criterion met")
    t_final: float = Field(0.0, description="Time at which propagation stopped")

    @model_validator(mode="after")
    def _check_values(self) -> "TransmissionTrace":
        if len(self.times) != len(self.T_of_t):
            raise ValueError("times and T_of_t must have the same length")
        if any(value < 0.0 or value > 1.0 for value in self.T_of_t):
            raise ValueError("restricted probabilities must lie in [0, 1]")
        if self.T_inf is not None and not self.converged:
            raise ValueError("T_inf is only defined for a converged trace")
        return self


class VelocityField(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    grid: SpatialGrid
    v: np.ndarray = Field(..., description="Velocity samples, NaN where masked")
    t: float = 0.0

    def at(self, x) -> np.ndarray:
        """Linear interpolation in x; NaN outside the grid or next to a masked node."""
        return np.interp(x, self.grid.x, self.v, left=np.nan, right=np.nan)

    @property
    def mask(self) -> np.ndarray:
        return np.isnan(self.v)


class TrajectoryFate(str, Enum):
    TRANSMITTED = "transmitted"
    REFLECTED = "reflected"
    UNDECIDED = "undecided"


class NumericTrajectory(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    x_init: float
    times: np.ndarray
    positions: np.ndarray
    fate: TrajectoryFate = TrajectoryFate.UNDECIDED
    lost: bool = False

    @property
    def samples(self) -> List[Tuple[float, float]]:
        return list(zip(self.times.tolist(), self.positions.tolist()))

    @property
    def final_position(self) -> float:
        return float(self.positions[-1])


class EnsembleResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    trajectories: List[NumericTrajectory] = Field(default_factory=list)
    transmitted_fraction: float = Field(..., ge=0.0, le=1.0)
    lost_count: int = Field(0, ge=0)
    crossings: int = Field(0, ge=0, description="Stored samples where ordering was violated")
    trace: TransmissionTrace

    @property
    def fates(self) -> List[TrajectoryFate]:
        return [trajectory.fate for trajectory in self.trajectories]

    @property
    def x_inits(self) -> List[float]:
        return [trajectory.x_init for trajectory in self.trajectories]


class BoundaryResult(BaseModel):
    x0_min_corrected: float = Field(..., description="Midpoint of the final bracket")
    bracket_width: float = Field(..., ge=0.0)
    bracket_low: float = Field(..., description="Largest reflected initial position")
    bracket_high: float = Field(..., description="Smallest transmitted initial position")
    n_runs: int = Field(..., ge=1, description="Propagations used")


class SensitivityCutoff(BaseModel):
    n: float = Field(..., gt=0.0, description="Sensitivity exponent")
    N: float = Field(..., description="Cutoff distance in units of sigma0")
    x_cutoff: float = Field(..., description="Cutoff position x0 + N sigma0")


class TransmissionMethod(str, Enum):
    ERFC_ESTIMATE = "erfc_estimate"
    MONTE_CARLO = "monte_carlo"
    WAVE_PACKET = "wave_packet"
    CORRECTED = "corrected"


class TransmissionResult(BaseModel):
    value: float = Field(..., ge=0.0, le=1.0, description="Transmission probability")
    method: TransmissionMethod
    x0_min_used: Optional[float] = Field(None, description="Onset of transmission used")
    n_samples: Optional[int] = Field(None, description="Monte-Carlo sample count")
    grid_points: Optional[int] = Field(None, description="Grid resolution of a wave-packet run")


class ShellContribution(BaseModel):
    n: int = Field(..., ge=1, description="Upper sensitivity of the shell")
    lower: float
    upper: float
    value: float = Field(..., ge=0.0)


# --------------------------------------------------------------------------
# Sweep configuration
# --------------------------------------------------------------------------


def _expand_axis(value: Any) -> Any:
    if isinstance(value, dict):
        start = float(value["start"])
        stop = float(value["stop"])
        step = float(value["step"])
        if step <= 0:
            raise ValueError("axis step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]
    if isinstance(value, (int, float)):
        return [float(value)]
    return value


class PacketDefaults(BaseModel):
    x0: float = 0.0
    p0: float = Field(0.0, ge=0.0)
    mass: float = Field(1.0, gt=0.0)
    hbar: float = Field(1.0, gt=0.0)


class NumericControls(BaseModel):
    grid_points: int = Field(16384, ge=1024)
    dt: float = Field(1.0e-4, gt=0.0)
    t_max: float = Field(4.0, gt=0.0)
    sample_interval: float = Field(0.01, gt=0.0)
    plateau_window: float = Field(0.5, gt=0.0)
    plateau_tolerance: float = Field(1.0e-4, gt=0.0)
    boundary_threshold: float = Field(1.0e-6, gt=0.0)
    norm_tolerance: float = Field(1.0e-6, gt=0.0)
    rho_floor: float = Field(1.0e-12, gt=0.0)
    tol: float = Field(1.0e-3, gt=0.0)
    scan_points: int = Field(64, ge=2)
    refine_points: int = Field(15, ge=1)
    trajectories: int = Field(51, ge=2)
    mc_samples: int = Field(100000, ge=1)
    seed: int = Field(20100614, ge=0, lt=2 ** 64)
    jobs: int = Field(1, ge=1)
    fft_workers: int = Field(1, ge=1)


class SweepConfig(BaseModel):
    packet: PacketDefaults = Field(default_factory=PacketDefaults)
    sigma0: List[float] = Field(..., description="sigma0 axis")
    alpha: List[float] = Field(..., description="Ramp slope axis")
    n: List[float] = Field(..., description="Sensitivity axis")
    v0: List[float] = Field(default_factory=list, description="Translational velocity axis")
    methods: List[TransmissionMethod] = Field(
        default_factory=lambda: [TransmissionMethod.ERFC_ESTIMATE]
    )
    numerics: NumericControls = Field(default_factory=NumericControls)
    output_dir: str = "output/ramp_tunneling"

    @field_validator("sigma0", "alpha", "n", "v0", mode="before")
    @classmethod
    def _expand(cls, value: Any) -> Any:
        return _expand_axis(value)

    @field_validator("sigma0", "alpha", "n")
    @classmethod
    def _positive_axis(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("sweep axes must not be empty")
        if any(item <= 0 for item in value):
            raise ValueError("sigma0, alpha and n must be positive")
        return value

    @field_validator("v0")
    @classmethod
    def _forward_velocities(cls, value: List[float]) -> List[float]:
        if any(item < 0 for item in value):
            raise ValueError("v0 must be non-negative")
        return value

    @field_validator("methods")
    @classmethod
    def _methods_present(cls, value: List[TransmissionMethod]) -> List[TransmissionMethod]:
        if not value:
            raise ValueError("at least one method is required")
        return value

    @model_validator(mode="after")
    def _default_velocity_axis(self) -> "SweepConfig":
        if not self.v0:
            self.v0 = [self.packet.p0 / self.packet.mass]
        return self

    @classmethod
    def from_config(cls, config: Dict[str, Any]) -> "SweepConfig":
        sweep = dict(config.get("sweep", {}))
        return cls(
            packet=config.get("packet", {}),
            sigma0=sweep.get("sigma0", []),
            alpha=sweep.get("alpha", []),
            n=sweep.get("n", []),
            v0=sweep.get("v0", []),
            methods=sweep.get("methods", [TransmissionMethod.ERFC_ESTIMATE]),
            numerics=config.get("numerics", {}),
            output_dir=str(config.get("output", {}).get("dir", "output/ramp_tunneling")),
        )

    def packet_for(self, sigma0: float, v0: float = 0.0) -> GaussianPacket:
        return GaussianPacket(
            x0=self.packet.x0,
            p0=self.packet.mass * v0,
            sigma0=sigma0,
            mass=self.packet.mass,
            hbar=self.packet.hbar,
        )


class SweepRow(BaseModel):
    sigma0: float
    alpha: float
    n: float
    v0: float
    x_cutoff: float = math.nan
    delta0_c: float = math.nan
    regime: str = ""
    x0_min_est: float = math.nan
    x0_min_slow: Optional[float] = None
    x0_min_fast: Optional[float] = None
    x0_min_corr: Optional[float] = None
    T_est: Optional[float] = None
    T_mc: Optional[float] = None
    T_wp: Optional[float] = None
    T_corr: Optional[float] = None
    Sigma_pct: Optional[float] = None
    Sigma_corr_pct: Optional[float] = None
    error: str = ""
