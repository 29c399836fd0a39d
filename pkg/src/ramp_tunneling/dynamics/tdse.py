"""
Split-step spectral propagation of a packet on a truncated or untruncated ramp.

The symmetric splitting half-potential / kinetic / half-potential is exact up
to a global phase for a linear potential, so the untruncated ramp reproduces
the closed-form packet to round-off while the grid holds it.
"""

import logging
import math
from typing import Iterable, List, Optional, Protocol, Union

import numpy as np
from scipy import fft as sp_fft

from ..analytic.ramp import classical_path, psi, sigma_t
from ..contracts import (
    GaussianPacket,
    NumericControls,
    PacketState,
    RampSpec,
    SpatialGrid,
    TransmissionTrace,
    TruncatedRampSpec,
)
from ..exceptions import (
    DomainError,
    GridConfigurationError,
    NonConvergenceError,
    PropagationDivergenceError,
)
from ..transmission.estimators import sensitivity_multiplier

logger = logging.getLogger(__name__)

Potential = Union[TruncatedRampSpec, RampSpec, None]


def default_truncated_ramp(packet: GaussianPacket, alpha: float, n: float) -> TruncatedRampSpec:
    """
    Ramp cut at x0 + N sigma0 on the right and at x0 - 3 N sigma0 on the left.

    Args:
        packet: Initial Gaussian packet
        alpha: Ramp slope
        n: Sensitivity parameter defining N = sqrt(2 n ln 10)

    Returns:
        TruncatedRampSpec continuous at x_minus
    """
    multiplier = sensitivity_multiplier(n)
    x_minus = packet.x0 - 3.0 * multiplier * packet.sigma0
    return TruncatedRampSpec(
        alpha=alpha,
        x_minus=x_minus,
        x_cutoff=packet.x0 + multiplier * packet.sigma0,
        V0=packet.mass * alpha * x_minus,
        mass=packet.mass,
    )


def _slope(potential: Potential) -> float:
    return 0.0 if potential is None else float(potential.alpha)


def _aligned_spacing(length: float, n: int, potential: Potential) -> float:
    # a whole number of cells between x_minus and x_cutoff
    dx = length / n
    if isinstance(potential, TruncatedRampSpec):
        span = potential.x_cutoff - potential.x_minus
        dx = span / max(1, math.floor(span / dx))
    return dx


def default_grid(
    packet: GaussianPacket,
    potential: Potential,
    t_final: float,
    n_points: int = 2 ** 14,
) -> SpatialGrid:
    """
    Grid wide enough that nothing reaches the periodic edges before t_final.

    The left edge follows the free fall of the centroid and the right edge the
    fastest forward component, both padded by 40 sigma0 + 6 sigma_T. The point
    count is doubled until the largest expected momentum advances the phase by
    at most 2 pi / 3 across the two-cell stencil of the velocity field.

    For a truncated ramp the spacing and the left edge are adjusted so that
    x_minus and x_cutoff both sit on cell midpoints, so the sampled step lies
    exactly at the truncation.

    Args:
        packet: Initial Gaussian packet
        potential: Truncated ramp, untruncated ramp, or None for a free packet
        t_final: Time the grid has to last
        n_points: Starting point count

    Returns:
        SpatialGrid
    """
    alpha = _slope(potential)
    margin = 40.0 * packet.sigma0 + 6.0 * float(sigma_t(packet, t_final))
    v_max = packet.v0 + 6.0 * packet.v_s
    if isinstance(potential, TruncatedRampSpec) and potential.step_height > 0:
        v_max += math.sqrt(2.0 * potential.step_height / packet.mass)

    x_min = packet.x0 - packet.v0 * t_final - 0.5 * alpha * t_final ** 2 - margin
    x_max = packet.x0 + v_max * t_final + margin
    p_max = packet.mass * (v_max + alpha * t_final)

    n = int(n_points)
    dx = _aligned_spacing(x_max - x_min, n, potential)
    while math.pi / dx < 3.0 * p_max / packet.hbar:
        n *= 2
        dx = _aligned_spacing(x_max - x_min, n, potential)
    if n != n_points:
        logger.warning(f"Grid refined from {n_points} to {n} points to resolve momenta up to {p_max:.3g}")

    if isinstance(potential, TruncatedRampSpec):
        cells = math.ceil((potential.x_cutoff - x_min) / dx - 0.5)
        x_min = potential.x_cutoff - (cells + 0.5) * dx
    return SpatialGrid(x_min=x_min, x_max=x_min + n * dx, n_points=n)


def build_potential(spec: Potential, grid: SpatialGrid, mass: float = 1.0) -> np.ndarray:
    """
    Sample the potential on the grid without smoothing.

    Args:
        spec: Truncated ramp, untruncated ramp, or None
        grid: Spatial grid
        mass: Particle mass (untruncated ramp only)

    Returns:
        Potential values at the grid points
    """
    x = grid.x
    if spec is None:
        return np.zeros_like(x)
    if isinstance(spec, RampSpec):
        return spec.potential(x, mass)
    for name in ("x_minus", "x_cutoff"):
        value = getattr(spec, name)
        if not grid.contains(value):
            raise GridConfigurationError(
                f"{name}={value} outside the grid [{grid.x_min}, {grid.x_max}]"
            )
    return spec.potential(x)


class SplitStepPropagator:
    """Strang-split propagator on a periodic grid."""

    def __init__(
        self,
        grid: SpatialGrid,
        potential: np.ndarray,
        dt: float,
        mass: float = 1.0,
        hbar: float = 1.0,
        workers: int = 1,
    ):
        if dt <= 0:
            raise DomainError(f"time step must be positive, got {dt}")
        self.grid = grid
        self.dt = dt
        self.mass = mass
        self.hbar = hbar
        self.workers = workers
        potential = np.asarray(potential, dtype=float)
        self._half_potential = np.exp(-0.5j * dt * potential / hbar)
        self._kinetic = np.exp(-0.5j * dt * hbar * grid.k ** 2 / mass)

    def step(self, amplitudes: np.ndarray) -> np.ndarray:
        """Advance one time step."""
        phi = sp_fft.fft(amplitudes * self._half_potential, workers=self.workers)
        phi *= self._kinetic
        return sp_fft.ifft(phi, workers=self.workers) * self._half_potential

    def advance(self, amplitudes: np.ndarray, n_steps: int) -> np.ndarray:
        for _ in range(n_steps):
            amplitudes = self.step(amplitudes)
        return amplitudes


def initial_state(packet: GaussianPacket, grid: SpatialGrid) -> PacketState:
    """Sampled initial Gaussian, rescaled to unit discrete norm."""
    amplitudes = psi(packet, None, grid.x, 0.0)
    norm = np.sum(np.abs(amplitudes) ** 2) * grid.dx
    return PacketState(
        grid=grid,
        amplitudes=amplitudes / np.sqrt(norm),
        t=0.0,
        mass=packet.mass,
        hbar=packet.hbar,
    )


def analytic_state(packet: GaussianPacket, ramp: Optional[RampSpec], grid: SpatialGrid, t: float) -> PacketState:
    return PacketState(
        grid=grid,
        amplitudes=psi(packet, ramp, grid.x, t),
        t=t,
        mass=packet.mass,
        hbar=packet.hbar,
    )


def propagate(
    state: PacketState,
    potential: np.ndarray,
    dt: float,
    n_steps: int,
    workers: int = 1,
    norm_tolerance: float = 1e-6,
) -> PacketState:
    """
    Evolve a state under p^2/2m + V.

    Args:
        state: Starting state
        potential: Potential samples on the state's grid
        dt: Time step
        n_steps: Number of steps
        workers: FFT worker threads
        norm_tolerance: Largest accepted norm drift

    Returns:
        State at t + n_steps * dt
    """
    propagator = SplitStepPropagator(state.grid, potential, dt, state.mass, state.hbar, workers)
    amplitudes = propagator.advance(state.amplitudes, n_steps)
    result = PacketState(
        grid=state.grid,
        amplitudes=amplitudes,
        t=state.t + n_steps * dt,
        mass=state.mass,
        hbar=state.hbar,
    )
    drift = abs(result.norm() - state.norm())
    if drift > norm_tolerance:
        raise PropagationDivergenceError(f"norm drifted by {drift:.3e} over {n_steps} steps")
    return result


def _cutoff_weights(grid: SpatialGrid, x_cutoff: float) -> np.ndarray:
    # cell i spans [x_i - dx/2, x_i + dx/2]
    return np.clip((grid.x + 0.5 * grid.dx - x_cutoff) / grid.dx, 0.0, 1.0)


def restricted_probability(state: PacketState, x_cutoff: float) -> float:
    """
    Probability beyond x_cutoff, weighting the straddling cell linearly.

    Args:
        state: Packet state
        x_cutoff: Cutoff position inside the grid

    Returns:
        Probability in [0, 1]
    """
    grid = state.grid
    if not grid.contains(x_cutoff):
        raise GridConfigurationError(f"x_cutoff={x_cutoff} outside the grid [{grid.x_min}, {grid.x_max}]")
    value = float(np.sum(_cutoff_weights(grid, x_cutoff) * state.density()) * grid.dx)
    return min(max(value, 0.0), 1.0)


def expectation_position(state: PacketState) -> float:
    density = state.density()
    return float(np.sum(state.grid.x * density) / np.sum(density))


def energy_expectation(state: PacketState, potential: np.ndarray) -> float:
    """Mean energy <p^2/2m + V> with the kinetic part evaluated spectrally."""
    density = state.density()
    spectrum = np.abs(sp_fft.fft(state.amplitudes)) ** 2
    kinetic = np.sum(spectrum * (state.hbar * state.grid.k) ** 2 / (2.0 * state.mass)) / np.sum(spectrum)
    return float(kinetic + np.sum(np.asarray(potential) * density) / np.sum(density))


def edge_probability(state: PacketState) -> float:
    """Probability inside the outermost cells on both sides of the grid."""
    width = max(16, state.grid.n_points // 64)
    density = state.density()
    return float((np.sum(density[:width]) + np.sum(density[-width:])) * state.grid.dx)


class StepObserver(Protocol):
    def start(self, run: "WavePacketRun", amplitudes: np.ndarray) -> None:
        ...

    def advance(self, t_prev: float, t_next: float, previous: np.ndarray, current: np.ndarray) -> None:
        ...

    def finish(self, run: "WavePacketRun", trace: TransmissionTrace) -> None:
        ...


class WavePacketRun:
    """
    Coupled propagation context: packet, potential, grid and numeric controls.

    ``run`` always starts again from the initial packet, so one context can
    drive several trajectory ensembles.
    """

    def __init__(
        self,
        packet: GaussianPacket,
        potential: Potential,
        numerics: Optional[NumericControls] = None,
        grid: Optional[SpatialGrid] = None,
        t_final: Optional[float] = None,
    ):
        self.packet = packet
        self.potential = potential
        self.numerics = numerics or NumericControls()
        horizon = t_final if t_final is not None else self.numerics.t_max
        self.grid = grid or default_grid(packet, potential, horizon, self.numerics.grid_points)
        self.potential_values = build_potential(potential, self.grid, packet.mass)
        self.propagator = SplitStepPropagator(
            self.grid,
            self.potential_values,
            self.numerics.dt,
            packet.mass,
            packet.hbar,
            self.numerics.fft_workers,
        )
        self.final_state: Optional[PacketState] = None

    @property
    def x_cutoff(self) -> Optional[float]:
        if isinstance(self.potential, TruncatedRampSpec):
            return self.potential.x_cutoff
        return None

    @property
    def x_minus(self) -> Optional[float]:
        if isinstance(self.potential, TruncatedRampSpec):
            return self.potential.x_minus
        return None

    def initial_state(self) -> PacketState:
        return initial_state(self.packet, self.grid)

    def state_at(self, amplitudes: np.ndarray, t: float) -> PacketState:
        return PacketState(
            grid=self.grid,
            amplitudes=amplitudes,
            t=t,
            mass=self.packet.mass,
            hbar=self.packet.hbar,
        )

    def _past_left_truncation(self, t: float) -> bool:
        ramp = self.potential.ramp if isinstance(self.potential, TruncatedRampSpec) else None
        x_cl, _ = classical_path(self.packet, ramp, t)
        return float(x_cl) < self.x_minus

    def run(self, observers: Iterable[StepObserver] = (), t_end: Optional[float] = None) -> TransmissionTrace:
        """
        Propagate from t = 0 until the restricted probability plateaus, or until t_end.

        Args:
            observers: Objects notified at every step (trajectory trackers)
            t_end: Fixed end time; None runs to the plateau (truncated ramp only)

        Returns:
            TransmissionTrace of the run
        """
        observers = list(observers)
        numerics = self.numerics
        dt = numerics.dt
        x_cutoff = self.x_cutoff
        if t_end is None and x_cutoff is None:
            raise DomainError("a run without truncation needs an explicit t_end")
        if t_end is not None and t_end < 0:
            raise DomainError(f"t_end must be non-negative, got {t_end}")

        sample_every = max(1, int(round(numerics.sample_interval / dt)))
        window = max(1, int(round(numerics.plateau_window / (sample_every * dt))))
        max_steps = int(round((t_end if t_end is not None else numerics.t_max) / dt))

        state = self.initial_state()
        amplitudes = state.amplitudes
        reference_norm = state.norm()
        for observer in observers:
            observer.start(self, amplitudes)

        times: List[float] = []
        values: List[float] = []
        if x_cutoff is not None:
            times.append(0.0)
            values.append(restricted_probability(state, x_cutoff))

        logger.info(
            f"Propagating sigma0={self.packet.sigma0} on {self.grid.n_points} points, "
            f"dt={dt}, {'t_end=' + str(t_end) if t_end is not None else 'until plateau'}"
        )

        converged = False
        step = 0
        while step < max_steps:
            previous = amplitudes
            amplitudes = self.propagator.step(amplitudes)
            step += 1
            t_prev, t_next = (step - 1) * dt, step * dt
            for observer in observers:
                observer.advance(t_prev, t_next, previous, amplitudes)

            if step % sample_every and step != max_steps:
                continue

            state = self.state_at(amplitudes, t_next)
            drift = abs(state.norm() - reference_norm)
            if drift > numerics.norm_tolerance:
                raise PropagationDivergenceError(f"norm drifted by {drift:.3e} at t={t_next:.4f}")

            edge = edge_probability(state)
            if edge >= numerics.boundary_threshold:
                message = f"probability {edge:.3e} reached the grid edge at t={t_next:.4f}"
                if t_end is None:
                    raise NonConvergenceError(message)
                logger.warning(message)

            if x_cutoff is None:
                continue
            times.append(t_next)
            values.append(restricted_probability(state, x_cutoff))
            logger.debug(f"t={t_next:.4f} T={values[-1]:.8f}")

            if t_end is None and len(values) > window:
                settled = abs(values[-1] - values[-1 - window]) < numerics.plateau_tolerance
                if settled and self._past_left_truncation(t_next):
                    converged = True
                    break

        t_final = step * dt
        self.final_state = self.state_at(amplitudes, t_final)
        if t_end is None and not converged:
            raise NonConvergenceError(f"no plateau in the restricted probability before t_max={numerics.t_max}")

        trace = TransmissionTrace(
            times=times,
            T_of_t=values,
            T_inf=values[-1] if converged else None,
            converged=converged,
            t_final=t_final,
        )
        if converged:
            logger.info(f"Plateau reached at t={t_final:.3f}: T_inf={trace.T_inf:.6f}")
        for observer in observers:
            observer.finish(self, trace)
        return trace


def run_to_asymptote(
    packet: GaussianPacket,
    spec: TruncatedRampSpec,
    grid: Optional[SpatialGrid] = None,
    dt: Optional[float] = None,
    numerics: Optional[NumericControls] = None,
) -> TransmissionTrace:
    """
    Propagate on the truncated ramp until the transmitted probability settles.

    Args:
        packet: Initial Gaussian packet
        spec: Truncated ramp
        grid: Spatial grid (default sizing when omitted)
        dt: Time step overriding numerics.dt
        numerics: Numeric controls

    Returns:
        Converged TransmissionTrace
    """
    numerics = numerics or NumericControls()
    if dt is not None:
        numerics = numerics.model_copy(update={"dt": dt})
    return WavePacketRun(packet, spec, numerics=numerics, grid=grid).run()
