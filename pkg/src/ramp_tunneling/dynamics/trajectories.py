"""
Bohmian trajectories guided by the numerically propagated wavefunction.
"""

import logging
from typing import List, Optional, Sequence

import numpy as np

from ..contracts import (
    BoundaryResult,
    EnsembleResult,
    NumericTrajectory,
    PacketState,
    SpatialGrid,
    TrajectoryFate,
    TransmissionTrace,
    VelocityField,
)
from ..exceptions import (
    BoundaryNotFoundError,
    DomainError,
    NoTransmissionError,
    TrajectoryLostError,
)
from ..transmission.sampling import percentile_positions
from .tdse import WavePacketRun

logger = logging.getLogger(__name__)

LOST_FRACTION_LIMIT = 1e-3


def velocity_samples(
    grid: SpatialGrid,
    amplitudes: np.ndarray,
    mass: float = 1.0,
    hbar: float = 1.0,
    rho_floor: float = 1e-12,
) -> np.ndarray:
    """
    Velocity (hbar/m) dS/dx from the phase difference of neighbouring samples.

    The centered difference angle(psi[i+1] conj(psi[i-1])) / 2dx is exact for
    plane waves and quadratic phases; edges use one-sided differences. Nodes
    with density at or below rho_floor times the peak are NaN.
    """
    dx = grid.dx
    velocity = np.empty(amplitudes.shape[0])
    velocity[1:-1] = np.angle(amplitudes[2:] * np.conj(amplitudes[:-2])) / (2.0 * dx)
    velocity[0] = np.angle(amplitudes[1] * np.conj(amplitudes[0])) / dx
    velocity[-1] = np.angle(amplitudes[-1] * np.conj(amplitudes[-2])) / dx
    velocity *= hbar / mass

    density = np.abs(amplitudes) ** 2
    velocity[density <= rho_floor * density.max()] = np.nan
    return velocity


def velocity_from_state(state: PacketState, rho_floor: float = 1e-12) -> VelocityField:
    """
    Velocity field of a packet state.

    Args:
        state: Packet state
        rho_floor: Masking threshold relative to the peak density

    Returns:
        VelocityField, NaN where the density is below the floor
    """
    v = velocity_samples(state.grid, state.amplitudes, state.mass, state.hbar, rho_floor)
    return VelocityField(grid=state.grid, v=v, t=state.t)


class TrajectoryTracker:
    """
    Step observer integrating trajectories alongside the wavefunction.

    Each step is a classical fourth-order Runge-Kutta step; the field at the
    half step is the mean of the fields at both ends and positions are
    interpolated linearly in x.
    """

    def __init__(self, x_inits: Sequence[float], record_interval: Optional[float] = None):
        self.x_inits = np.asarray(x_inits, dtype=float)
        if self.x_inits.ndim != 1 or self.x_inits.size == 0:
            raise DomainError("at least one initial position is required")
        self.record_interval = record_interval
        self.fates: List[TrajectoryFate] = []

    def start(self, run: WavePacketRun, amplitudes: np.ndarray) -> None:
        self._grid = run.grid
        self._mass = run.packet.mass
        self._hbar = run.packet.hbar
        self._rho_floor = run.numerics.rho_floor
        interval = self.record_interval or run.numerics.sample_interval
        self._record_every = max(1, int(round(interval / run.numerics.dt)))
        self._steps = 0

        self.positions = self.x_inits.copy()
        self.lost = np.zeros(self.x_inits.size, dtype=bool)
        self._field = self._velocity(amplitudes)
        self._times = [0.0]
        self._history = [self.positions.copy()]
        self._check_lost(self.positions, 0.0)

    def _velocity(self, amplitudes: np.ndarray) -> np.ndarray:
        return velocity_samples(self._grid, amplitudes, self._mass, self._hbar, self._rho_floor)

    def _sample(self, x: np.ndarray, field: np.ndarray) -> np.ndarray:
        return np.interp(x, self._grid.x, field, left=np.nan, right=np.nan)

    def _check_lost(self, x: np.ndarray, t: float) -> None:
        newly_lost = ~np.isfinite(x) & ~self.lost
        if np.any(newly_lost):
            for index in np.flatnonzero(newly_lost):
                logger.warning(f"Trajectory from x={self.x_inits[index]:.6f} lost at t={t:.4f}")
            self.lost |= newly_lost

    def advance(self, t_prev: float, t_next: float, previous: np.ndarray, current: np.ndarray) -> None:
        h = t_next - t_prev
        field_next = self._velocity(current)
        field_mid = 0.5 * (self._field + field_next)

        x = np.where(self.lost, np.nan, self.positions)
        k1 = self._sample(x, self._field)
        k2 = self._sample(x + 0.5 * h * k1, field_mid)
        k3 = self._sample(x + 0.5 * h * k2, field_mid)
        k4 = self._sample(x + h * k3, field_next)
        stepped = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        self._check_lost(stepped, t_next)
        self.positions = np.where(self.lost, self.positions, stepped)
        self._field = field_next

        self._steps += 1
        if self._steps % self._record_every == 0:
            self._record(t_next)

    def _record(self, t: float) -> None:
        self._times.append(t)
        self._history.append(np.where(self.lost, np.nan, self.positions))

    def finish(self, run: WavePacketRun, trace: TransmissionTrace) -> None:
        if self._times[-1] < trace.t_final:
            self._record(trace.t_final)
        x_cutoff = run.x_cutoff
        self.fates = []
        for index, x in enumerate(self.positions):
            if self.lost[index] or x_cutoff is None:
                self.fates.append(TrajectoryFate.UNDECIDED)
            elif x > x_cutoff:
                self.fates.append(TrajectoryFate.TRANSMITTED)
            else:
                self.fates.append(TrajectoryFate.REFLECTED)

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self._times)

    @property
    def history(self) -> np.ndarray:
        """Recorded positions, shape (n_times, n_trajectories); NaN once lost."""
        return np.vstack(self._history)

    def crossings(self) -> int:
        """Recorded samples at which the initial ordering is broken."""
        order = np.argsort(self.x_inits, kind="stable")
        ordered = self.history[:, order]
        steps = np.diff(ordered, axis=1)
        return int(np.count_nonzero(np.any(steps <= 0, axis=1)))

    def trajectories(self) -> List[NumericTrajectory]:
        times = self.times
        history = self.history
        return [
            NumericTrajectory(
                x_init=float(x_init),
                times=times,
                positions=history[:, index],
                fate=self.fates[index] if self.fates else TrajectoryFate.UNDECIDED,
                lost=bool(self.lost[index]),
            )
            for index, x_init in enumerate(self.x_inits)
        ]


def integrate_trajectory(
    x_init: float, runner: WavePacketRun, t_end: Optional[float] = None
) -> NumericTrajectory:
    """
    Integrate one trajectory synchronously with the wavefunction.

    Args:
        x_init: Initial position
        runner: Propagation context
        t_end: Fixed end time; None runs to the plateau

    Returns:
        NumericTrajectory with its fate
    """
    tracker = TrajectoryTracker([x_init])
    runner.run([tracker], t_end=t_end)
    trajectory = tracker.trajectories()[0]
    if trajectory.lost:
        raise TrajectoryLostError(f"trajectory from x={x_init} entered a masked region or left the grid")
    return trajectory


def ensemble_run(
    inits: Sequence[float], runner: WavePacketRun, t_end: Optional[float] = None
) -> EnsembleResult:
    """
    Integrate many trajectories in one propagation.

    Args:
        inits: Initial positions
        runner: Propagation context
        t_end: Fixed end time; None runs to the plateau

    Returns:
        EnsembleResult with fates and the transmitted fraction
    """
    tracker = TrajectoryTracker(inits)
    trace = runner.run([tracker], t_end=t_end)
    trajectories = tracker.trajectories()

    lost_count = int(np.count_nonzero(tracker.lost))
    if lost_count > LOST_FRACTION_LIMIT * len(trajectories):
        raise TrajectoryLostError(f"{lost_count} of {len(trajectories)} trajectories lost")

    crossings = tracker.crossings()
    if crossings:
        logger.warning(f"Trajectory ordering violated at {crossings} recorded samples")

    transmitted = sum(1 for item in trajectories if item.fate is TrajectoryFate.TRANSMITTED)
    fraction = transmitted / len(trajectories)
    logger.info(f"Ensemble of {len(trajectories)}: {transmitted} transmitted ({fraction:.4f})")
    return EnsembleResult(
        trajectories=trajectories,
        transmitted_fraction=fraction,
        lost_count=lost_count,
        crossings=crossings,
        trace=trace,
    )


def _first_transmitted(fates: Sequence[TrajectoryFate]) -> Optional[int]:
    for index, fate in enumerate(fates):
        if fate is TrajectoryFate.TRANSMITTED:
            if any(later is TrajectoryFate.REFLECTED for later in fates[index + 1:]):
                logger.warning("Fates are not monotone in the initial position")
            return index
    return None


def locate_boundary(
    runner: WavePacketRun,
    tol: Optional[float] = None,
    scan_points: Optional[int] = None,
    refine_points: Optional[int] = None,
) -> BoundaryResult:
    """
    Bracket the initial position of the boundary trajectory.

    A percentile scan of [x0 - sigma0, x_cutoff] finds the fate flip; each
    refinement pass places refine_points trajectories inside the current
    bracket (1 is plain bisection) until the bracket is no wider than tol.

    Args:
        runner: Propagation context on a truncated ramp
        tol: Final bracket width
        scan_points: Trajectories in the first scan
        refine_points: Trajectories per refinement pass

    Returns:
        BoundaryResult with the bracket midpoint as corrected onset
    """
    x_cutoff = runner.x_cutoff
    if x_cutoff is None:
        raise DomainError("locating the boundary trajectory needs a truncated ramp")
    numerics = runner.numerics
    tol = tol if tol is not None else numerics.tol
    scan_points = scan_points or numerics.scan_points
    refine_points = refine_points or numerics.refine_points
    packet = runner.packet

    inits = percentile_positions(packet, scan_points, lower=packet.x0 - packet.sigma0, upper=x_cutoff)
    fates = ensemble_run(inits, runner).fates
    n_runs = 1

    index = _first_transmitted(fates)
    if index is None:
        raise NoTransmissionError(f"no transmitted trajectory in [{inits[0]:.6f}, {x_cutoff:.6f}]")
    if index == 0:
        raise BoundaryNotFoundError(f"lowest scanned position {inits[0]:.6f} already transmits")
    low, high = float(inits[index - 1]), float(inits[index])
    logger.info(f"Boundary bracket after scan: [{low:.6f}, {high:.6f}]")

    while high - low > tol:
        inits = np.linspace(low, high, refine_points + 2)[1:-1]
        fates = ensemble_run(inits, runner).fates
        n_runs += 1
        index = _first_transmitted(fates)
        if index is None:
            low = float(inits[-1])
        else:
            high = float(inits[index])
            if index > 0:
                low = float(inits[index - 1])
        logger.info(f"Boundary bracket after pass {n_runs - 1}: [{low:.6f}, {high:.6f}]")

    return BoundaryResult(
        x0_min_corrected=0.5 * (low + high),
        bracket_width=high - low,
        bracket_low=low,
        bracket_high=high,
        n_runs=n_runs,
    )
