"""
Transmission estimators and comparison metrics.
"""

import logging
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.special import erf, erfc

from ..analytic.bohmian import trajectory_bundle
from ..analytic.ramp import rho
from ..contracts import (
    GaussianPacket,
    RampSpec,
    SensitivityCutoff,
    TransmissionMethod,
    TransmissionResult,
)
from ..exceptions import DomainError
from .sampling import SHARD_ALIGNMENT, sample_initial_positions

logger = logging.getLogger(__name__)

# Beyond this |argument| the erf difference is taken through erfc
_LARGE_ARGUMENT = 3.0


def sensitivity_multiplier(n: float) -> float:
    """N = sqrt(2 n ln 10), the cutoff distance in units of sigma0."""
    if n <= 0:
        raise DomainError(f"sensitivity parameter must be positive, got {n}")
    return math.sqrt(2.0 * n * math.log(10.0))


def cutoff_from_sensitivity(packet: GaussianPacket, n: float) -> SensitivityCutoff:
    """
    Cutoff where the initial density has dropped by a factor 10^-n.

    Args:
        packet: Initial Gaussian packet
        n: Sensitivity parameter (> 0, need not be an integer)

    Returns:
        SensitivityCutoff with x_cutoff = x0 + N sigma0
    """
    multiplier = sensitivity_multiplier(n)
    return SensitivityCutoff(n=n, N=multiplier, x_cutoff=packet.x0 + multiplier * packet.sigma0)


def gamma_ratio(packet: GaussianPacket, x):
    """Initial density relative to its peak, rho0(x) / rho0(x0)."""
    return np.exp(-((np.asarray(x, dtype=float) - packet.x0) ** 2) / (2.0 * packet.sigma0 ** 2))


def _half_erfc_difference(a: float, b: float) -> float:
    """(erfc(a) - erfc(b)) / 2 without cancellation in either tail."""
    if b == math.inf:
        return 0.5 * float(erfc(a))
    if min(a, b) > _LARGE_ARGUMENT:
        return 0.5 * float(erfc(a) - erfc(b))
    if max(a, b) < -_LARGE_ARGUMENT:
        return 0.5 * float(erfc(-b) - erfc(-a))
    return 0.5 * float(erf(b) - erf(a))


def erfc_transmission(
    packet: GaussianPacket,
    x0_min: float,
    x2_bound: float = math.inf,
) -> TransmissionResult:
    """
    Probability carried by initial positions in (x0_min, x2_bound).

    Args:
        packet: Initial Gaussian packet
        x0_min: Onset of transmission (finite)
        x2_bound: Upper edge of the transmitted set, infinite by default

    Returns:
        TransmissionResult with (1/2) erfc((x0_min - x0) / sqrt(2) sigma0) for an infinite bound
    """
    if not math.isfinite(x0_min):
        raise DomainError(f"x0_min must be finite, got {x0_min}")
    scale = math.sqrt(2.0) * packet.sigma0
    upper = x2_bound if math.isinf(x2_bound) else (x2_bound - packet.x0) / scale
    value = 0.0 if x2_bound <= x0_min else _half_erfc_difference((x0_min - packet.x0) / scale, upper)
    return TransmissionResult(
        value=min(max(value, 0.0), 1.0),
        method=TransmissionMethod.ERFC_ESTIMATE,
        x0_min_used=x0_min,
    )


def _count_shard(
    packet: GaussianPacket, lower: float, upper: float, size: int, seed: int, offset: int
) -> int:
    samples = sample_initial_positions(packet, size, seed, offset)
    return int(np.count_nonzero((samples > lower) & (samples < upper)))


def monte_carlo_transmission(
    packet: GaussianPacket,
    x0_min: float,
    x2_bound: float = math.inf,
    n_samples: int = 100000,
    seed: int = 0,
    jobs: int = 1,
    shard_size: int = 1 << 20,
) -> TransmissionResult:
    """
    Fraction of initial positions drawn from rho0 that fall in (x0_min, x2_bound).

    Samples come from a counter-based generator, so the count does not depend
    on how the draws are split into shards or on the number of jobs.

    Args:
        packet: Initial Gaussian packet
        x0_min: Lower edge of the transmitted set
        x2_bound: Upper edge, infinite by default
        n_samples: Number of initial positions
        seed: Generator key
        jobs: Worker processes for the shards
        shard_size: Draws per shard (rounded to the generator block size)

    Returns:
        TransmissionResult with the transmitted fraction
    """
    if n_samples < 1:
        raise DomainError(f"n_samples must be at least 1, got {n_samples}")
    shard_size = max(SHARD_ALIGNMENT, shard_size - shard_size % SHARD_ALIGNMENT)
    offsets = range(0, n_samples, shard_size)
    shards = [(offset, min(shard_size, n_samples - offset)) for offset in offsets]
    if jobs > 1 and len(shards) > 1:
        counts = Parallel(n_jobs=jobs)(
            delayed(_count_shard)(packet, x0_min, x2_bound, size, seed, offset) for offset, size in shards
        )
    else:
        counts = [_count_shard(packet, x0_min, x2_bound, size, seed, offset) for offset, size in shards]
    value = sum(counts) / n_samples
    logger.debug(f"Monte-Carlo transmission {value:.6f} from {n_samples} samples (seed {seed})")
    return TransmissionResult(
        value=value,
        method=TransmissionMethod.MONTE_CARLO,
        x0_min_used=x0_min,
        n_samples=n_samples,
    )


def binomial_standard_error(value: float, n_samples: int) -> float:
    return math.sqrt(max(value * (1.0 - value), 0.0) / n_samples)


def deviation_sigma(
    estimate: Union[TransmissionResult, float],
    reference: Union[TransmissionResult, float],
) -> float:
    """
    Deviation (1 - estimate / reference) * 100, in percent.

    Args:
        estimate: Estimated transmission
        reference: Reference transmission (> 0)

    Returns:
        Percentage deviation
    """
    estimate_value = estimate.value if isinstance(estimate, TransmissionResult) else float(estimate)
    reference_value = reference.value if isinstance(reference, TransmissionResult) else float(reference)
    if reference_value <= 0.0:
        raise DomainError("reference transmission must be positive")
    return (1.0 - estimate_value / reference_value) * 100.0


def jacobian_check(
    packet: GaussianPacket,
    ramp: Optional[RampSpec],
    inits: Sequence[float],
    t: float,
    positions: Optional[Sequence[float]] = None,
    density: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> float:
    """
    Largest defect of rho(x(t)) dx(t) = rho(x(0)) dx(0) over adjacent pairs.

    Densities are taken at pair midpoints. Closed-form trajectories and the
    analytic density are used unless numeric positions at time t and a density
    sampler for that time are given.

    Args:
        packet: Initial Gaussian packet
        ramp: Ramp slope, or None for a flat surface
        inits: Strictly increasing initial positions
        t: Time (>= 0)
        positions: Trajectory positions at t, same order as inits
        density: Callable returning the density at time t

    Returns:
        max |rho(x(t)) dx(t) / (rho(x(0)) dx(0)) - 1|
    """
    if t < 0:
        raise DomainError(f"time must be non-negative, got {t}")
    inits = np.asarray(inits, dtype=float)
    if inits.size < 2 or np.any(np.diff(inits) <= 0):
        raise DomainError("inits must hold at least two strictly increasing positions")
    if positions is None:
        positions = trajectory_bundle(packet, ramp, inits, [t])[0]
    positions = np.asarray(positions, dtype=float)
    if density is None:
        density = lambda x: rho(packet, ramp, x, t)  # noqa: E731

    mid_initial = 0.5 * (inits[1:] + inits[:-1])
    mid_final = 0.5 * (positions[1:] + positions[:-1])
    carried_initial = rho(packet, ramp, mid_initial, 0.0) * np.diff(inits)
    carried_final = np.asarray(density(mid_final)) * np.diff(positions)
    return float(np.max(np.abs(carried_final / carried_initial - 1.0)))
