"""
Initial positions distributed as the initial density rho0.

Random draws use the counter-based Philox generator: draw k of a given seed
is the same whichever shard produces it, which keeps sharded Monte-Carlo runs
identical to a single sequential run.
"""

from typing import Optional

import numpy as np
from scipy.special import ndtr, ndtri

from ..contracts import GaussianPacket
from ..exceptions import DomainError

# Philox emits four 64-bit words per counter value, one word per double
SHARD_ALIGNMENT = 4

_HALF_ULP = 2.0 ** -54


def uniform_stream(seed: int, size: int, offset: int = 0) -> np.ndarray:
    """
    Uniform draws number offset .. offset + size - 1 of the stream keyed by seed.

    Args:
        seed: 64-bit generator key
        size: Number of draws
        offset: Index of the first draw

    Returns:
        Array of doubles in the open interval (0, 1)
    """
    if size < 0 or offset < 0:
        raise DomainError(f"size and offset must be non-negative, got {size}, {offset}")
    block, skip = divmod(offset, SHARD_ALIGNMENT)
    generator = np.random.Generator(np.random.Philox(key=seed, counter=block))
    draws = generator.random(size + skip)[skip:]
    # shift off zero so the inverse CDF stays finite
    return draws + _HALF_ULP


def sample_initial_positions(packet: GaussianPacket, size: int, seed: int, offset: int = 0) -> np.ndarray:
    """Positions x0 + sigma0 * Phi^-1(u) for draws offset .. offset + size - 1."""
    return packet.x0 + packet.sigma0 * ndtri(uniform_stream(seed, size, offset))


def percentile_positions(
    packet: GaussianPacket,
    k: int,
    lower: Optional[float] = None,
    upper: Optional[float] = None,
) -> np.ndarray:
    """
    Deterministic initial positions at equispaced percentiles of rho0.

    Without bounds the percentiles are i / (k + 1) for i = 1..k. With bounds,
    k percentiles are spread evenly over [Phi(lower), Phi(upper)] with both
    ends included.

    Args:
        packet: Initial Gaussian packet
        k: Number of positions
        lower: Optional lowest position
        upper: Optional highest position

    Returns:
        Increasing array of k positions
    """
    if k < 1:
        raise DomainError(f"k must be at least 1, got {k}")
    if lower is None and upper is None:
        levels = np.arange(1, k + 1) / (k + 1.0)
    else:
        low = 1.0 / (k + 1.0) if lower is None else float(ndtr((lower - packet.x0) / packet.sigma0))
        high = k / (k + 1.0) if upper is None else float(ndtr((upper - packet.x0) / packet.sigma0))
        if not low < high:
            raise DomainError(f"empty percentile range [{lower}, {upper}]")
        levels = np.linspace(low, high, k) if k > 1 else np.array([0.5 * (low + high)])
    positions = packet.x0 + packet.sigma0 * ndtri(levels)
    if lower is not None:
        positions[0] = lower
    if upper is not None and k > 1:
        positions[-1] = upper
    return positions
