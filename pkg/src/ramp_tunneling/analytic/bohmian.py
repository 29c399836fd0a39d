"""
Closed-form Bohmian trajectories on the untruncated ramp and the tunneling
onset estimators built on them.

A trajectory started at x0 + delta0 follows x(t) = x_cl(t) + (sigma_t/sigma0) delta0,
so the whole ensemble is an affine image of the initial positions and
trajectories never cross.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import brentq

from ..contracts import (
    GaussianPacket,
    OnsetEstimate,
    OnsetRegime,
    RampSpec,
    TrajectoryInitial,
    TurningEvent,
    TurningKind,
)
from ..exceptions import DomainError
from .ramp import check_time, classical_path, sigma_t, slope

logger = logging.getLogger(__name__)

SLOW_BOOST_MAX_RATIO = 1.1
FAST_BOOST_MIN_RATIO = 3.0


def _require_resting(packet: GaussianPacket) -> None:
    if packet.v0 != 0.0:
        raise DomainError(f"formula requires v0 = 0, got v0 = {packet.v0}")


def bohm_velocity(packet: GaussianPacket, ramp: Optional[RampSpec], x, t):
    """
    Velocity field v_cl + (hbar^2 t / 4 m^2 sigma0^2 sigma_t^2)(x - x_cl).

    Args:
        packet: Initial Gaussian packet
        ramp: Ramp slope, or None for a flat surface
        x: Position (scalar or array)
        t: Time (>= 0)

    Returns:
        Velocity at (x, t)
    """
    x_cl, p_cl = classical_path(packet, ramp, t)
    width = sigma_t(packet, t)
    coupling = packet.hbar ** 2 * np.asarray(t, dtype=float) / (4.0 * packet.mass ** 2 * packet.sigma0 ** 2)
    return p_cl / packet.mass + coupling * (np.asarray(x, dtype=float) - x_cl) / width ** 2


def separation_ratio(packet: GaussianPacket, t):
    """Ratio (x2(t) - x1(t)) / (x2(0) - x1(0)), the same for every pair."""
    return sigma_t(packet, t) / packet.sigma0


def trajectory(packet: GaussianPacket, ramp: Optional[RampSpec], init: TrajectoryInitial, t):
    """
    Position of a trajectory at time t.

    Args:
        packet: Initial Gaussian packet
        ramp: Ramp slope, or None for a flat surface
        init: Initial condition of the trajectory
        t: Time (scalar or array, >= 0)

    Returns:
        x_cl(t) + (sigma_t / sigma0) delta0
    """
    if not math.isclose(init.x_init - packet.x0, init.delta0, rel_tol=1e-12, abs_tol=1e-12):
        raise DomainError(
            f"initial condition x_init={init.x_init} does not match delta0={init.delta0} for x0={packet.x0}"
        )
    x_cl, _ = classical_path(packet, ramp, t)
    return x_cl + separation_ratio(packet, t) * init.delta0


def trajectory_bundle(
    packet: GaussianPacket,
    ramp: Optional[RampSpec],
    x_inits: Sequence[float],
    times: Sequence[float],
) -> np.ndarray:
    """Positions of many trajectories, shape (len(times), len(x_inits))."""
    times = np.asarray(times, dtype=float)
    deltas = np.asarray(x_inits, dtype=float) - packet.x0
    x_cl, _ = classical_path(packet, ramp, times)
    ratio = separation_ratio(packet, times)
    return x_cl[:, None] + ratio[:, None] * deltas[None, :]


def critical_delta(packet: GaussianPacket, ramp: RampSpec) -> float:
    """Smallest offset (alpha / alpha_s) sigma0 with a true turning point when v0 = 0."""
    return ramp.alpha / packet.alpha_s * packet.sigma0


def critical_position(packet: GaussianPacket, ramp: RampSpec) -> float:
    return packet.x0 + critical_delta(packet, ramp)


def turning_time_v0zero(packet: GaussianPacket, ramp: RampSpec, delta0: float) -> TurningEvent:
    """
    Turning event of a trajectory of a packet released at rest.

    Args:
        packet: Initial Gaussian packet (v0 must be 0)
        ramp: Ramp slope
        delta0: Initial offset from the centroid

    Returns:
        TurningEvent; trajectories with delta0 <= delta0_c turn back immediately
    """
    _require_resting(packet)
    x_init = packet.x0 + delta0
    if delta0 <= critical_delta(packet, ramp):
        return TurningEvent(t_tp=0.0, x_tp=x_init, kind=TurningKind.IMMEDIATE_BACKWARD)

    q = packet.alpha_s / ramp.alpha * delta0 / packet.sigma0
    # factored radicand, q close to 1 cancels badly as q^2 - 1
    t_tp = packet.sigma0 / packet.v_s * math.sqrt((q - 1.0) * (q + 1.0))
    return TurningEvent(
        t_tp=t_tp,
        x_tp=turning_point_v0zero(packet, ramp, delta0),
        kind=TurningKind.TRUE_TURNING,
    )


def turning_point_v0zero(packet: GaussianPacket, ramp: RampSpec, delta0: float) -> float:
    """Turning position x0 + (sigma0/2)(alpha/alpha_s) + (1/2)(alpha_s/alpha) delta0^2 / sigma0."""
    _require_resting(packet)
    delta_c = critical_delta(packet, ramp)
    if delta0 < delta_c:
        raise DomainError(f"delta0={delta0} below the critical distance {delta_c}: no true turning point")
    ratio = ramp.alpha / packet.alpha_s
    return packet.x0 + 0.5 * packet.sigma0 * ratio + 0.5 * delta0 ** 2 / (ratio * packet.sigma0)


def effective_velocity(packet: GaussianPacket, delta0: float) -> float:
    """Constant velocity v0 + v_s delta0 / sigma0 of the fast-boost regime."""
    return packet.v0 + packet.v_s * delta0 / packet.sigma0


def slow_boost_turning_time(
    packet: GaussianPacket, ramp: RampSpec, delta0: float, linearized: bool = False
) -> float:
    """
    Turning time while the packet width stays close to sigma0.

    Args:
        packet: Initial Gaussian packet
        ramp: Ramp slope
        delta0: Initial offset from the centroid
        linearized: Use the first-order expansion in alpha_s delta0 / (alpha sigma0)

    Returns:
        v0 / (alpha - alpha_s delta0 / sigma0)
    """
    boost = packet.alpha_s * delta0 / packet.sigma0
    if linearized:
        return packet.v0 / ramp.alpha * (1.0 + boost / ramp.alpha)
    if boost >= ramp.alpha:
        raise DomainError(f"delta0={delta0} never turns in the slow-boost approximation")
    return packet.v0 / (ramp.alpha - boost)


def slow_boost_turning_point(packet: GaussianPacket, ramp: RampSpec, delta0: float) -> float:
    return packet.x0 + delta0 + packet.v0 ** 2 / (2.0 * ramp.alpha)


def fast_boost_turning_time(packet: GaussianPacket, ramp: RampSpec, delta0: float) -> float:
    return effective_velocity(packet, delta0) / ramp.alpha


def fast_boost_turning_point(packet: GaussianPacket, ramp: RampSpec, delta0: float) -> float:
    return packet.x0 + effective_velocity(packet, delta0) ** 2 / (2.0 * ramp.alpha)


def _forward_velocity(packet: GaussianPacket, ramp: RampSpec, delta0: float, t: float) -> float:
    return packet.v0 - ramp.alpha * t + packet.alpha_s * delta0 * t / float(sigma_t(packet, t))


def turning_time_general(packet: GaussianPacket, ramp: RampSpec, delta0: float) -> TurningEvent:
    """
    Turning event for any v0 >= 0 from the exact velocity along the trajectory.

    The velocity v0 - alpha t + alpha_s delta0 t / sigma_t is concave in t for
    delta0 > 0 and decreasing otherwise, so a forward-moving trajectory has a
    single positive root, found with brentq.
    """
    if packet.v0 == 0.0:
        return turning_time_v0zero(packet, ramp, delta0)

    t_hi = 10.0 * packet.v0 / ramp.alpha + 10.0 * packet.sigma0 / packet.v_s
    expansions = 0
    while _forward_velocity(packet, ramp, delta0, t_hi) > 0.0:
        t_hi *= 2.0
        expansions += 1
        if expansions > 60:
            raise DomainError(f"could not bracket the turning time for delta0={delta0}")

    t_tp = brentq(lambda t: _forward_velocity(packet, ramp, delta0, t), 0.0, t_hi, xtol=1e-14, rtol=1e-13)
    init = TrajectoryInitial.offset(packet, delta0)
    return TurningEvent(
        t_tp=t_tp,
        x_tp=float(trajectory(packet, ramp, init, t_tp)),
        kind=TurningKind.TRUE_TURNING,
    )


def onset_resting(packet: GaussianPacket, ramp: RampSpec, x_cutoff: float) -> OnsetEstimate:
    """
    Onset of transmission for a packet released at rest.

    Args:
        packet: Initial Gaussian packet (v0 must be 0)
        ramp: Ramp slope
        x_cutoff: Barrier cutoff

    Returns:
        OnsetEstimate with x0 + sqrt(2 alpha sigma0 / alpha_s) sqrt(x_cutoff - x0 - sigma0 alpha / 2 alpha_s)
    """
    _require_resting(packet)
    ratio = ramp.alpha / packet.alpha_s
    radicand = x_cutoff - packet.x0 - 0.5 * packet.sigma0 * ratio
    if radicand < 0.0:
        if radicand > -1e-12 * max(1.0, abs(x_cutoff)):
            radicand = 0.0
        else:
            raise DomainError(
                f"x_cutoff={x_cutoff} lies inside the no-turning zone (radicand {radicand:.3e})"
            )
    x0_min = packet.x0 + math.sqrt(2.0 * ratio * packet.sigma0) * math.sqrt(radicand)
    return OnsetEstimate(x0_min=x0_min, regime=OnsetRegime.RESTING)


def onset_slow_boost(packet: GaussianPacket, ramp: RampSpec, x_cutoff: float) -> OnsetEstimate:
    return OnsetEstimate(
        x0_min=x_cutoff - packet.v0 ** 2 / (2.0 * ramp.alpha),
        regime=OnsetRegime.SLOW_BOOST,
    )


def onset_fast_boost(packet: GaussianPacket, ramp: RampSpec, x_cutoff: float) -> OnsetEstimate:
    """Onset from the effective-velocity turning point x0 + v_eff^2 / 2 alpha = x_cutoff."""
    distance = x_cutoff - packet.x0
    if distance < 0.0:
        raise DomainError(f"x_cutoff={x_cutoff} lies behind the centroid x0={packet.x0}")
    scale = math.sqrt(2.0 * ramp.alpha * packet.sigma0 / packet.alpha_s)
    x0_min = packet.x0 + scale * math.sqrt(distance) - packet.v0 / packet.v_s * packet.sigma0
    return OnsetEstimate(x0_min=x0_min, regime=OnsetRegime.FAST_BOOST)


def _turning_position(packet: GaussianPacket, ramp: RampSpec, delta0: float) -> float:
    return turning_time_general(packet, ramp, delta0).x_tp


def onset_numeric(packet: GaussianPacket, ramp: RampSpec, x_cutoff: float) -> OnsetEstimate:
    """
    Onset from the exact turning point, for any v0 >= 0.

    The furthest point reached is increasing in delta0, so the offset whose
    turning point sits on x_cutoff is bracketed and solved with brentq.
    """
    def excess(delta0: float) -> float:
        return _turning_position(packet, ramp, delta0) - x_cutoff

    hi = x_cutoff - packet.x0
    if excess(hi) <= 0.0:
        # the trajectory starting on the cutoff does not move forward
        return OnsetEstimate(x0_min=x_cutoff, regime=OnsetRegime.NUMERIC)

    step = packet.sigma0
    lo = min(hi, 0.0) - step
    while excess(lo) > 0.0:
        step *= 2.0
        lo -= step
        if step > 1e6 * packet.sigma0:
            raise DomainError(f"could not bracket the onset for x_cutoff={x_cutoff}")

    delta0 = brentq(excess, lo, hi, xtol=1e-13, rtol=1e-12)
    logger.debug(f"Numeric onset for x_cutoff={x_cutoff}: delta0={delta0:.6e}")
    return OnsetEstimate(x0_min=packet.x0 + delta0, regime=OnsetRegime.NUMERIC)


def recommend_onset_regime(packet: GaussianPacket, ramp: RampSpec) -> OnsetRegime:
    """
    Pick the limiting estimator suited to the packet.

    Compares the width reached at the classical turning time v0/alpha with
    sigma0: at most 1.1 is slow boosting, at least 3 is fast boosting, and
    anything between is left to the numeric onset.
    """
    if packet.v0 == 0.0:
        return OnsetRegime.RESTING
    ratio = float(separation_ratio(packet, packet.v0 / ramp.alpha))
    if ratio <= SLOW_BOOST_MAX_RATIO:
        return OnsetRegime.SLOW_BOOST
    if ratio >= FAST_BOOST_MIN_RATIO:
        return OnsetRegime.FAST_BOOST
    return OnsetRegime.NUMERIC


def estimate_onset(packet: GaussianPacket, ramp: RampSpec, x_cutoff: float) -> OnsetEstimate:
    """Onset from the estimator that recommend_onset_regime selects."""
    regime = recommend_onset_regime(packet, ramp)
    if regime is OnsetRegime.RESTING:
        return onset_resting(packet, ramp, x_cutoff)
    if regime is OnsetRegime.SLOW_BOOST:
        return onset_slow_boost(packet, ramp, x_cutoff)
    if regime is OnsetRegime.FAST_BOOST:
        return onset_fast_boost(packet, ramp, x_cutoff)
    return onset_numeric(packet, ramp, x_cutoff)
