"""
Closed-form Gaussian wave packet on the untruncated linear ramp V(x) = m alpha x.

Every function accepts scalar or array positions. ``ramp=None`` stands for the
flat surface (alpha = 0), which is the free-packet limit.
"""

from typing import Optional, Tuple

import numpy as np

from ..contracts import EnergyBudget, GaussianPacket, RampSpec
from ..exceptions import DomainError


def slope(ramp: Optional[RampSpec]) -> float:
    return 0.0 if ramp is None else float(ramp.alpha)


def check_time(t) -> None:
    if np.any(np.asarray(t) < 0):
        raise DomainError(f"time must be non-negative, got {t}")


def sigma_t(packet: GaussianPacket, t):
    """
    Width of the packet at time t.

    Args:
        packet: Initial Gaussian packet
        t: Time (scalar or array, >= 0)

    Returns:
        sigma0 * sqrt(1 + (v_s t / sigma0)^2)
    """
    check_time(t)
    return packet.sigma0 * np.sqrt(1.0 + (packet.v_s * np.asarray(t, dtype=float) / packet.sigma0) ** 2)


def width_short_time(packet: GaussianPacket, t):
    """Boost-phase width sigma0 + alpha_s t^2 / 2, valid for v_s t << sigma0."""
    check_time(t)
    return packet.sigma0 + 0.5 * packet.alpha_s * np.asarray(t, dtype=float) ** 2


def width_long_time(packet: GaussianPacket, t):
    """Asymptotic width v_s t, valid for v_s t >> sigma0."""
    check_time(t)
    return packet.v_s * np.asarray(t, dtype=float)


def spreading_rate(packet: GaussianPacket, t):
    """Rate of change of the width, v_s^2 t / sigma_t."""
    return packet.v_s ** 2 * np.asarray(t, dtype=float) / sigma_t(packet, t)


def classical_path(packet: GaussianPacket, ramp: Optional[RampSpec], t) -> Tuple:
    """
    Centroid position and momentum.

    Args:
        packet: Initial Gaussian packet
        ramp: Ramp slope, or None for a flat surface
        t: Time (scalar or array, >= 0)

    Returns:
        Tuple (x_cl, p_cl)
    """
    check_time(t)
    alpha = slope(ramp)
    t = np.asarray(t, dtype=float)
    x_cl = packet.x0 + packet.v0 * t - 0.5 * alpha * t ** 2
    p_cl = packet.mass * (packet.v0 - alpha * t)
    return x_cl, p_cl


def classical_turning_point(packet: GaussianPacket, ramp: RampSpec) -> Tuple[float, float]:
    """Time v0/alpha and position x0 + v0^2/2alpha where the centroid momentum vanishes."""
    t_tp = packet.v0 / ramp.alpha
    return t_tp, packet.x0 + packet.v0 ** 2 / (2.0 * ramp.alpha)


def _complex_width(packet: GaussianPacket, t):
    tau = packet.hbar * t / (2.0 * packet.mass * packet.sigma0 ** 2)
    return packet.sigma0 * (1.0 + 1j * tau)


def classical_phase(packet: GaussianPacket, ramp: Optional[RampSpec], x, t, phase_form: str = "action"):
    """
    Real phase (in units of action) carried by the packet.

    ``phase_form="action"`` writes it as p_cl (x - x_cl) plus the classical
    action along the centroid path; ``phase_form="expanded"`` uses the
    rearranged form p_cl (x - p0 t / 2m) - p0 x0 - m alpha^2 t^3 / 6. The two
    are algebraically identical.
    """
    alpha = slope(ramp)
    m = packet.mass
    p0 = packet.p0
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    x_cl, p_cl = classical_path(packet, ramp, t)
    if phase_form == "action":
        action = (p0 ** 2 / (2.0 * m) - m * alpha * packet.x0) * t - (p0 - m * alpha * t / 3.0) * alpha * t ** 2
        return p_cl * (x - x_cl) + action
    if phase_form == "expanded":
        return p_cl * (x - p0 * t / (2.0 * m)) - p0 * packet.x0 - m * alpha ** 2 * t ** 3 / 6.0
    raise ValueError(f"Unknown phase form: {phase_form}")


def psi(packet: GaussianPacket, ramp: Optional[RampSpec], x, t, phase_form: str = "action"):
    """
    Wavefunction of the packet on the ramp.

    Args:
        packet: Initial Gaussian packet
        ramp: Ramp slope, or None for a flat surface
        x: Position (scalar or array)
        t: Time (>= 0)
        phase_form: "action" or "expanded"; both give the same amplitude

    Returns:
        Complex amplitude(s) with |psi|^2 equal to rho
    """
    check_time(t)
    x = np.asarray(x, dtype=float)
    x_cl, _ = classical_path(packet, ramp, t)
    width = _complex_width(packet, t)
    # principal square root keeps Re > 0 continuously from t = 0
    prefactor = (2.0 * np.pi) ** -0.25 / np.sqrt(width)
    envelope = -((x - x_cl) ** 2) / (4.0 * width * packet.sigma0)
    phase = classical_phase(packet, ramp, x, t, phase_form) / packet.hbar
    return prefactor * np.exp(envelope + 1j * phase)


def rho(packet: GaussianPacket, ramp: Optional[RampSpec], x, t):
    """Probability density (2 pi sigma_t^2)^(-1/2) exp(-(x - x_cl)^2 / 2 sigma_t^2)."""
    width = sigma_t(packet, t)
    x_cl, _ = classical_path(packet, ramp, t)
    x = np.asarray(x, dtype=float)
    return np.exp(-((x - x_cl) ** 2) / (2.0 * width ** 2)) / np.sqrt(2.0 * np.pi * width ** 2)


def classical_energy(packet: GaussianPacket, ramp: Optional[RampSpec], t: float = 0.0) -> float:
    """p_cl^2 / 2m + m alpha x_cl evaluated at time t; constant along the path."""
    x_cl, p_cl = classical_path(packet, ramp, t)
    return float(p_cl ** 2 / (2.0 * packet.mass) + packet.mass * slope(ramp) * x_cl)


def mean_energy(packet: GaussianPacket, ramp: Optional[RampSpec]) -> EnergyBudget:
    """
    Split of the mean energy into its classical-like and spreading parts.

    Args:
        packet: Initial Gaussian packet
        ramp: Ramp slope, or None for a flat surface

    Returns:
        EnergyBudget with total = classical + spreading
    """
    spreading = packet.hbar ** 2 / (8.0 * packet.mass * packet.sigma0 ** 2)
    classical = classical_energy(packet, ramp, 0.0)
    return EnergyBudget(total=classical + spreading, classical=classical, spreading=spreading)
