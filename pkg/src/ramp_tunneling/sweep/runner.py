"""
Parameter sweeps over (sigma0, alpha, n, v0).

Every sweep point is an independent job. A failing stage is recorded in the
row's ``error`` column and the remaining stages and points still run.
"""

import itertools
import logging
import math
from typing import List, Optional, Sequence, Tuple

import pandas as pd
from joblib import Parallel, delayed

from ..analytic.bohmian import (
    critical_delta,
    estimate_onset,
    onset_fast_boost,
    onset_resting,
    onset_slow_boost,
)
from ..contracts import (
    RampSpec,
    ShellContribution,
    SweepConfig,
    SweepRow,
    TransmissionMethod,
)
from ..dynamics.tdse import WavePacketRun, default_truncated_ramp
from ..dynamics.trajectories import locate_boundary
from ..transmission.estimators import (
    cutoff_from_sensitivity,
    deviation_sigma,
    erfc_transmission,
    monte_carlo_transmission,
)
from ..utils.io_utils import rows_to_frame

logger = logging.getLogger(__name__)

SweepPoint = Tuple[float, float, float, float]

BASE_COLUMNS = ["sigma0", "alpha", "n", "v0", "x_cutoff", "delta0_c", "regime", "x0_min_est", "T_est"]


def sweep_points(config: SweepConfig) -> List[SweepPoint]:
    """Cartesian product of the axes, sigma0 varying slowest."""
    return list(itertools.product(config.sigma0, config.alpha, config.n, config.v0))


def evaluate_point(config: SweepConfig, sigma0: float, alpha: float, n: float, v0: float) -> SweepRow:
    """
    Evaluate the requested estimators at one sweep point.

    Args:
        config: Sweep configuration
        sigma0: Initial width
        alpha: Ramp slope
        n: Sensitivity parameter
        v0: Translational velocity

    Returns:
        SweepRow, with failures listed in ``error``
    """
    methods = set(config.methods)
    numerics = config.numerics
    packet = config.packet_for(sigma0, v0)
    ramp = RampSpec(alpha=alpha)
    row = SweepRow(sigma0=sigma0, alpha=alpha, n=n, v0=v0)
    errors: List[str] = []

    cutoff = cutoff_from_sensitivity(packet, n)
    row.x_cutoff = cutoff.x_cutoff
    row.delta0_c = critical_delta(packet, ramp)

    try:
        if v0 == 0.0:
            onset = onset_resting(packet, ramp, cutoff.x_cutoff)
        else:
            onset = estimate_onset(packet, ramp, cutoff.x_cutoff)
            row.x0_min_slow = onset_slow_boost(packet, ramp, cutoff.x_cutoff).x0_min
            row.x0_min_fast = onset_fast_boost(packet, ramp, cutoff.x_cutoff).x0_min
        row.x0_min_est = onset.x0_min
        row.regime = onset.regime.value
        row.T_est = erfc_transmission(packet, onset.x0_min).value
    except Exception as exc:
        errors.append(f"onset_failed:{exc}")

    if TransmissionMethod.MONTE_CARLO in methods and row.T_est is not None:
        try:
            row.T_mc = monte_carlo_transmission(
                packet, row.x0_min_est, n_samples=numerics.mc_samples, seed=numerics.seed
            ).value
        except Exception as exc:
            errors.append(f"monte_carlo_failed:{exc}")

    if methods & {TransmissionMethod.WAVE_PACKET, TransmissionMethod.CORRECTED}:
        runner: Optional[WavePacketRun] = None
        try:
            runner = WavePacketRun(packet, default_truncated_ramp(packet, alpha, n), numerics=numerics)
            row.T_wp = runner.run().T_inf
            if row.T_est is not None and row.T_wp:
                row.Sigma_pct = deviation_sigma(row.T_est, row.T_wp)
        except Exception as exc:
            errors.append(f"wave_packet_failed:{exc}")

        if TransmissionMethod.CORRECTED in methods and runner is not None:
            try:
                boundary = locate_boundary(runner)
                row.x0_min_corr = boundary.x0_min_corrected
                row.T_corr = erfc_transmission(packet, boundary.x0_min_corrected).value
                if row.T_wp:
                    row.Sigma_corr_pct = deviation_sigma(row.T_corr, row.T_wp)
            except Exception as exc:
                errors.append(f"corrected_failed:{exc}")

    row.error = ";".join(errors)
    if errors:
        logger.warning(f"Sweep point sigma0={sigma0} alpha={alpha} n={n} v0={v0}: {row.error}")
    return row


def run_sweep(config: SweepConfig) -> List[SweepRow]:
    """
    Evaluate every point of the sweep.

    Args:
        config: Sweep configuration

    Returns:
        Rows in axis order, whatever order the workers finish in
    """
    points = sweep_points(config)
    logger.info(
        f"Sweeping {len(points)} points with methods "
        f"{[method.value for method in config.methods]} on {config.numerics.jobs} job(s)"
    )
    if config.numerics.jobs > 1 and len(points) > 1:
        return list(
            Parallel(n_jobs=config.numerics.jobs)(delayed(evaluate_point)(config, *point) for point in points)
        )
    return [evaluate_point(config, *point) for point in points]


def sweep_columns(config: SweepConfig) -> List[str]:
    """Columns present for the requested methods and velocities."""
    methods = set(config.methods)
    columns = list(BASE_COLUMNS)
    if any(v0 > 0 for v0 in config.v0):
        columns[columns.index("x0_min_est") + 1:columns.index("x0_min_est") + 1] = ["x0_min_slow", "x0_min_fast"]
    if TransmissionMethod.MONTE_CARLO in methods:
        columns.append("T_mc")
    if methods & {TransmissionMethod.WAVE_PACKET, TransmissionMethod.CORRECTED}:
        columns += ["T_wp", "Sigma_pct"]
    if TransmissionMethod.CORRECTED in methods:
        columns += ["x0_min_corr", "T_corr", "Sigma_corr_pct"]
    columns.append("error")
    return columns


def sweep_frame(config: SweepConfig, rows: Sequence[SweepRow]) -> pd.DataFrame:
    return rows_to_frame(rows, sweep_columns(config))


def sensitivity_shells(
    config: SweepConfig,
    sigma0: float,
    alpha: float,
    n_max: int,
    n_onset: float = 6.0,
    v0: float = 0.0,
) -> List[ShellContribution]:
    """
    Split the estimated transmission into consecutive sensitivity shells.

    Shell 1 covers [x0_min, cutoff(1)], shell k covers
    [max(x0_min, cutoff(k-1)), cutoff(k)] and the last shell is open to
    infinity, so the shells add up to the total estimate. x0_min is the onset
    for the cutoff at n_onset.

    Args:
        config: Sweep configuration (packet defaults)
        sigma0: Initial width
        alpha: Ramp slope
        n_max: Number of shells (>= 2)
        n_onset: Sensitivity defining the onset
        v0: Translational velocity

    Returns:
        One ShellContribution per shell
    """
    if n_max < 2:
        raise ValueError(f"n_max must be at least 2, got {n_max}")
    packet = config.packet_for(sigma0, v0)
    ramp = RampSpec(alpha=alpha)
    onset_cutoff = cutoff_from_sensitivity(packet, n_onset).x_cutoff
    if v0 == 0.0:
        x0_min = onset_resting(packet, ramp, onset_cutoff).x0_min
    else:
        x0_min = estimate_onset(packet, ramp, onset_cutoff).x0_min

    shells = []
    lower = x0_min
    for shell in range(1, n_max + 1):
        upper = math.inf if shell == n_max else cutoff_from_sensitivity(packet, shell).x_cutoff
        value = erfc_transmission(packet, lower, upper).value if upper > lower else 0.0
        shells.append(ShellContribution(n=shell, lower=lower, upper=upper, value=value))
        lower = max(lower, upper)
    return shells
