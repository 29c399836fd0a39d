"""
Data tables behind the published parametric studies and trajectory figures.

Only data files are produced; plotting is left to the reader.
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from ..analytic.bohmian import (
    critical_position,
    onset_fast_boost,
    onset_numeric,
    onset_resting,
    onset_slow_boost,
    recommend_onset_regime,
    trajectory_bundle,
)
from ..analytic.ramp import classical_path, mean_energy, sigma_t
from ..contracts import RampSpec, SweepConfig, TransmissionMethod
from ..dynamics.tdse import WavePacketRun, default_truncated_ramp
from ..dynamics.trajectories import ensemble_run
from ..transmission.estimators import cutoff_from_sensitivity, erfc_transmission
from ..transmission.sampling import percentile_positions
from ..utils.file_utils import ensure_dir
from ..utils.io_utils import (
    write_snapshot,
    write_table,
    write_trace,
    write_trajectory_bundle,
)
from .runner import run_sweep, sensitivity_shells, sweep_frame

logger = logging.getLogger(__name__)

SENSITIVITY_VALUES = [4.0, 5.0, 6.0, 7.0]
SLOPE_VALUES = [5.0, 10.0, 20.0]
SHELL_COUNT = 7
FIGURE3_SIGMAS = (0.15, 0.3, 0.5)


def _safe(estimator, *args) -> float:
    try:
        return estimator(*args).x0_min
    except Exception as exc:
        logger.debug(f"{estimator.__name__} unavailable: {exc}")
        return math.nan


def analytic_table(config: SweepConfig) -> pd.DataFrame:
    """
    Closed-form quantities at every sweep point.

    Args:
        config: Sweep configuration

    Returns:
        DataFrame with cutoffs, critical positions, all onsets, the erfc
        estimate and the energy split
    """
    records: List[Dict[str, Any]] = []
    for sigma0 in config.sigma0:
        for alpha in config.alpha:
            for n in config.n:
                for v0 in config.v0:
                    packet = config.packet_for(sigma0, v0)
                    ramp = RampSpec(alpha=alpha)
                    x_cutoff = cutoff_from_sensitivity(packet, n).x_cutoff
                    onsets = {
                        "x0_min_resting": _safe(onset_resting, packet, ramp, x_cutoff),
                        "x0_min_slow": _safe(onset_slow_boost, packet, ramp, x_cutoff),
                        "x0_min_fast": _safe(onset_fast_boost, packet, ramp, x_cutoff),
                        "x0_min_numeric": _safe(onset_numeric, packet, ramp, x_cutoff),
                    }
                    energy = mean_energy(packet, ramp)
                    numeric = onsets["x0_min_numeric"]
                    records.append(
                        {
                            "sigma0": sigma0,
                            "alpha": alpha,
                            "n": n,
                            "v0": v0,
                            "v_s": packet.v_s,
                            "alpha_s": packet.alpha_s,
                            "x_cutoff": x_cutoff,
                            "x_c0": critical_position(packet, ramp),
                            "regime": recommend_onset_regime(packet, ramp).value,
                            **onsets,
                            "T_numeric": erfc_transmission(packet, numeric).value if math.isfinite(numeric) else math.nan,
                            "width_ratio_t1": float(sigma_t(packet, 1.0)) / sigma0,
                            "E_total": energy.total,
                            "E_cl": energy.classical,
                            "E_s": energy.spreading,
                        }
                    )
    return pd.DataFrame.from_records(records)


def closed_form_bundle(
    config: SweepConfig,
    sigma0: float,
    alpha: float,
    v0: float,
    t_end: float,
    k: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Times, positions (n_times, k) and percentile inits of closed-form trajectories."""
    packet = config.packet_for(sigma0, v0)
    inits = percentile_positions(packet, k)
    steps = max(1, int(round(t_end / config.numerics.sample_interval)))
    times = np.linspace(0.0, t_end, steps + 1)
    return times, trajectory_bundle(packet, RampSpec(alpha=alpha), inits, times), inits


def fig2_tables(config: SweepConfig) -> Dict[str, pd.DataFrame]:
    """
    Sensitivity, slope and shell studies over the sigma0 axis.

    The sensitivity study uses the first configured slope with n in
    {4, 5, 6, 7}; the slope study uses the first configured n with alpha in
    {5, 10, 20}; shells split the estimate at the first slope into seven
    sensitivity shells.
    """
    erfc_only = [TransmissionMethod.ERFC_ESTIMATE]
    v0 = config.v0[:1]

    sensitivity_config = config.model_copy(
        update={"alpha": config.alpha[:1], "n": SENSITIVITY_VALUES, "v0": v0, "methods": erfc_only}
    )
    slope_config = config.model_copy(
        update={"alpha": SLOPE_VALUES, "n": config.n[:1], "v0": v0, "methods": erfc_only}
    )

    shell_records = []
    for sigma0 in config.sigma0:
        try:
            shells = sensitivity_shells(config, sigma0, config.alpha[0], SHELL_COUNT, config.n[0], v0[0])
        except Exception as exc:
            logger.warning(f"Shells unavailable at sigma0={sigma0}: {exc}")
            continue
        total = sum(shell.value for shell in shells)
        for shell in shells:
            shell_records.append(
                {
                    "sigma0": sigma0,
                    "shell": shell.n,
                    "lower": shell.lower,
                    "upper": shell.upper,
                    "T_shell": shell.value,
                    "fraction": shell.value / total if total > 0 else math.nan,
                }
            )

    return {
        "sensitivity": sweep_frame(sensitivity_config, run_sweep(sensitivity_config)),
        "slope": sweep_frame(slope_config, run_sweep(slope_config)),
        "shells": pd.DataFrame.from_records(
            shell_records, columns=["sigma0", "shell", "lower", "upper", "T_shell", "fraction"]
        ),
    }


def fig4_table(config: SweepConfig) -> pd.DataFrame:
    """Estimated, exact and corrected transmissions along the sigma0 axis."""
    fig4_config = config.model_copy(
        update={
            "alpha": config.alpha[:1],
            "n": config.n[:1],
            "v0": config.v0[:1],
            "methods": [
                TransmissionMethod.ERFC_ESTIMATE,
                TransmissionMethod.WAVE_PACKET,
                TransmissionMethod.CORRECTED,
            ],
        }
    )
    return sweep_frame(fig4_config, run_sweep(fig4_config))


def figure3_bundle(
    config: SweepConfig,
    output_dir: Union[str, Path],
    sigma0_values: Sequence[float] = FIGURE3_SIGMAS,
    resolved_config: Optional[Dict[str, Any]] = None,
) -> List[Dict[str, Any]]:
    """
    Trajectory bundles, centroid curves and densities for the collision figure.

    For every sigma0 a truncated-ramp run is integrated with percentile
    initial conditions; the untruncated bundle over the same time window comes
    from the closed form.

    Args:
        config: Sweep configuration (first alpha, n and v0 are used)
        output_dir: Directory receiving the files
        sigma0_values: Widths to simulate
        resolved_config: Configuration echoed into the sidecars

    Returns:
        One summary per sigma0
    """
    output_dir = ensure_dir(output_dir)
    resolved_config = resolved_config or config.model_dump(mode="json")
    alpha, n, v0 = config.alpha[0], config.n[0], config.v0[0]
    k = config.numerics.trajectories
    summaries = []

    for sigma0 in sigma0_values:
        tag = f"sigma0_{sigma0:.3f}"
        packet = config.packet_for(sigma0, v0)
        spec = default_truncated_ramp(packet, alpha, n)
        runner = WavePacketRun(packet, spec, numerics=config.numerics)
        inits = percentile_positions(packet, k)

        ensemble = ensemble_run(inits, runner)
        trace = ensemble.trace
        first = ensemble.trajectories[0]
        positions = np.column_stack([item.positions for item in ensemble.trajectories])
        write_trajectory_bundle(
            first.times,
            positions,
            output_dir / f"{tag}_truncated.csv",
            inits,
            [fate.value for fate in ensemble.fates],
            resolved_config,
        )

        times, free_positions, _ = closed_form_bundle(config, sigma0, alpha, v0, trace.t_final, k)
        write_trajectory_bundle(
            times,
            free_positions,
            output_dir / f"{tag}_untruncated.csv",
            inits,
            ["undecided"] * k,
            resolved_config,
        )

        x_cl, p_cl = classical_path(packet, RampSpec(alpha=alpha), times)
        write_table(pd.DataFrame({"t": times, "x_cl": x_cl, "p_cl": p_cl}), output_dir / f"{tag}_centroid.csv")
        write_trace(trace, output_dir / f"{tag}_trace.csv")
        write_snapshot(runner.initial_state(), output_dir / f"{tag}_density_initial.csv")
        write_snapshot(runner.final_state, output_dir / f"{tag}_density_final.csv")

        transmitted = sum(1 for fate in ensemble.fates if fate.value == "transmitted")
        summaries.append(
            {
                "sigma0": sigma0,
                "T_inf": trace.T_inf,
                "t_final": trace.t_final,
                "transmitted": transmitted,
                "trajectories": k,
                "transmitted_fraction": ensemble.transmitted_fraction,
            }
        )
        logger.info(f"Figure bundle {tag}: {transmitted}/{k} transmitted, T_inf={trace.T_inf}")
    return summaries
