#!/usr/bin/env python3
"""
Command-line driver: closed-form tables, wave-packet runs, sweeps and figure data.
"""

import argparse
import logging
from pathlib import Path
import sys
from typing import Any, Dict, List, Optional

sys.path.insert(0, str(Path(__file__).parent.parent))

from pydantic import ValidationError

from src.ramp_tunneling.contracts import SweepConfig
from src.ramp_tunneling.dynamics.tdse import WavePacketRun, default_truncated_ramp
from src.ramp_tunneling.exceptions import RampTunnelingError
from src.ramp_tunneling.sweep.figures import (
    FIGURE3_SIGMAS,
    analytic_table,
    closed_form_bundle,
    fig2_tables,
    fig4_table,
    figure3_bundle,
)
from src.ramp_tunneling.sweep.runner import run_sweep, sweep_frame
from src.ramp_tunneling.utils.file_utils import deep_merge, ensure_dir, resolve_config
from src.ramp_tunneling.utils.io_utils import (
    write_json,
    write_run_config,
    write_snapshot,
    write_table,
    write_trace,
    write_trajectory_bundle,
)
from src.ramp_tunneling.utils.logging_utils import configure_logging

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="Config file (YAML or JSON)")
    common.add_argument("--out", type=str, default=None, help="Output directory")
    common.add_argument("--seed", type=int, default=None, help="64-bit Monte-Carlo seed")
    common.add_argument(
        "--methods",
        type=str,
        default=None,
        help="Comma-separated methods (erfc_estimate,monte_carlo,wave_packet,corrected)",
    )
    common.add_argument("--jobs", type=int, default=None, help="Parallel sweep points")
    common.add_argument(
        "--log-level",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"],
        default=None,
        help="Logging level",
    )

    parser = argparse.ArgumentParser(description="Ramp-barrier tunneling toolkit")
    subparsers = parser.add_subparsers(dest="command", required=True)
    subparsers.add_parser("analytic", parents=[common], help="Closed-form onsets and estimates")
    trajectories = subparsers.add_parser("trajectories", parents=[common], help="Closed-form trajectory bundles")
    trajectories.add_argument("--t-end", type=float, default=1.0, help="Final time (default: 1.0)")
    tdse = subparsers.add_parser("tdse", parents=[common], help="One wave-packet run to the plateau")
    tdse.add_argument("--sigma0", type=float, default=None, help="Width (default: first of the sweep axis)")
    subparsers.add_parser("sweep", parents=[common], help="Full parameter sweep")
    subparsers.add_parser("fig2", parents=[common], help="Sensitivity, slope and shell tables")
    fig3 = subparsers.add_parser("fig3", parents=[common], help="Trajectory bundles and densities")
    fig3.add_argument(
        "--sigma0",
        type=float,
        nargs="+",
        default=list(FIGURE3_SIGMAS),
        help="Widths to simulate (default: 0.15 0.3 0.5)",
    )
    subparsers.add_parser("fig4", parents=[common], help="Estimated vs wave-packet transmission")
    return parser


def apply_overrides(config: Dict[str, Any], args: argparse.Namespace) -> Dict[str, Any]:
    """Layer command-line flags over the file configuration."""
    overrides: Dict[str, Any] = {}
    if args.out:
        overrides.setdefault("output", {})["dir"] = args.out
    if args.seed is not None:
        overrides.setdefault("numerics", {})["seed"] = args.seed
    if args.jobs is not None:
        overrides.setdefault("numerics", {})["jobs"] = args.jobs
    if args.methods:
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        overrides.setdefault("sweep", {})["methods"] = methods
    if args.log_level:
        overrides.setdefault("logging", {})["level"] = args.log_level
    return deep_merge(config, overrides)


def _run_analytic(config: SweepConfig, output_dir: Path, resolved: Dict[str, Any], args) -> None:
    write_table(analytic_table(config), output_dir / "analytic.csv")


def _run_trajectories(config: SweepConfig, output_dir: Path, resolved: Dict[str, Any], args) -> None:
    k = config.numerics.trajectories
    for sigma0 in config.sigma0:
        for alpha in config.alpha:
            for v0 in config.v0:
                times, positions, inits = closed_form_bundle(config, sigma0, alpha, v0, args.t_end, k)
                name = f"trajectories_sigma0_{sigma0:.3f}_alpha_{alpha:g}_v0_{v0:g}.csv"
                write_trajectory_bundle(times, positions, output_dir / name, inits, ["undecided"] * k, resolved)


def _run_tdse(config: SweepConfig, output_dir: Path, resolved: Dict[str, Any], args) -> None:
    sigma0 = args.sigma0 if args.sigma0 is not None else config.sigma0[0]
    packet = config.packet_for(sigma0, config.v0[0])
    spec = default_truncated_ramp(packet, config.alpha[0], config.n[0])
    runner = WavePacketRun(packet, spec, numerics=config.numerics)
    trace = runner.run()
    tag = f"sigma0_{sigma0:.3f}"
    write_trace(trace, output_dir / f"{tag}_trace.csv")
    write_snapshot(runner.initial_state(), output_dir / f"{tag}_density_initial.csv")
    write_snapshot(runner.final_state, output_dir / f"{tag}_density_final.csv")
    write_json(
        {
            "sigma0": sigma0,
            "potential": spec.model_dump(),
            "grid": runner.grid.model_dump(),
            "T_inf": trace.T_inf,
            "t_final": trace.t_final,
        },
        output_dir / f"{tag}_summary.json",
    )
    print(f"T_inf = {trace.T_inf:.6f} at t = {trace.t_final:.3f}")


def _run_sweep(config: SweepConfig, output_dir: Path, resolved: Dict[str, Any], args) -> None:
    write_table(sweep_frame(config, run_sweep(config)), output_dir / "sweep.csv")


def _run_fig2(config: SweepConfig, output_dir: Path, resolved: Dict[str, Any], args) -> None:
    for name, frame in fig2_tables(config).items():
        write_table(frame, output_dir / f"fig2_{name}.csv")


def _run_fig3(config: SweepConfig, output_dir: Path, resolved: Dict[str, Any], args) -> None:
    summaries = figure3_bundle(config, output_dir, args.sigma0, resolved)
    write_json({"runs": summaries}, output_dir / "fig3_summary.json")


def _run_fig4(config: SweepConfig, output_dir: Path, resolved: Dict[str, Any], args) -> None:
    write_table(fig4_table(config), output_dir / "fig4.csv")


HANDLERS = {
    "analytic": _run_analytic,
    "trajectories": _run_trajectories,
    "tdse": _run_tdse,
    "sweep": _run_sweep,
    "fig2": _run_fig2,
    "fig3": _run_fig3,
    "fig4": _run_fig4,
}


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        raw_config = apply_overrides(resolve_config(args.config), args)
    except FileNotFoundError as exc:
        configure_logging()
        logger.error(str(exc))
        return 2
    configure_logging(raw_config.get("logging"), args.log_level)

    try:
        config = SweepConfig.from_config(raw_config)
    except ValidationError as exc:
        logger.error(f"Invalid configuration: {exc}")
        return 2

    try:
        output_dir = ensure_dir(config.output_dir)
        resolved = config.model_dump(mode="json")
        write_run_config(resolved, output_dir)
        HANDLERS[args.command](config, output_dir, resolved, args)
    except (RampTunnelingError, ValueError, OSError) as exc:
        logger.error(f"{args.command} failed: {exc}")
        return 1

    logger.info(f"Results saved to: {output_dir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
