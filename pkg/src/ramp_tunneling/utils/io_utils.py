"""
CSV and JSON writers for run outputs.

All tables share one format (header row, comma delimiter, %.12e floats, LF
line endings), so identical inputs give byte-identical files.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel

from ..contracts import PacketState, TransmissionTrace
from .file_utils import config_hash, ensure_dir

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.12e"


def write_table(frame: pd.DataFrame, path: Union[str, Path]) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.info(f"Wrote {len(frame)} rows to {path}")
    return path


def rows_to_frame(rows: Iterable[BaseModel], columns: Sequence[str] = ()) -> pd.DataFrame:
    """Table of pydantic rows; enum values are written by value."""
    records = [row.model_dump(mode="json") for row in rows]
    frame = pd.DataFrame.from_records(records)
    if columns:
        frame = frame.reindex(columns=list(columns))
    return frame


def write_json(payload: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    ensure_dir(path.parent)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=str)
        f.write("\n")
    return path


def write_run_config(config: Dict[str, Any], output_dir: Union[str, Path]) -> Path:
    """Echo the fully resolved configuration next to the outputs."""
    payload = {"config": config, "config_sha256": config_hash(config)}
    return write_json(payload, Path(output_dir) / "run_config.json")


def write_trace(trace: TransmissionTrace, path: Union[str, Path]) -> Path:
    frame = pd.DataFrame({"t": trace.times, "T": trace.T_of_t})
    return write_table(frame, path)


def write_snapshot(state: PacketState, path: Union[str, Path]) -> Path:
    """Wavefunction snapshot with columns x, re_psi, im_psi, rho."""
    frame = pd.DataFrame(
        {
            "x": state.grid.x,
            "re_psi": state.amplitudes.real,
            "im_psi": state.amplitudes.imag,
            "rho": state.density(),
        }
    )
    return write_table(frame, path)


def write_trajectory_bundle(
    times: Sequence[float],
    positions: np.ndarray,
    path: Union[str, Path],
    inits: Sequence[float],
    fates: List[str],
    config: Dict[str, Any],
) -> Path:
    """
    Trajectory bundle as CSV (t, x_1..x_K) with a JSON sidecar.

    Args:
        times: Sample times
        positions: Array of shape (len(times), K)
        path: CSV path; the sidecar replaces the suffix with .json
        inits: Initial positions, in column order
        fates: Fate label per trajectory
        config: Resolved configuration echoed into the sidecar

    Returns:
        Path of the CSV file
    """
    positions = np.asarray(positions, dtype=float)
    frame = pd.DataFrame(positions, columns=[f"x_{i + 1}" for i in range(positions.shape[1])])
    frame.insert(0, "t", np.asarray(times, dtype=float))
    path = write_table(frame, path)
    write_json(
        {
            "inits": [float(x) for x in inits],
            "fates": list(fates),
            "config": config,
            "config_sha256": config_hash(config),
        },
        path.with_suffix(".json"),
    )
    return path
