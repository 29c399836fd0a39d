"""Utilities module initialization."""

from .file_utils import (
    DEFAULT_CONFIG,
    config_hash,
    deep_merge,
    ensure_dir,
    load_config,
    resolve_config,
    save_config,
)
from .io_utils import (
    write_json,
    write_run_config,
    write_snapshot,
    write_table,
    write_trace,
    write_trajectory_bundle,
)
from .logging_utils import configure_logging

__all__ = [
    "DEFAULT_CONFIG",
    "config_hash",
    "configure_logging",
    "deep_merge",
    "ensure_dir",
    "load_config",
    "resolve_config",
    "save_config",
    "write_json",
    "write_run_config",
    "write_snapshot",
    "write_table",
    "write_trace",
    "write_trajectory_bundle",
]
