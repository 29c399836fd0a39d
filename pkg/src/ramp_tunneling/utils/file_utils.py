"""
Configuration and file helpers.
"""

import copy
import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional, Union

from dotenv import load_dotenv

logger = logging.getLogger(__name__)

CONFIG_ENV_VAR = "RAMP_TUNNEL_CONFIG"
REPOSITORY_CONFIG = Path(__file__).resolve().parents[3] / "config.yaml"

DEFAULT_CONFIG: Dict[str, Any] = {
    "packet": {"x0": 0.0, "p0": 0.0, "mass": 1.0, "hbar": 1.0},
    "sweep": {
        "sigma0": {"start": 0.10, "stop": 0.50, "step": 0.01},
        "alpha": [10.0],
        "n": [6.0],
        "v0": [0.0],
        "methods": ["erfc_estimate"],
    },
    "numerics": {
        "grid_points": 16384,
        "dt": 1.0e-4,
        "t_max": 4.0,
        "sample_interval": 0.01,
        "plateau_window": 0.5,
        "plateau_tolerance": 1.0e-4,
        "boundary_threshold": 1.0e-6,
        "norm_tolerance": 1.0e-6,
        "rho_floor": 1.0e-12,
        "tol": 1.0e-3,
        "scan_points": 64,
        "refine_points": 15,
        "trajectories": 51,
        "mc_samples": 100000,
        "seed": 20100614,
        "jobs": 1,
        "fft_workers": 1,
    },
    "output": {"dir": "output/ramp_tunneling"},
    "logging": {
        "level": "INFO",
        "format": "%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        "file": "",
    },
}


def config_hash(config: Dict[str, Any]) -> str:
    """SHA256 of the canonical JSON form of a configuration."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def load_config(config_path: Union[str, Path]) -> dict:
    """
    Load configuration from a YAML (or JSON) file.

    Args:
        config_path: Path to config file

    Returns:
        Configuration dictionary
    """
    try:
        import yaml

        with open(config_path, "r", encoding="utf-8") as f:
            config = yaml.safe_load(f)

        return config or {}

    except ImportError:
        logger.error("PyYAML not installed. Install with: pip install pyyaml")
        raise
    except Exception as e:
        logger.error(f"Error loading config: {str(e)}")
        raise


def save_config(config: dict, config_path: Union[str, Path]):
    """
    Save configuration to YAML file.

    Args:
        config: Configuration dictionary
        config_path: Path to save config
    """
    import yaml

    config_path = Path(config_path)
    config_path.parent.mkdir(parents=True, exist_ok=True)

    with open(config_path, "w", encoding="utf-8") as f:
        yaml.safe_dump(config, f, default_flow_style=False, sort_keys=True)

    logger.info(f"Config saved to: {config_path}")


def deep_merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Merge override into a copy of base, recursing into nested mappings."""
    merged = copy.deepcopy(base)
    for key, value in (override or {}).items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def resolve_config(config_path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """
    Built-in defaults overlaid with a configuration file.

    The file is config_path when given, otherwise the path in the
    RAMP_TUNNEL_CONFIG environment variable (a .env file is honoured), otherwise
    the repository config.yaml when present.

    Args:
        config_path: Optional explicit configuration file

    Returns:
        Merged configuration dictionary
    """
    load_dotenv()
    candidate = config_path or os.getenv(CONFIG_ENV_VAR)
    if candidate:
        path = Path(candidate)
        if not path.exists():
            raise FileNotFoundError(f"Config file not found: {path}")
    elif REPOSITORY_CONFIG.exists():
        path = REPOSITORY_CONFIG
    else:
        return copy.deepcopy(DEFAULT_CONFIG)

    logger.debug(f"Loading config from {path}")
    return deep_merge(DEFAULT_CONFIG, load_config(path))


def ensure_dir(directory: Union[str, Path]) -> Path:
    """
    Ensure directory exists, create if it doesn't.

    Args:
        directory: Path to directory

    Returns:
        Path object for the directory
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    return directory
