"""Test configuration."""

import sys
from pathlib import Path

import pytest

# Add src directory to path for imports
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))
sys.path.insert(0, str(src_path.parent))

from src.ramp_tunneling.contracts import GaussianPacket, NumericControls, RampSpec  # noqa: E402


@pytest.fixture
def narrow_packet() -> GaussianPacket:
    """Packet at rest with sigma0 = 0.15 (natural units)."""
    return GaussianPacket(x0=0.0, p0=0.0, sigma0=0.15)


@pytest.fixture
def wide_packet() -> GaussianPacket:
    return GaussianPacket(x0=0.0, p0=0.0, sigma0=0.5)


@pytest.fixture
def ramp() -> RampSpec:
    return RampSpec(alpha=10.0)


@pytest.fixture
def quick_numerics() -> NumericControls:
    """Coarse controls for short propagations on explicit grids."""
    return NumericControls(grid_points=4096, dt=1.0e-3, sample_interval=0.01, t_max=1.0)
