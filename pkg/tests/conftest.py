import sys
from pathlib import Path

import numpy as np
import pytest

# Add repository root to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from numerics.grid import Grid  # noqa: E402
from quantum.basis import spectral_basis  # noqa: E402
from quantum.potentials import Box, Harmonic  # noqa: E402
from quantum.system import SystemSpec  # noqa: E402


@pytest.fixture
def unit_box():
    """Box well on [0, 1] with 101 nodes."""
    return SystemSpec.from_potential(Grid(0.0, 1.0, 101), Box(), label="box")


@pytest.fixture
def box_basis(unit_box):
    return spectral_basis(unit_box, 4)


@pytest.fixture
def wide_box():
    """Coarse box on [0, 10]; low mode energies, cheap composite grids."""
    return SystemSpec.from_potential(Grid(0.0, 10.0, 32), Box(), label="wide box")


@pytest.fixture
def oscillator():
    return SystemSpec.from_potential(Grid(-8.0, 8.0, 161), Harmonic(), label="oscillator")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
