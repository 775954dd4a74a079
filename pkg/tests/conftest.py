import numpy as np
import pytest

from anisons.inequalities import random_divfree_band
from anisons.lattice import GridSpec, build_lattice
from anisons.symbol import MultiplierIndices

THEOREM = MultiplierIndices(1.5, 1.0, 1.25)
ISOTROPIC = MultiplierIndices(1.0, 1.0, 1.0)


@pytest.fixture(scope="session")
def grid16():
    return GridSpec.cube(16)


@pytest.fixture(scope="session")
def lat16(grid16):
    return build_lattice(grid16)


@pytest.fixture(scope="session")
def divfree16(grid16):
    """Twenty band-limited divergence-free velocities on 16^3."""
    return [random_divfree_band([11, i], grid16, k_max=5) for i in range(20)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
