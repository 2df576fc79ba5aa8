import numpy as np
import pytest

from vecsim.channel import FadingQuantizer, Geometry
from vecsim.delays import PhysicalParams
from vecsim.engine import Scenario


@pytest.fixture(scope="session")
def small_scenario() -> Scenario:
    """Six VUEs, the full four-camera physical setup."""
    return Scenario.build(num_vues=6, geometry_seed=123)


@pytest.fixture(scope="session")
def tiny_scenario() -> Scenario:
    """Two VUEs, one camera: small enough for exact enumeration."""
    params = PhysicalParams(num_cameras=1)
    return Scenario.build(num_vues=2, params=params, geometry_seed=7)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240811)


@pytest.fixture(scope="session")
def default_quantizer() -> FadingQuantizer:
    return FadingQuantizer()


@pytest.fixture(scope="session")
def fixed_geometry() -> Geometry:
    return Geometry.sample(num_vues=5, num_cameras=4, geometry_seed=99)
