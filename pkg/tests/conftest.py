import numpy as np
import pytest

from ftconsensus.adaptation import ControllerGains, StepGains
from ftconsensus.config import load_config, shipped_config_path
from ftconsensus.simulate import simulate
from ftconsensus.topology import Topology


@pytest.fixture(scope="session")
def example1_config():
    return load_config(shipped_config_path("example1_passive"))


@pytest.fixture(scope="session")
def example1_trace(example1_config):
    """Full-horizon run shared by the structural and reproduction tests."""
    return simulate(example1_config)


@pytest.fixture
def star_topology():
    return Topology(
        adjacency=np.zeros((3, 3)),
        leader_weights=np.array([1.0, 1.0, 1.0]),
    )


@pytest.fixture
def two_step_gains():
    base = StepGains(k=2.0, kp=1.0, kq=1.0)
    return ControllerGains.uniform(2, base)
