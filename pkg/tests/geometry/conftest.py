"""Test fixtures."""
import numpy as np
from _pytest.fixtures import fixture

from soliton_forge.model import RadialGrid, SolitonProfile
from tests import bryant, bryant_psi


@fixture
def sphere_profile():
    """Unit round sphere, phi = sin r, potential f' = r."""
    nodes = np.linspace(0.2, 2.8, 131)
    return SolitonProfile(grid=RadialGrid(nodes=nodes), phi=np.sin(nodes), dphi=np.cos(nodes),
                          ddphi=-np.sin(nodes), df=nodes, ddf=np.ones_like(nodes))


@fixture
def cylinder_profile():
    """Round cylinder, phi = 1."""
    nodes = np.linspace(0.5, 10.0, 96)
    return SolitonProfile(grid=RadialGrid(nodes=nodes), phi=np.ones_like(nodes), dphi=np.zeros_like(nodes),
                          ddphi=np.zeros_like(nodes), df=np.zeros_like(nodes), ddf=np.zeros_like(nodes))


@fixture
def profile():
    """Default Bryant solve."""
    return bryant()


@fixture
def random_states():
    """lambda, mu, R, R', f' drawn independently."""
    rng = np.random.default_rng(20221018)
    return rng.uniform(-2.0, 2.0, size=(1000, 5))


@fixture
def psi():
    """psi of the default solve."""
    return bryant_psi()
