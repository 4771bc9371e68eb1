"""Test fixtures."""
import numpy as np
from _pytest.fixtures import fixture

from soliton_forge.model import RadialGrid, SolitonProfile


@fixture
def nodes():
    """Uneven radii."""
    return np.concatenate([np.linspace(0.1, 1.0, 10), np.linspace(1.25, 5.0, 16)])


@fixture
def flat_profile(nodes):
    """Euclidean space, phi = r, f' = r/3."""
    return SolitonProfile(grid=RadialGrid(nodes=nodes), phi=nodes, dphi=np.ones_like(nodes),
                          ddphi=np.zeros_like(nodes), df=nodes / 3.0, ddf=np.full_like(nodes, 1.0 / 3.0))


@fixture
def negative_profile(nodes):
    """phi crosses zero."""
    phi = nodes - 2.0
    return SolitonProfile(grid=RadialGrid(nodes=nodes), phi=phi, dphi=np.ones_like(nodes),
                          ddphi=np.zeros_like(nodes), df=nodes / 3.0, ddf=np.full_like(nodes, 1.0 / 3.0))
