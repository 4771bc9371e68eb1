"""Test fixtures."""
from _pytest.fixtures import fixture

from soliton_forge.solver import SolverConfig
from tests import bryant


@fixture
def profile():
    """Default Bryant solve."""
    return bryant()


@fixture
def short_config():
    """Stop early, R < 0.1."""
    return SolverConfig(stop_scalar_curvature=0.1)
