"""Test fixtures."""
from _pytest.fixtures import fixture

from tests import bryant, bryant_psi


@fixture
def profile():
    """Default Bryant solve."""
    return bryant()


@fixture
def psi():
    """psi extracted from the default solve."""
    return bryant_psi()
