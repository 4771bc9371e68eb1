"""Test fixtures."""
from _pytest.fixtures import fixture

from soliton_forge.config import ForgeConfig
from soliton_forge.handlers import SuiteData
from soliton_forge.identities import PerturbationSpec, perturb
from tests import bryant, bryant_psi


@fixture
def profile():
    """Default Bryant solve."""
    return bryant()


@fixture
def psi():
    """psi extracted from the default solve."""
    return bryant_psi()


@fixture
def perturbed(profile):
    """f' bumped by one percent at r = 2."""
    return perturb(profile, PerturbationSpec(target='df', amplitude=0.01))


@fixture
def config():
    """Defaults."""
    return ForgeConfig()


@fixture
def suite_data(profile, psi):
    """Exact soliton with its psi."""
    return SuiteData(profile=profile, psi=psi)
