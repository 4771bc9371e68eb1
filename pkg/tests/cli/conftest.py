"""Test fixtures."""
import os

from _pytest.fixtures import fixture

from soliton_forge.emitter import write_profile
from tests import bryant, cleanup_output

CLI_FIXTURES = 'tests/fixtures'


@fixture
def config_fixtures():
    """Directory of config files."""
    return f'{CLI_FIXTURES}/config'


@fixture
def profile_fixtures():
    """Directory of profile files, good and bad."""
    return f'{CLI_FIXTURES}/profile'


@fixture
def output_path():
    """Fixture where to write data."""
    path = f'{CLI_FIXTURES}/cli/output'
    yield path
    cleanup_output(path)


@fixture
def profile():
    """Default Bryant solve."""
    return bryant()


@fixture
def profile_path(output_path, profile):
    """Default solve written as CSV."""
    return write_profile(profile, os.path.join(output_path, 'bryant.csv'))
