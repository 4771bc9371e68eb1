"""Test configuration files and precedence."""

import pytest
from pydantic import ValidationError

from soliton_forge.common import ConfigError
from soliton_forge.config import ForgeConfig, load_config, parse_config_file


def test_defaults():
    """Missing file that was not asked for means defaults."""
    config = load_config('does/not/exist.cfg')
    assert config == ForgeConfig()
    assert config.rel_tol == 1e-10
    assert config.window == (0.02, 0.98)
    assert config.trial_functions == ['half', 'two_thirds', 'square']
    with pytest.raises(ConfigError, match='not found'):
        load_config('does/not/exist.cfg', explicit=True)


def test_file_values(config_fixtures):
    """Strings from the file are coerced, lists are comma separated."""
    config = load_config(f'{config_fixtures}/valid.cfg', explicit=True)
    assert config.rel_tol == 1e-8
    assert config.psi_nodes == 400
    assert config.trial_functions == ['half', 'square']
    assert config.inequality_radii == [1.0, 5.0]
    assert config.scaled(1e-6) == pytest.approx(1e-4)


def test_precedence(config_fixtures):
    """Flags over file over defaults; unset flags are ignored."""
    config = load_config(f'{config_fixtures}/valid.cfg', psi_nodes=800, rel_tol=None)
    assert config.psi_nodes == 800
    assert config.rel_tol == 1e-8
    assert config.abs_tol == 1e-12


def test_derived(config_fixtures):
    """Solver config and s grid follow the keys."""
    config = load_config(f'{config_fixtures}/valid.cfg')
    assert config.solver_config().rel_tol == 1e-8
    assert len(config.s_grid().nodes) == 400
    assert config.perturbation_spec(0.005).amplitude == 0.005
    assert config.perturbation_spec().amplitude == 0.01


@pytest.mark.parametrize('name, message', [
    ('unknown_key.cfg', 'tolerance'),
    ('duplicate_key.cfg', 'line 3: duplicate key psi_nodes'),
    ('malformed.cfg', 'line 3: expected key = value'),
    ('bad_window.cfg', 'window_low'),
])
def test_bad_files(config_fixtures, name, message):
    """Every problem names its key or line."""
    with pytest.raises(ConfigError, match=message):
        load_config(f'{config_fixtures}/{name}', explicit=True)


def test_parse_comments(config_fixtures):
    """Comments and blank lines are skipped."""
    assert parse_config_file(f'{config_fixtures}/valid.cfg')['rel_tol'] == '1e-8'


def test_bad_values():
    """Validation errors become config errors."""
    with pytest.raises(ConfigError):
        load_config(psi_nodes=4)
    with pytest.raises(ConfigError):
        load_config(trial_functions='half,cubic')
    with pytest.raises(ConfigError):
        load_config(workers=0)
    with pytest.raises(TypeError):
        ForgeConfig().rel_tol = 1.0


def test_bad_perturbation():
    """Perturbation keys are checked when the configuration is built."""
    with pytest.raises(ValidationError, match='perturbation_width'):
        ForgeConfig(perturbation_width=0.0)
    with pytest.raises(ValidationError, match='perturbation_nodes'):
        ForgeConfig(perturbation_nodes=3)
    with pytest.raises(ValidationError, match='perturbation_max_radius'):
        ForgeConfig(perturbation_max_radius=-1.0)
    with pytest.raises(ConfigError, match='perturbation_width'):
        load_config(perturbation_width='0')
    spec = ForgeConfig().perturbation_spec(amplitude=0.02)
    assert spec.amplitude == 0.02
    assert spec.width == 0.5
    assert spec.nodes == 6001
