"""Test grids, profiles and residual summaries."""

import json

import numpy as np
import pytest
from pydantic import ValidationError

from soliton_forge.common import RangeError
from soliton_forge.model import (OriginSeries, RadialGrid, ResidualStats, SolitonProfile, VerificationReport,
                                 eval_profile, finite_difference, resample, second_difference, validate_profile)
from tests import bryant


def test_grid_rejects_bad_nodes():
    """Too few, not increasing, not positive."""
    with pytest.raises(ValidationError):
        RadialGrid(nodes=np.linspace(0.1, 1.0, 8))
    nodes = np.linspace(0.1, 1.0, 20)
    nodes[5] = nodes[4]
    with pytest.raises(ValidationError, match='nodes not increasing'):
        RadialGrid(nodes=nodes)
    with pytest.raises(ValidationError):
        RadialGrid(nodes=np.linspace(-1.0, 1.0, 20))


def test_profile_rejects_column_mismatch(nodes):
    """Every column has one sample per node."""
    with pytest.raises(ValidationError, match='phi has'):
        SolitonProfile(grid=RadialGrid(nodes=nodes), phi=nodes[:-1], dphi=np.ones_like(nodes),
                       ddphi=np.zeros_like(nodes), df=nodes, ddf=np.ones_like(nodes))


def test_profile_is_read_only(flat_profile):
    """Columns can not be changed in place."""
    with pytest.raises(ValueError):
        flat_profile.phi[0] = 1.0


def test_eval_linear_is_exact(flat_profile, nodes):
    """Cubic Hermite reproduces linear data."""
    midpoints = 0.5 * (nodes[:-1] + nodes[1:])
    sample = eval_profile(flat_profile, midpoints)
    assert np.max(np.abs(sample.phi - midpoints)) <= 1e-12
    assert np.max(np.abs(sample.df - midpoints / 3.0)) <= 1e-12
    scalar = flat_profile.eval(0.55)
    assert isinstance(scalar.phi, float)
    assert abs(scalar.phi - 0.55) <= 1e-12


def test_eval_at_nodes_is_bitwise(flat_profile, nodes):
    """Stored values come back untouched."""
    sample = flat_profile.eval(nodes)
    assert np.array_equal(sample.phi, flat_profile.phi)
    assert np.array_equal(sample.ddf, flat_profile.ddf)


def test_eval_outside_raises(flat_profile):
    """Range is the node interval."""
    with pytest.raises(RangeError):
        flat_profile.eval(0.05)
    with pytest.raises(RangeError):
        flat_profile.eval([1.0, 6.0])


def test_resample_keeps_values(flat_profile):
    """Linear data survives resampling."""
    finer = resample(flat_profile, np.linspace(0.1, 5.0, 101))
    assert len(finer.grid) == 101
    assert np.max(np.abs(finer.phi - finer.r)) <= 1e-12
    assert finer.is_exact_soliton == flat_profile.is_exact_soliton


def test_resample_bryant_twice_finer():
    """Halving the spacing of the Bryant profile moves no value by more than 1e-9 relative."""
    profile = bryant()
    nodes = profile.r[profile.r <= 5.0]
    finer = resample(profile, np.sort(np.concatenate([nodes, 0.5 * (nodes[:-1] + nodes[1:])])))
    assert finer.is_exact_soliton
    quarter = 0.75 * nodes[:-1] + 0.25 * nodes[1:]
    for r in [nodes[:-1], quarter]:
        before, after = profile.eval(r), finer.eval(r)
        for column in ['phi', 'dphi', 'df', 'ddphi', 'ddf']:
            old, new = getattr(before, column), getattr(after, column)
            assert np.max(np.abs(new - old) / np.maximum(np.abs(old), 1e-3)) <= 1e-9, column


def test_restrict_and_replace(flat_profile):
    """Copies are validated."""
    assert len(flat_profile.restrict(20).grid) == 20
    flagged = flat_profile.replace(is_exact_soliton=True, origin_data=OriginSeries(seed_radius=0.1))
    assert flagged.is_exact_soliton
    assert not flat_profile.is_exact_soliton


def test_finite_differences():
    """Fourth order stencils on a uniform grid."""
    nodes = np.linspace(0.0, 1.0, 201)
    first = finite_difference(np.sin(nodes), nodes)
    second = second_difference(np.sin(nodes), nodes)
    assert np.max(np.abs(first[2:-2] - np.cos(nodes[2:-2]))) <= 1e-9
    assert np.max(np.abs(second[2:-2] + np.sin(nodes[2:-2]))) <= 1e-7


def test_validate_profile(flat_profile, negative_profile):
    """Only phi > 0 applies to profiles that are not exact solitons."""
    assert validate_profile(flat_profile) == []
    violations = validate_profile(negative_profile)
    assert violations
    assert all(violation.invariant == 'phi > 0' for violation in violations)
    assert violations[0].node == 0
    assert 'phi > 0 at node 0' in str(violations[0])


def test_origin_series():
    """Series and its derivatives agree with each other."""
    origin = OriginSeries(seed_radius=1e-3)
    r = 0.01
    assert abs(origin.dphi(r) - (1.0 - origin.one_minus_dphi(r))) <= 1e-15
    assert abs(origin.spherical_ratio(r) - origin.df(r) * origin.dphi(r) / origin.phi(r)) <= 1e-12
    assert origin.remainder(1e-3) < 1e-12


def test_residual_stats():
    """pass is max_abs <= threshold."""
    stats = ResidualStats.from_residuals('EQ_GRAD_R', [1e-9, -3e-9, 2e-9], threshold=1e-8)
    assert stats.passed
    assert stats.max_abs == 3e-9
    assert stats.n_samples == 3
    assert abs(stats.rms - np.sqrt(14e-18 / 3)) <= 1e-20
    failed = ResidualStats.from_residuals('EQ_GRAD_R', [1.0], threshold=1e-8)
    assert not failed.passed
    with pytest.raises(ValidationError, match='pass must equal'):
        ResidualStats(name='x', max_abs=1.0, rms=1.0, n_samples=1, threshold=0.5, passed=True)


def test_residual_stats_edges():
    """Empty residuals pass, NaN never does."""
    empty = ResidualStats.from_residuals('EQ_FINAL', [], threshold=1e-6)
    assert empty.passed and empty.n_samples == 0
    broken = ResidualStats.from_residuals('EQ_FINAL', [0.0, float('nan')], threshold=1e-6)
    assert not broken.passed


def test_residual_stats_merge():
    """Counts add, max is the larger one."""
    a = ResidualStats.from_residuals('EQ_GENERAL', [1.0, 1.0], threshold=2.0)
    b = ResidualStats.from_residuals('EQ_GENERAL', [3.0, 3.0], threshold=2.0)
    merged = a.merge(b)
    assert merged.n_samples == 4
    assert merged.max_abs == 3.0
    assert abs(merged.rms - np.sqrt(5.0)) <= 1e-12
    assert not merged.passed


def test_report_json():
    """Report names, overall pass computed."""
    checks = [ResidualStats.from_residuals('FIRST_INTEGRAL', [1e-10], 1e-8),
              ResidualStats.from_residuals('EQ_GRAD_R', [1e-3], 1e-6)]
    report = VerificationReport(config={'rel_tol': 1e-10}, checks=checks)
    assert not report.passed
    assert report.check('EQ_GRAD_R').max_abs == 1e-3
    document = json.loads(report.to_json())
    assert document['version'] == 1
    assert document['pass'] is False
    assert [check['id'] for check in document['checks']] == ['FIRST_INTEGRAL', 'EQ_GRAD_R']
    assert set(document['checks'][0]) == {'id', 'max_abs', 'rms', 'n_samples', 'threshold', 'pass'}
    assert VerificationReport.parse_obj(document) == report
