"""Test curvature, B and the divergence theorem."""

from types import SimpleNamespace

import numpy as np
import pytest
from pydantic import ValidationError

from soliton_forge.common import AccuracyError, DomainError, RangeError
from soliton_forge.geometry import (CurvatureArrays, BTensorComponents, RadialField, b_scalar, b_tensor_full, ball_integral,
                                    beta, curvature, divergence_radial, laplacian_radial, node_curvature, radial_state,
                                    sphere_flux, x_radial)
from soliton_forge.identities import flux_field
from soliton_forge.model import CurvatureSample, finite_difference, resample
from soliton_forge.psi import psi_trial, trial_function


def test_sphere_curvature(sphere_profile):
    """Ric = 2 g on the unit sphere."""
    arrays = node_curvature(sphere_profile)
    assert np.max(np.abs(arrays.lam - 2.0)) <= 1e-12
    assert np.max(np.abs(arrays.mu - 2.0)) <= 1e-12
    assert np.max(np.abs(arrays.R - 6.0)) <= 1e-12


def test_cylinder_curvature(cylinder_profile):
    """Flat factor, unit spheres."""
    sample = curvature(cylinder_profile, 3.0)
    assert sample.lambda_ == 0.0
    assert sample.mu == 1.0
    assert sample.R == 2.0


def test_domain_error(cylinder_profile):
    """phi must be positive."""
    flat = cylinder_profile.replace(phi=np.zeros_like(cylinder_profile.r))
    with pytest.raises(DomainError):
        curvature(flat, 3.0)


def test_bryant_curvature(profile):
    """Positive Ricci, R decreasing from 1."""
    arrays = node_curvature(profile)
    assert np.all(arrays.lam > 0)
    assert np.all(arrays.mu > 0)
    assert np.all(np.diff(arrays.R) < 0)
    assert abs(arrays.R[0] - 1.0) <= 1e-5


def test_series_below_first_node(profile):
    """Exact solitons are evaluated from the origin series near r = 0."""
    state = radial_state(profile, [1e-4, 5e-4])
    assert np.all(state.series)
    assert abs(curvature(profile, 1e-4).R - 1.0) <= 1e-7


def test_bryant_b_vanishes(profile):
    """B = 0 at every node."""
    assert np.max(np.abs(b_scalar(profile, profile.r))) <= 1e-7
    assert isinstance(b_scalar(profile, 2.0), float)


def test_dR_matches_finite_difference(profile):
    """Analytic R' against a fourth order difference of R."""
    uniform = resample(profile, np.linspace(1.0, 10.0, 2001))
    arrays = node_curvature(uniform)
    difference = finite_difference(arrays.R, uniform.r)
    assert np.max(np.abs(difference[2:-2] - arrays.dR[2:-2])) <= 1e-6


def test_b_tensor_oracle(random_states):
    """Sum of squares of all 27 components is 4 beta^2."""
    for lam, mu, R, dR, df in random_states:
        sample = CurvatureSample(r=1.0, lambda_=lam, mu=mu, R=R, dR=dR)
        components = b_tensor_full(sample, df)
        value = beta(SimpleNamespace(df=df), CurvatureArrays(lam=lam, mu=mu, R=R, dR=dR))
        expected = 4.0 * value ** 2
        assert abs(components.norm_squared() - expected) <= 1e-12 * max(1.0, expected)


def test_b_tensor_antisymmetric():
    """Last two indices."""
    with pytest.raises(ValidationError, match='antisymmetric'):
        BTensorComponents(components=np.ones((3, 3, 3)))


def _field(k):
    """w(r) = r^2 exp(-r/k)."""
    return RadialField(value=lambda r: r ** 2 * np.exp(-r / k),
                       derivative=lambda r: (2.0 * r - r ** 2 / k) * np.exp(-r / k),
                       name=f"field {k}")


@pytest.mark.parametrize('k', [0.5, 1.0, 2.0, 4.0])
def test_divergence_theorem(profile, k):
    """Integral of div over a shell is the flux difference."""
    field = _field(k)
    a, b = 0.5, 5.0
    integral = ball_integral(profile, lambda r: divergence_radial(profile, field, r), a, b)
    flux = sphere_flux(profile, field, b) - sphere_flux(profile, field, a)
    assert abs(integral - flux) <= 1e-8 * (1.0 + abs(flux))


def test_ball_from_origin(profile):
    """Volume of a small ball follows the origin series of phi."""
    volume = ball_integral(profile, lambda r: np.ones_like(r), 0.0, 0.1)
    expected = 4.0 * np.pi * (0.1 ** 3 / 3.0 - 0.1 ** 5 / 90.0)
    assert abs(volume - expected) <= 1e-6 * expected


def test_ball_integral_range(profile):
    """a < b <= last node."""
    with pytest.raises(RangeError):
        ball_integral(profile, lambda r: np.ones_like(r), 2.0, 1.0)
    with pytest.raises(RangeError):
        ball_integral(profile, lambda r: np.ones_like(r), 0.0, 2.0 * profile.r[-1])


def _random_field(rng):
    """w(r) = (c0 + c1 r + c2 r^2) r^2 exp(-r/k) with random coefficients."""
    c0, c1, c2 = rng.uniform(-1.0, 1.0, size=3)
    k = rng.uniform(0.5, 4.0)

    def value(r):
        return (c0 + c1 * r + c2 * r ** 2) * r ** 2 * np.exp(-r / k)

    def derivative(r):
        poly = c0 + c1 * r + c2 * r ** 2
        return ((c1 + 2.0 * c2 * r) * r ** 2 + poly * (2.0 * r - r ** 2 / k)) * np.exp(-r / k)

    return RadialField(value=value, derivative=derivative, name=f"random {k:.3f}")


def test_divergence_theorem_random_fields(profile):
    """Twenty random fields on shells and on balls from the origin."""
    rng = np.random.default_rng(7)
    for _ in range(20):
        field = _random_field(rng)
        a, b = sorted(rng.uniform(0.0, 8.0, size=2))
        integral = ball_integral(profile, lambda r: divergence_radial(profile, field, r), a, b)
        flux = sphere_flux(profile, field, b) - sphere_flux(profile, field, a)
        assert abs(integral - flux) <= 1e-8 * (1.0 + abs(flux)), field.name


def test_weighted_flux_difference(profile):
    """Flux of e^u X through two spheres differs by the integral of its divergence."""
    field = flux_field(profile, trial_function('half'))
    a, b = 1.0, 5.0
    integral = ball_integral(profile, lambda r: divergence_radial(profile, field, r), a, b)
    flux = sphere_flux(profile, field, b) - sphere_flux(profile, field, a)
    assert abs(integral - flux) <= 1e-7 * abs(flux)


def test_ball_integral_not_converging(profile):
    """An integrand quad cannot resolve is an AccuracyError, not a number."""
    with pytest.raises(AccuracyError) as error:
        ball_integral(profile, lambda r: np.sin(1e7 * r), 1.0, 1.1)
    assert error.value.estimate is not None


def test_x_radial_vanishes_for_psi(profile, psi):
    """X = 0 at every node whose R lies on the psi grid or above it."""
    keep = node_curvature(profile).R >= psi.s_nodes[0]
    r = profile.r[keep]
    assert len(r) > 100
    assert np.max(np.abs(x_radial(profile, psi_trial(psi), r))) <= 1e-7


def test_x_radial_without_psi(profile):
    """psi = 0 leaves R'."""
    arrays = node_curvature(profile)
    assert np.array_equal(x_radial(profile, lambda s: 0.0 * s, profile.r), arrays.dR)


def test_x_radial_half(profile, psi):
    """For psi = s/2, X = (R/2 - psi(R)) f' since R' = -psi(R) f'."""
    arrays = node_curvature(profile)
    keep = arrays.R >= psi.s_nodes[0]
    r, R = profile.r[keep], arrays.R[keep]
    expected = (0.5 * R - psi.psi_extended(R)) * profile.df[keep]
    assert np.max(np.abs(x_radial(profile, trial_function('half'), r) - expected)) <= 1e-7


def test_laplacian(sphere_profile):
    """Laplacian of cos r on the unit sphere is -3 cos r."""
    h = RadialField(value=np.cos, derivative=lambda r: -np.sin(r), second_derivative=lambda r: -np.cos(r))
    r = sphere_profile.r[10:-10]
    assert np.max(np.abs(laplacian_radial(sphere_profile, h, r) + 3.0 * np.cos(r))) <= 1e-12
    with pytest.raises(ValueError):
        laplacian_radial(sphere_profile, _field(1.0), 1.0)
