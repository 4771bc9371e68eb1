"""Pointwise operators for g = dr^2 + phi(r)^2 g_S2 with a radial potential f.

Every operator accepts a scalar radius or an array of radii.  On exact soliton
profiles radii below the first node are evaluated from the origin series.
"""

import itertools
import logging
from typing import Callable, NamedTuple, Optional

import numpy as np
from pydantic import BaseModel, validator
from scipy.integrate import quad

from soliton_forge.common import AccuracyError, DomainError, RangeError, first_occurrence
from soliton_forge.model import CurvatureSample, SolitonProfile

logger = logging.getLogger(__name__)

FOUR_PI = 4.0 * np.pi
PANEL_NODES = 32
"""Node intervals per quadrature panel."""


class RadialState(NamedTuple):
    """Profile state and derivatives at a set of radii."""

    r: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    w: np.ndarray
    """1 - phi'."""
    ddphi: np.ndarray
    dddphi: np.ndarray
    ddddphi: np.ndarray
    df: np.ndarray
    ddf: np.ndarray
    dddf: np.ndarray
    series: np.ndarray
    """Mask of radii taken from the origin series."""


class CurvatureArrays(NamedTuple):
    """lambda, mu, R and R' at a set of radii."""

    lam: np.ndarray
    mu: np.ndarray
    R: np.ndarray
    dR: np.ndarray


def uses_series(profile: SolitonProfile) -> bool:
    """Can radii below the first node be served from the origin series?"""
    return profile.is_exact_soliton and profile.origin_data is not None


def radial_state(profile: SolitonProfile, r) -> RadialState:
    """Evaluate the state, from the origin series below the first node of exact profiles."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    series = np.zeros(r.shape, dtype=bool)
    if uses_series(profile):
        series = (r < profile.r[0]) & (r >= 0)
    columns = {name: np.empty(r.shape) for name in RadialState._fields if name not in ('r', 'series')}
    if np.any(series):
        origin = profile.origin_data
        rs = r[series]
        for name in ['phi', 'dphi', 'ddphi', 'dddphi', 'ddddphi', 'df', 'ddf', 'dddf']:
            columns[name][series] = getattr(origin, name)(rs)
        columns['w'][series] = origin.one_minus_dphi(rs)
    inside = ~series
    if np.any(inside):
        sample = profile.eval(r[inside])
        higher = profile.eval_higher(r[inside], sample)
        for name in ['phi', 'dphi', 'ddphi', 'df', 'ddf']:
            columns[name][inside] = getattr(sample, name)
        for name in ['dddphi', 'ddddphi', 'dddf']:
            columns[name][inside] = getattr(higher, name)
        columns['w'][inside] = 1.0 - sample.dphi
    return RadialState(r=r, series=series, **columns)


def _check_domain(state: RadialState) -> None:
    bad = ~(state.phi > 0) & ~state.series
    if np.any(bad):
        raise DomainError(f"phi <= 0 at r={state.r[bad][0]}")


def geometric_dR(state: RadialState) -> np.ndarray:
    """R' by differentiating R = -4 phi''/phi + 2 (1 - phi'^2)/phi^2."""
    one_minus = state.w * (2.0 - state.w)
    return -4.0 * state.dddphi / state.phi - 4.0 * one_minus * state.dphi / state.phi ** 3


def geometric_ddR(state: RadialState) -> np.ndarray:
    """R'' by differentiating R twice."""
    one_minus = state.w * (2.0 - state.w)
    phi = state.phi
    return (-4.0 * state.ddddphi / phi + 4.0 * state.dddphi * state.dphi / phi ** 2
            - 4.0 * state.ddphi * (1.0 - 3.0 * state.dphi ** 2) / phi ** 3
            + 12.0 * one_minus * state.dphi ** 2 / phi ** 4)


def state_curvature(profile: SolitonProfile, state: RadialState) -> CurvatureArrays:
    """Ricci eigenvalues, R and R' from a state.

    Exact soliton profiles use mu = f' phi'/phi and R' = -2 lambda f', which the
    soliton equations make equal to the geometric forms and which stay well
    conditioned at small r.
    """
    _check_domain(state)
    with np.errstate(divide='ignore', invalid='ignore'):
        lam = -2.0 * state.ddphi / state.phi
        if profile.is_exact_soliton:
            mu = state.df * state.dphi / state.phi
        else:
            mu = -state.ddphi / state.phi + state.w * (2.0 - state.w) / state.phi ** 2
    if np.any(state.series):
        origin = profile.origin_data
        rs = state.r[state.series]
        lam[state.series] = -2.0 * origin.ddphi_over_phi(rs)
        mu[state.series] = origin.spherical_ratio(rs)
    R = lam + 2.0 * mu
    if profile.is_exact_soliton:
        dR = -2.0 * lam * state.df
    else:
        dR = geometric_dR(state)
    return CurvatureArrays(lam=lam, mu=mu, R=R, dR=dR)


def state_ddR(profile: SolitonProfile, state: RadialState, curvature: CurvatureArrays) -> np.ndarray:
    """R''; on exact solitons from R' = -2 lambda f' and lambda' = f'''."""
    if profile.is_exact_soliton:
        return -2.0 * (state.dddf * state.df + curvature.lam * state.ddf)
    return geometric_ddR(state)


def node_curvature(profile: SolitonProfile) -> CurvatureArrays:
    """Curvature at every node."""
    return state_curvature(profile, radial_state(profile, profile.r))


def curvature(profile: SolitonProfile, r: float) -> CurvatureSample:
    """lambda, mu, R and R' at one radius."""
    arrays = state_curvature(profile, radial_state(profile, r))
    return CurvatureSample(r=float(r), lambda_=float(arrays.lam[0]), mu=float(arrays.mu[0]), R=float(arrays.R[0]),
                           dR=float(arrays.dR[0]))


def beta(state: RadialState, arrays: CurvatureArrays) -> np.ndarray:
    """beta = mu f' - (R' + 2 R f')/4."""
    return arrays.mu * state.df - 0.25 * (arrays.dR + 2.0 * arrays.R * state.df)


def b_scalar(profile: SolitonProfile, r):
    """The single independent component of B; |B|^2 = 4 beta^2."""
    state = radial_state(profile, r)
    values = beta(state, state_curvature(profile, state))
    return float(values[0]) if np.ndim(r) == 0 else values


class BTensorComponents(BaseModel):
    """B[i][j][k] in the orthonormal frame (e_r, e_1, e_2)."""

    components: np.ndarray

    class Config:
        """Allow numpy fields."""

        arbitrary_types_allowed = True
        allow_mutation = False

    @validator('components', pre=True)
    def _antisymmetric(cls, components):
        components = np.array(components, dtype=float)
        if components.shape != (3, 3, 3):
            raise ValueError(f"expected 3x3x3 components, got {components.shape}")
        scale = max(1.0, float(np.abs(components).max()))
        if not np.allclose(components, -np.swapaxes(components, 1, 2), rtol=0, atol=1e-14 * scale):
            raise ValueError("B must be antisymmetric in its last two indices")
        components.setflags(write=False)
        return components

    def norm_squared(self) -> float:
        """Sum of squares of the 27 components."""
        return float(np.sum(self.components ** 2))


def b_tensor_full(sample: CurvatureSample, f_prime: float) -> BTensorComponents:
    """All 27 components straight from the definition, Ric = diag(lambda, mu, mu)."""
    ricci = np.diag([sample.lambda_, sample.mu, sample.mu])
    grad_f = np.array([f_prime, 0.0, 0.0])
    grad_r = np.array([sample.dR, 0.0, 0.0])
    metric = np.eye(3)
    components = np.zeros((3, 3, 3))
    for i, j, k in itertools.product(range(3), repeat=3):
        components[i, j, k] = (ricci[i, k] * grad_f[j] - ricci[i, j] * grad_f[k]
                               - 0.25 * ((grad_r[j] + 2.0 * sample.R * grad_f[j]) * metric[i, k]
                                         - (grad_r[k] + 2.0 * sample.R * grad_f[k]) * metric[i, j]))
    return BTensorComponents(components=components)


class RadialField(BaseModel):
    """A radial function with derivatives, e.g. the component X_r."""

    value: Callable
    derivative: Callable
    second_derivative: Optional[Callable] = None
    name: str = 'field'

    class Config:
        """Allow callables."""

        arbitrary_types_allowed = True

    def __call__(self, r):
        return self.value(r)


def _ratio(profile: SolitonProfile, r) -> tuple:
    """phi'/phi, with its state."""
    state = radial_state(profile, r)
    _check_domain(state)
    return state.dphi / state.phi, state


def x_radial(profile: SolitonProfile, psi_fn: Callable, r):
    """X_r = R' + psi(R) f'."""
    state = radial_state(profile, r)
    arrays = state_curvature(profile, state)
    values = arrays.dR + evaluate_psi(psi_fn, arrays.R) * state.df
    return float(values[0]) if np.ndim(r) == 0 else values


def evaluate_psi(psi_fn: Callable, s: np.ndarray) -> np.ndarray:
    """Evaluate psi_fn, turning range problems into DomainError naming s."""
    domain = getattr(psi_fn, 'domain', None)
    if domain is not None:
        outside = (s < domain[0]) | (s > domain[1])
        if np.any(outside):
            raise DomainError(f"psi undefined at s={s[outside][0]}, domain is [{domain[0]}, {domain[1]}]")
    try:
        return np.asarray(psi_fn(s), dtype=float) * np.ones_like(s)
    except RangeError as range_error:
        raise DomainError(f"psi undefined: {range_error}") from range_error


def divergence_radial(profile: SolitonProfile, field: RadialField, r):
    """div(w d/dr) = w' + 2 (phi'/phi) w."""
    ratio, state = _ratio(profile, r)
    values = field.derivative(state.r) + 2.0 * ratio * field.value(state.r)
    return float(values[0]) if np.ndim(r) == 0 else values


def laplacian_radial(profile: SolitonProfile, scalar: RadialField, r):
    """h'' + 2 (phi'/phi) h'."""
    if scalar.second_derivative is None:
        raise ValueError(f"{scalar.name} has no second derivative")
    ratio, state = _ratio(profile, r)
    values = scalar.second_derivative(state.r) + 2.0 * ratio * scalar.derivative(state.r)
    return float(values[0]) if np.ndim(r) == 0 else values


def sphere_flux(profile: SolitonProfile, field: RadialField, r):
    """Area of the r-sphere times the radial component."""
    state = radial_state(profile, r)
    values = FOUR_PI * state.phi ** 2 * field.value(state.r)
    return float(values[0]) if np.ndim(r) == 0 else values


def ball_integral(profile: SolitonProfile, scalar: Callable, a: float, b: float, rel_tol: float = 1e-10,
                  abs_tol: float = 1e-15) -> float:
    """Integral of 4 pi phi^2 h over [a, b].

    Adaptive quadrature on panels of PANEL_NODES node intervals, with the
    nodes inside each panel passed as break points.
    """
    if not a < b:
        raise RangeError(f"need a < b, got [{a}, {b}]")
    low, high = profile.interval
    if b > high:
        raise RangeError(f"b={b} beyond last node {high}")
    if a < low and not uses_series(profile):
        if first_occurrence(f"ball integral starts at first node {low}"):
            logger.warning(f"ball integral starts at first node {low}, requested {a}")
        a = low
    inner = profile.r[(profile.r > a) & (profile.r < b)]
    edges = np.concatenate([[a], inner, [b]])

    def integrand(r):
        state = radial_state(profile, r)
        return float(FOUR_PI * state.phi[0] ** 2 * np.ravel(scalar(state.r))[0])

    total, estimate = 0.0, 0.0
    for start in range(0, len(edges) - 1, PANEL_NODES):
        panel = edges[start:start + PANEL_NODES + 1]
        lo, hi = panel[0], panel[-1]
        points = panel[1:-1]
        result = quad(integrand, lo, hi, epsabs=abs_tol * (hi - lo) / (b - a), epsrel=rel_tol,
                      points=points if len(points) else None, limit=50 + 4 * len(points), full_output=1)
        if len(result) > 3:
            raise AccuracyError(f"ball integral over [{lo}, {hi}] did not converge: {result[3]}",
                                estimate=float(estimate + result[1]))
        total += result[0]
        estimate += result[1]
    logger.debug(f"ball integral over [{a}, {b}]: {len(edges) - 1} node intervals, estimate {estimate:.3g}")
    return float(total)
