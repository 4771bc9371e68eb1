"""Residuals of the soliton identities, the weighted flux and the integral inequality, plus perturbations."""

import logging
from enum import Enum
from math import comb
from typing import Callable, Dict, List, Literal, NamedTuple, Tuple, Union

import numpy as np
from numpy.polynomial.hermite_e import hermeval
from pydantic import BaseModel, validator

from soliton_forge.common import PerturbationError, UsageError
from soliton_forge.geometry import (FOUR_PI, RadialField, RadialState, ball_integral, beta, evaluate_psi, geometric_dR,
                                    geometric_ddR, node_curvature, radial_state, sphere_flux, state_curvature,
                                    state_ddR)
from soliton_forge.model import Cascade, PsiProfile, RadialGrid, ResidualStats, SolitonProfile
from soliton_forge.psi import TrialFunction, ode_residuals, pointwise_psi, psi_trial

logger = logging.getLogger(__name__)


class IdentityId(str, Enum):
    """Identities checked pointwise over a window of the profile."""

    EQ_GRAD_R = 'EQ_GRAD_R'
    EQ_LAP_R = 'EQ_LAP_R'
    EQ_B_NORM = 'EQ_B_NORM'
    EQ_GENERAL = 'EQ_GENERAL'
    EQ_ODE = 'EQ_ODE'
    EQ_SIMPLIFIED = 'EQ_SIMPLIFIED'
    EQ_FINAL = 'EQ_FINAL'
    EQ_ODE2 = 'EQ_ODE2'
    FLUX_DECAY = 'FLUX_DECAY'
    DIV_INEQUALITY = 'DIV_INEQUALITY'


POINTWISE_IDS = [IdentityId.EQ_GRAD_R, IdentityId.EQ_LAP_R, IdentityId.EQ_B_NORM, IdentityId.EQ_GENERAL,
                 IdentityId.EQ_ODE, IdentityId.EQ_ODE2, IdentityId.EQ_SIMPLIFIED, IdentityId.EQ_FINAL]
NEEDS_PSI = {IdentityId.EQ_GENERAL, IdentityId.EQ_SIMPLIFIED, IdentityId.EQ_FINAL}

PsiLike = Union[PsiProfile, TrialFunction, None]


class PerturbationSpec(BaseModel):
    """Multiplicative Gaussian bump 1 + amplitude exp(-(r - center)^2 / (2 width^2))."""

    target: Literal['df', 'phi'] = 'df'
    amplitude: float = 0.01
    center: float = 2.0
    width: float = 0.5
    nodes: int = 6001
    """Uniform resample size."""
    max_radius: float = 60.0
    """Resample stops here or at the last node."""

    class Config:
        """Immutable, no unknown keys."""

        allow_mutation = False
        extra = 'forbid'

    @validator('width', 'max_radius')
    def _positive(cls, value, field):
        if not value > 0:
            raise ValueError(f"{field.name} must be positive, got {value}")
        return value

    @validator('nodes')
    def _enough(cls, value):
        if value < 16:
            raise ValueError(f"nodes must be at least 16, got {value}")
        return value

    def bump(self, r: np.ndarray, order: int = 2) -> Tuple[np.ndarray, ...]:
        """The factor and its first `order` derivatives.

        With y = (r - center) / width the n-th derivative of the Gaussian is
        (-1/width)^n He_n(y) times the Gaussian, He_n the probabilists' Hermite polynomial.
        """
        y = (r - self.center) / self.width
        gauss = self.amplitude * np.exp(-0.5 * y ** 2)
        factors = [1.0 + gauss]
        for n in range(1, order + 1):
            factors.append((-1.0 / self.width) ** n * hermeval(y, [0.0] * n + [1.0]) * gauss)
        return tuple(factors)


def _leibniz(columns: List[np.ndarray], factors: Tuple[np.ndarray, ...]) -> List[np.ndarray]:
    """Derivatives of (column * factor) from the derivatives of both."""
    return [sum(comb(n, k) * columns[n - k] * factors[k] for k in range(n + 1)) for n in range(len(columns))]


def perturb(profile: SolitonProfile, spec: PerturbationSpec) -> SolitonProfile:
    """Bump one field on a uniform resample.

    Every stored derivative, up to phi'''' and f''', is the product rule
    applied to the source derivatives and the exact bump derivatives, so
    amplitude 0 is a plain resample.
    """
    high = min(profile.r[-1], spec.max_radius)
    nodes = np.linspace(profile.r[0], high, spec.nodes)
    sample = profile.eval(nodes)
    higher = profile.eval_higher(nodes, sample)
    phi = [np.array(sample.phi), np.array(sample.dphi), np.array(sample.ddphi), higher.dddphi, higher.ddddphi]
    df = [np.array(sample.df), np.array(sample.ddf), higher.dddf]
    factors = spec.bump(nodes, order=4)
    if spec.target == 'df':
        df = _leibniz(df, factors)
    else:
        phi = _leibniz(phi, factors)
    if not np.all(phi[0] > 0):
        bad = np.flatnonzero(~(phi[0] > 0))[0]
        raise PerturbationError(f"perturbed phi is {phi[0][bad]} at r={nodes[bad]}")
    perturbed = SolitonProfile(grid=RadialGrid(nodes=nodes), phi=phi[0], dphi=phi[1], ddphi=phi[2], df=df[0],
                               ddf=df[1], is_exact_soliton=False, higher=Cascade(phi[3], phi[4], df[2]))
    logger.debug(f"perturbed {spec.target} by {spec.amplitude} at r={spec.center} on {spec.nodes} nodes")
    return perturbed


class PointwiseData(NamedTuple):
    """Everything the residuals need at a set of radii."""

    state: RadialState
    lam: np.ndarray
    mu: np.ndarray
    R: np.ndarray
    dR: np.ndarray
    """Geometric R'."""
    ddR: np.ndarray
    """Geometric R''."""
    beta: np.ndarray
    ratio: np.ndarray
    """phi'/phi."""

    @classmethod
    def at(cls, profile: SolitonProfile, r) -> 'PointwiseData':
        """Evaluate at r."""
        state = radial_state(profile, r)
        curvature = state_curvature(profile, state)
        return cls(state=state, lam=curvature.lam, mu=curvature.mu, R=curvature.R, dR=geometric_dR(state),
                   ddR=geometric_ddR(state), beta=beta(state, curvature), ratio=state.dphi / state.phi)

    @property
    def laplacian_R(self) -> np.ndarray:
        """Delta R = R'' + 2 (phi'/phi) R'."""
        return self.ddR + 2.0 * self.ratio * self.dR

    def x_field(self, trial: TrialFunction) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """psi(R), psi'(R), X and div X."""
        psi = evaluate_psi(trial, self.R)
        dpsi = trial.slope(self.R)
        df, ddf = self.state.df, self.state.ddf
        x = self.dR + psi * df
        div_x = self.ddR + dpsi * self.dR * df + psi * ddf + 2.0 * self.ratio * x
        return psi, dpsi, x, div_x


def window_nodes(profile: SolitonProfile, window: Tuple[float, float]) -> np.ndarray:
    """Nodes whose scalar curvature lies in the window."""
    R = node_curvature(profile).R
    return profile.r[(R >= window[0]) & (R <= window[1])]


def _as_trial(psi: PsiLike) -> TrialFunction:
    if isinstance(psi, PsiProfile):
        return psi_trial(psi)
    return psi


def _grad_r(data: PointwiseData, trial) -> np.ndarray:
    return data.dR + 2.0 * data.lam * data.state.df


def _lap_r(data: PointwiseData, trial) -> np.ndarray:
    return data.laplacian_R + 2.0 * (data.lam ** 2 + 2.0 * data.mu ** 2) + data.state.df * data.dR


def _b_norm(data: PointwiseData, trial) -> np.ndarray:
    R, df = data.R, data.state.df
    right = -(1.0 - R) * data.laplacian_R - 0.75 * data.dR ** 2 - df * data.dR - R ** 2 * (1.0 - R)
    return 4.0 * data.beta ** 2 - right


def _general(data: PointwiseData, trial) -> np.ndarray:
    R, df = data.R, data.state.df
    psi, dpsi, x, div_x = data.x_field(trial)
    right = (-4.0 * data.beta ** 2 - 0.75 * (data.dR - psi * df) * x - df * x + (1.0 - R) * dpsi * df * x
             - 0.75 * (1.0 - R) * psi ** 2 + (1.0 - R) * psi - R ** 2 * (1.0 - R) + R * (1.0 - R) * psi
             - (1.0 - R) ** 2 * psi * dpsi)
    return (1.0 - R) * div_x - right


def _simplified(data: PointwiseData, trial) -> np.ndarray:
    R, df = data.R, data.state.df
    psi, dpsi, x, div_x = data.x_field(trial)
    right = -4.0 * data.beta ** 2 - 0.75 * (data.dR - psi * df) * x - df * x + (1.0 - R) * dpsi * df * x
    return (1.0 - R) * div_x - right


def _final(data: PointwiseData, trial) -> np.ndarray:
    R = data.R
    psi, _, x, div_x = data.x_field(trial)
    left = (1.0 - R) * (div_x + trial.du(R) * data.dR * x)
    right = -4.0 * data.beta ** 2 - R * (R - psi) / psi ** 2 * x ** 2
    return left - right


def _pointwise_ode(profile: SolitonProfile, r: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    return ode_residuals(*pointwise_psi(profile, r))


RESIDUALS: Dict[IdentityId, Callable] = {
    IdentityId.EQ_GRAD_R: _grad_r,
    IdentityId.EQ_LAP_R: _lap_r,
    IdentityId.EQ_B_NORM: _b_norm,
    IdentityId.EQ_GENERAL: _general,
    IdentityId.EQ_SIMPLIFIED: _simplified,
    IdentityId.EQ_FINAL: _final,
}


def identity_residual(profile: SolitonProfile, psi: PsiLike, id_: IdentityId,
                      window: Tuple[float, float] = (0.02, 0.98), threshold: float = 1e-6) -> ResidualStats:
    """Left minus right side at every node whose R lies in the window.

    EQ_ODE and EQ_ODE2 read psi off the profile itself; EQ_GENERAL,
    EQ_SIMPLIFIED and EQ_FINAL need psi (a PsiProfile or a TrialFunction).
    """
    id_ = IdentityId(id_)
    if id_ not in POINTWISE_IDS:
        raise UsageError(f"{id_.value} is not a pointwise identity")
    if id_ in NEEDS_PSI and psi is None:
        raise UsageError(f"{id_.value} needs psi")
    r = window_nodes(profile, window)
    if id_ in (IdentityId.EQ_ODE, IdentityId.EQ_ODE2):
        ode, rearranged = _pointwise_ode(profile, r) if r.size else (r, r)
        return ResidualStats.from_residuals(id_.value, ode if id_ == IdentityId.EQ_ODE else rearranged, threshold)
    if r.size == 0:
        return ResidualStats.from_residuals(id_.value, r, threshold)
    residual = RESIDUALS[id_](PointwiseData.at(profile, r), _as_trial(psi))
    return ResidualStats.from_residuals(id_.value, residual, threshold)


def _weight(trial: TrialFunction, psi: PsiLike, s):
    if isinstance(psi, PsiProfile):
        return psi.u_extended(s)
    return trial.u(s)


def flux_field(profile: SolitonProfile, psi: PsiLike) -> RadialField:
    """e^{u(R)} X as a radial field, with its derivative."""
    trial = _as_trial(psi)

    def value(r):
        state = radial_state(profile, r)
        curvature = state_curvature(profile, state)
        x = curvature.dR + evaluate_psi(trial, curvature.R) * state.df
        return np.exp(_weight(trial, psi, curvature.R)) * x

    def derivative(r):
        state = radial_state(profile, r)
        curvature = state_curvature(profile, state)
        psi_values = evaluate_psi(trial, curvature.R)
        x = curvature.dR + psi_values * state.df
        dx = (state_ddR(profile, state, curvature) + trial.slope(curvature.R) * curvature.dR * state.df
              + psi_values * state.ddf)
        return np.exp(_weight(trial, psi, curvature.R)) * (trial.du(curvature.R) * curvature.dR * x + dx)

    return RadialField(value=value, derivative=derivative, name='weighted X')


def flux_functional(profile: SolitonProfile, psi: PsiLike, r):
    """4 pi phi^2 e^{u(R)} X_r on the r-sphere."""
    if psi is None:
        raise UsageError("flux needs psi")
    return sphere_flux(profile, flux_field(profile, psi), r)


def div_inequality_check(profile: SolitonProfile, psi: PsiLike, r: float,
                         rel_tol: float = 1e-10) -> Tuple[float, float]:
    """Both sides of the integral inequality on the ball of radius r."""
    if psi is None:
        raise UsageError("the inequality needs psi")
    trial = _as_trial(psi)

    def integrand(radius):
        state = radial_state(profile, radius)
        curvature = state_curvature(profile, state)
        return (4.0 * beta(state, curvature) ** 2 * np.exp(_weight(trial, psi, curvature.R))
                / (1.0 - curvature.R))

    lhs = ball_integral(profile, integrand, 0.0, r, rel_tol=rel_tol)
    rhs = -flux_functional(profile, psi, r)
    logger.debug(f"inequality at r={r}: lhs={lhs:.3g} rhs={rhs:.3g}")
    return lhs, rhs


def _flux_terms(profile: SolitonProfile, psi: PsiLike, r):
    if psi is None:
        raise UsageError("flux needs psi")
    state = radial_state(profile, r)
    curvature = state_curvature(profile, state)
    psi_df = evaluate_psi(_as_trial(psi), curvature.R) * state.df
    return state, curvature, psi_df


def flux_scale(profile: SolitonProfile, psi: PsiLike, r):
    """4 pi phi^2 e^{u(R)} (|R'| + |psi(R) f'|), the size of the two terms of the flux."""
    state, curvature, psi_df = _flux_terms(profile, psi, r)
    weight = np.exp(_weight(_as_trial(psi), psi, curvature.R))
    values = FOUR_PI * state.phi ** 2 * weight * (np.abs(curvature.dR) + np.abs(psi_df))
    return float(values[0]) if np.ndim(r) == 0 else values


def relative_flux(profile: SolitonProfile, psi: PsiLike, r):
    """flux_functional / flux_scale; the weight cancels and is never formed."""
    _, curvature, psi_df = _flux_terms(profile, psi, r)
    values = (curvature.dR + psi_df) / (np.abs(curvature.dR) + np.abs(psi_df))
    return float(values[0]) if np.ndim(r) == 0 else values
