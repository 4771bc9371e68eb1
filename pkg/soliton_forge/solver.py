"""Construct the Bryant soliton by series-seeded adaptive integration."""

import logging
from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, validator, root_validator
from scipy.integrate import DOP853
from scipy.optimize import brentq

from soliton_forge.common import AccuracyError, ConfigError, IntegrationError, first_occurrence
from soliton_forge.geometry import node_curvature
from soliton_forge.model import OriginSeries, RadialGrid, ResidualStats, SolitonProfile, soliton_rhs

logger = logging.getLogger(__name__)


class SolverConfig(BaseModel):
    """Controls for solve_bryant."""

    seed_radius: float = 1e-3
    """r0, where the origin series hands over to the integrator."""
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    stop_scalar_curvature: float = 1e-3
    """Stop once R falls below this."""
    max_radius: float = 1e4
    max_steps: int = 100_000
    samples_per_step: int = 4
    """Profile nodes per accepted step, taken from the dense output."""
    integrator_tol_ratio: float = 1e-2
    """Integrator tolerances are rel_tol/abs_tol times this."""

    class Config:
        """Immutable, no unknown keys."""

        allow_mutation = False
        extra = 'forbid'

    @validator('seed_radius', 'stop_scalar_curvature')
    def _unit_interval(cls, value, field):
        if not 0 < value < 1:
            raise ValueError(f"{field.name} must lie in (0, 1), got {value}")
        return value

    @validator('rel_tol', 'abs_tol', 'integrator_tol_ratio', 'max_radius')
    def _positive(cls, value, field):
        if not value > 0:
            raise ValueError(f"{field.name} must be positive, got {value}")
        return value

    @validator('max_steps', 'samples_per_step')
    def _count(cls, value, field):
        if value < 1:
            raise ValueError(f"{field.name} must be at least 1, got {value}")
        return value

    @root_validator(skip_on_failure=True)
    def _seed_inside(cls, values):
        if values['seed_radius'] >= values['max_radius']:
            raise ValueError("seed_radius must be below max_radius")
        return values

    @property
    def defect_bound(self) -> float:
        """Accepted first integral defect."""
        return 10.0 * self.rel_tol


class SeedState(NamedTuple):
    """State at the seed radius."""

    r: float
    phi: float
    dphi: float
    df: float
    w: float
    """1 - phi'."""


def series_seed(config: SolverConfig) -> SeedState:
    """Evaluate the origin series at r0 after checking its remainder."""
    origin = OriginSeries(seed_radius=config.seed_radius)
    r0 = config.seed_radius
    remainder = origin.remainder(r0)
    if remainder > config.abs_tol:
        raise ConfigError(f"series remainder {remainder:.3g} at seed_radius={r0} exceeds abs_tol={config.abs_tol}; "
                          f"use a smaller seed_radius")
    return SeedState(r=r0, phi=origin.phi(r0), dphi=origin.dphi(r0), df=origin.df(r0), w=origin.one_minus_dphi(r0))


def _rhs(r, y):
    """System in (phi, w = 1 - phi', f')."""
    phi, w, df = y
    ddphi, ddf = soliton_rhs(phi, w, df)
    return np.array([1.0 - w, -ddphi, ddf])


def _scalar_curvature(y) -> float:
    """R = f'' + 2 f' phi'/phi along the solution."""
    phi, w, df = y
    _, ddf = soliton_rhs(phi, w, df)
    return ddf + 2.0 * df * (1.0 - w) / phi


def solve_bryant(config: SolverConfig = None) -> SolitonProfile:
    """Integrate from the seed radius until R < s_min or r > max_radius."""
    config = config or SolverConfig()
    seed = series_seed(config)
    solver = DOP853(_rhs, seed.r, np.array([seed.phi, seed.w, seed.df]), config.max_radius,
                    rtol=config.rel_tol * config.integrator_tol_ratio,
                    atol=config.abs_tol * config.integrator_tol_ratio)
    radii = [seed.r]
    states = [solver.y.copy()]
    steps = 0
    stopped = False
    while solver.status == 'running' and not stopped:
        if steps >= config.max_steps:
            raise IntegrationError(f"max_steps={config.max_steps} exceeded at r={solver.t}",
                                   last_state=(solver.t, solver.y.copy()))
        r_previous = solver.t
        message = solver.step()
        steps += 1
        if solver.status == 'failed':
            raise IntegrationError(f"integration failed at r={r_previous}: {message}",
                                   last_state=(r_previous, states[-1]))
        dense = solver.dense_output()
        r_end = solver.t
        if _scalar_curvature(solver.y) < config.stop_scalar_curvature:
            r_end = brentq(lambda r: _scalar_curvature(dense(r)) - config.stop_scalar_curvature,
                           r_previous, solver.t, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            stopped = True
        for r in np.linspace(r_previous, r_end, config.samples_per_step + 1)[1:]:
            radii.append(r)
            states.append(solver.y.copy() if r == solver.t else dense(r))

    if not stopped:
        if first_occurrence(f"reached max_radius={config.max_radius} before R < {config.stop_scalar_curvature}"):
            logger.warning(f"reached max_radius={config.max_radius} before R < {config.stop_scalar_curvature}")

    states = np.array(states)
    phi, w, df = states[:, 0], states[:, 1], states[:, 2]
    ddphi, ddf = soliton_rhs(phi, w, df)
    profile = SolitonProfile(grid=RadialGrid(nodes=radii), phi=phi, dphi=1.0 - w, ddphi=ddphi, df=df, ddf=ddf,
                             origin_data=OriginSeries(seed_radius=config.seed_radius), is_exact_soliton=True)
    logger.info(f"solved to r={radii[-1]:.6g} in {steps} steps, {len(radii)} nodes")

    defect = first_integral_defect(profile, threshold=config.defect_bound)
    if not defect.passed:
        raise AccuracyError(f"first integral defect {defect.max_abs:.3g} above {config.defect_bound:.3g}",
                            estimate=defect.max_abs)
    return profile


def first_integral_defect(profile: SolitonProfile, threshold: float = 1e-9) -> ResidualStats:
    """Per node |R + f'^2 - 1|."""
    if not profile.is_exact_soliton:
        if first_occurrence("first integral on a profile that is not an exact soliton"):
            logger.warning("first integral on a profile that is not an exact soliton")
    curvature = node_curvature(profile)
    return ResidualStats.from_residuals('FIRST_INTEGRAL', curvature.R + profile.df ** 2 - 1.0, threshold)
