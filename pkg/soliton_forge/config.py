"""Flat key = value configuration with documented defaults."""

import logging
import os
from typing import Dict, List, Literal

from pydantic import BaseModel, Field, ValidationError, root_validator, validator

from soliton_forge.common import ConfigError
from soliton_forge.identities import PerturbationSpec
from soliton_forge.psi import TRIAL_FUNCTIONS, SGrid
from soliton_forge.solver import SolverConfig

logger = logging.getLogger(__name__)

REFERENCE_REL_TOL = 1e-10
"""Thresholds are quoted at this solver tolerance."""

SOLVER_KEYS = set(SolverConfig.__fields__)


class ForgeConfig(BaseModel):
    """Everything a run needs; unknown keys are rejected."""

    seed_radius: float = Field(1e-3, description="Radius where the origin series hands over to the integrator.")
    rel_tol: float = Field(1e-10, description="Solver relative tolerance; thresholds scale with it.")
    abs_tol: float = Field(1e-12, description="Solver absolute tolerance, also bounds the series remainder.")
    stop_scalar_curvature: float = Field(1e-3, description="Stop integrating once R falls below this.")
    max_radius: float = Field(1e4, description="Hard stop for the integration.")
    max_steps: int = Field(100_000, description="Integrator step budget.")
    samples_per_step: int = Field(4, description="Profile nodes stored per accepted step.")
    integrator_tol_ratio: float = Field(1e-2, description="Integrator tolerances relative to rel_tol and abs_tol.")
    psi_nodes: int = Field(1600, description="Number of s nodes for psi.")
    psi_top_gap: float = Field(1e-4, description="Distance of the top s node from 1.")
    window_low: float = Field(0.02, description="Pointwise residuals use nodes with R at or above this.")
    window_high: float = Field(0.98, description="Pointwise residuals use nodes with R at or below this.")
    psi_window_low: float = Field(0.05, description="Lower end of the s window for the psi ODE on the s grid.")
    psi_window_high: float = Field(0.95, description="Upper end of the s window for the psi ODE on the s grid.")
    threshold_conservation: float = Field(1e-8, description="Bound on |R + f'^2 - 1|.")
    threshold_pointwise: float = Field(1e-6, description="Bound on pointwise identity residuals.")
    threshold_integral: float = Field(1e-6, description="Bound on flux residuals.")
    trial_functions: List[str] = Field(['half', 'two_thirds', 'square'],
                                       description="Trial psi for the general identity.")
    flux_levels: int = Field(10, description="Flux is evaluated at r = 2^l for l = 0..flux_levels.")
    inequality_radii: List[float] = Field([1.0, 5.0, 20.0], description="Ball radii for the integral inequality.")
    inequality_tolerance: float = Field(1e-6, description="Slack allowed in lhs <= rhs.")
    perturbation_target: Literal['df', 'phi'] = Field('df', description="Field the falsification bump multiplies.")
    perturbation_amplitude: float = Field(0.01, description="Bump amplitude delta.")
    perturbation_center: float = Field(2.0, description="Bump center.")
    perturbation_width: float = Field(0.5, description="Bump width.")
    perturbation_nodes: int = Field(6001, description="Uniform resample size of perturbed profiles.")
    perturbation_max_radius: float = Field(60.0, description="Perturbed profiles stop here.")
    workers: int = Field(4, description="Threads running the checks.")

    class Config:
        """No unknown keys."""

        extra = 'forbid'
        allow_mutation = False

    @validator('trial_functions', pre=True)
    def _split_names(cls, value):
        if isinstance(value, str):
            value = [name.strip() for name in value.split(',') if name.strip()]
        unknown = [name for name in value if name not in TRIAL_FUNCTIONS]
        if unknown:
            raise ValueError(f"unknown trial functions {unknown}, expected some of {sorted(TRIAL_FUNCTIONS)}")
        if not value:
            raise ValueError("at least one trial function")
        return value

    @validator('inequality_radii', pre=True)
    def _split_radii(cls, value):
        if isinstance(value, str):
            value = [item.strip() for item in value.split(',') if item.strip()]
        return value

    @validator('inequality_radii')
    def _positive_radii(cls, value):
        if not value or min(value) <= 0:
            raise ValueError("inequality_radii must be positive and not empty")
        return value

    @validator('psi_nodes', 'perturbation_nodes')
    def _enough_nodes(cls, value, field):
        if value < 16:
            raise ValueError(f"{field.name} must be at least 16, got {value}")
        return value

    @validator('workers', 'flux_levels')
    def _non_negative(cls, value, field):
        if value < (1 if field.name == 'workers' else 0):
            raise ValueError(f"{field.name} out of range: {value}")
        return value

    @validator('threshold_conservation', 'threshold_pointwise', 'threshold_integral', 'inequality_tolerance',
               'perturbation_width', 'perturbation_max_radius')
    def _positive(cls, value, field):
        if not value > 0:
            raise ValueError(f"{field.name} must be positive, got {value}")
        return value

    @root_validator(skip_on_failure=True)
    def _windows(cls, values):
        for low, high in [('window_low', 'window_high'), ('psi_window_low', 'psi_window_high')]:
            if not 0 < values[low] < values[high] < 1:
                raise ValueError(f"need 0 < {low} < {high} < 1")
        return values

    def solver_config(self) -> SolverConfig:
        """Solver keys only."""
        return SolverConfig(**self.dict(include=SOLVER_KEYS))

    def s_grid(self) -> SGrid:
        """Clustered s grid from the solver's stop value to 1 - psi_top_gap."""
        return SGrid.clustered(s_min=self.stop_scalar_curvature, top_gap=self.psi_top_gap, count=self.psi_nodes)

    def perturbation_spec(self, amplitude: float = None) -> PerturbationSpec:
        """Bump spec from the perturbation keys, ConfigError if they do not form one."""
        try:
            return PerturbationSpec(target=self.perturbation_target,
                                    amplitude=self.perturbation_amplitude if amplitude is None else amplitude,
                                    center=self.perturbation_center, width=self.perturbation_width,
                                    nodes=self.perturbation_nodes, max_radius=self.perturbation_max_radius)
        except ValidationError as exc:
            raise ConfigError(f"invalid perturbation: {exc}") from exc

    @property
    def window(self) -> tuple:
        """R window of the pointwise residuals."""
        return self.window_low, self.window_high

    @property
    def psi_window(self) -> tuple:
        """s window of the psi ODE residual."""
        return self.psi_window_low, self.psi_window_high

    def scaled(self, threshold: float) -> float:
        """Threshold at this rel_tol, linear in rel_tol."""
        return threshold * self.rel_tol / REFERENCE_REL_TOL


def parse_config_file(path: str) -> Dict[str, str]:
    """Read `key = value` lines; `#` starts a comment."""
    entries, lines = {}, {}
    with open(path, encoding='utf-8') as config_file:
        for line_number, line in enumerate(config_file, start=1):
            text = line.split('#', 1)[0].strip()
            if not text:
                continue
            if '=' not in text:
                raise ConfigError(f"{path} line {line_number}: expected key = value, got {text!r}")
            key, value = (part.strip() for part in text.split('=', 1))
            if not key:
                raise ConfigError(f"{path} line {line_number}: missing key")
            if key in entries:
                raise ConfigError(f"{path} line {line_number}: duplicate key {key} (first on line {lines[key]})")
            entries[key], lines[key] = value, line_number
    return entries


def load_config(config_path: str = None, explicit: bool = False, **overrides) -> ForgeConfig:
    """Defaults, then the file, then overrides that are not None.

    A missing file is skipped unless it was asked for explicitly.
    """
    values = {}
    if config_path:
        if os.path.isfile(config_path):
            values.update(parse_config_file(config_path))
            logger.debug(f"read {len(values)} keys from {config_path}")
        elif explicit:
            raise ConfigError(f"config file {config_path} not found")
        else:
            logger.debug(f"{config_path} does not exist, using defaults")
    values.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return ForgeConfig(**values)
    except ValidationError as exc:
        raise ConfigError(f"invalid configuration: {exc}") from exc
