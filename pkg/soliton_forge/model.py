"""Implements the sampled profile model: grids, soliton profiles, psi profiles and residual summaries."""

import json
import logging
from typing import List, NamedTuple, Optional, Union

import numpy as np
from pydantic import BaseModel, Field, PrivateAttr, root_validator, validator
from scipy.interpolate import CubicHermiteSpline

from soliton_forge.common import RangeError, first_occurrence

logger = logging.getLogger(__name__)

MIN_NODES = 16
"""Smallest grid we accept."""

SERIES_PHI3 = -1.0 / 36.0
SERIES_PHI5 = 29.0 / 21600.0
SERIES_DF1 = 1.0 / 3.0
SERIES_DF3 = -2.0 / 135.0


def frozen_array(values) -> np.ndarray:
    """Copy to a read-only float array."""
    array_ = np.array(values, dtype=float)
    array_.setflags(write=False)
    return array_


def finite_difference(values: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """First derivative, 4th order central stencil on uniform grids, 2nd order otherwise and at the ends."""
    values = np.asarray(values, dtype=float)
    nodes = np.asarray(nodes, dtype=float)
    derivative = np.gradient(values, nodes, edge_order=2)
    spacing = np.diff(nodes)
    if len(nodes) < 5 or not np.allclose(spacing, spacing[0], rtol=1e-9, atol=0.0):
        return derivative
    h = spacing[0]
    derivative[2:-2] = (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * h)
    return derivative


def second_difference(values: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """Second derivative, 4th order central stencil on uniform grids."""
    nodes = np.asarray(nodes, dtype=float)
    spacing = np.diff(nodes)
    if len(nodes) < 5 or not np.allclose(spacing, spacing[0], rtol=1e-9, atol=0.0):
        return finite_difference(finite_difference(values, nodes), nodes)
    values = np.asarray(values, dtype=float)
    h = spacing[0]
    derivative = finite_difference(finite_difference(values, nodes), nodes)
    derivative[2:-2] = (-values[:-4] + 16.0 * values[1:-3] - 30.0 * values[2:-2]
                        + 16.0 * values[3:-1] - values[4:]) / (12.0 * h * h)
    return derivative


class Cascade(NamedTuple):
    """Higher derivatives implied by the soliton system."""

    dddphi: np.ndarray
    ddddphi: np.ndarray
    dddf: np.ndarray


def soliton_rhs(phi, w, df):
    """Second derivatives phi'' and f'' from the state, with w = 1 - phi'."""
    ddphi = w * (2.0 - w) / phi - df * (1.0 - w)
    return ddphi, -2.0 * ddphi / phi


def soliton_cascade(phi, dphi, w, df, ddphi, ddf) -> Cascade:
    """Differentiate the soliton system twice more along a solution."""
    one_minus = w * (2.0 - w)
    dddphi = (-2.0 * dphi * ddphi / phi - one_minus * dphi / phi ** 2
              - ddf * dphi - df * ddphi)
    dddf = -2.0 * dddphi / phi + 2.0 * ddphi * dphi / phi ** 2
    ddddphi = (-2.0 * (ddphi ** 2 + dphi * dddphi) / phi + 2.0 * dphi ** 2 * ddphi / phi ** 2
               - (-2.0 * dphi ** 2 * ddphi + one_minus * ddphi) / phi ** 2
               + 2.0 * one_minus * dphi ** 2 / phi ** 3
               - dddf * dphi - 2.0 * ddf * ddphi - df * dddphi)
    return Cascade(dddphi, ddddphi, dddf)


class ProfileSample(NamedTuple):
    """Interpolated state, scalars or arrays matching the query."""

    phi: Union[float, np.ndarray]
    dphi: Union[float, np.ndarray]
    df: Union[float, np.ndarray]
    ddphi: Union[float, np.ndarray]
    ddf: Union[float, np.ndarray]


class RadialGrid(BaseModel):
    """Strictly increasing positive radii."""

    nodes: np.ndarray
    """Radii."""

    class Config:
        """Allow numpy fields, no mutation."""

        arbitrary_types_allowed = True
        allow_mutation = False

    @validator('nodes', pre=True)
    def _check_nodes(cls, nodes):
        nodes = frozen_array(nodes)
        if nodes.ndim != 1 or len(nodes) < MIN_NODES:
            raise ValueError(f"grid needs at least {MIN_NODES} nodes, got {nodes.size}")
        if not np.all(np.isfinite(nodes)):
            raise ValueError("grid nodes must be finite")
        if nodes[0] <= 0:
            raise ValueError(f"grid nodes must be positive, first node is {nodes[0]}")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes not increasing")
        return nodes

    def __len__(self) -> int:
        """Number of nodes."""
        return len(self.nodes)


class OriginSeries(BaseModel):
    """Expansion of the smooth solution at r = 0: phi = r + a r^3 + c r^5, f' = r/3 + b r^3."""

    seed_radius: float
    """Radius where integration starts; the series is used below it."""
    phi3: float = SERIES_PHI3
    phi5: float = SERIES_PHI5
    df1: float = SERIES_DF1
    df3: float = SERIES_DF3

    class Config:
        """Immutable."""

        allow_mutation = False

    def remainder(self, r: float) -> float:
        """Size of the first omitted terms at r."""
        return abs(self.phi5) * r ** 7 + abs(self.df3) * r ** 5

    def phi(self, r):
        """phi(r)."""
        return r + self.phi3 * r ** 3 + self.phi5 * r ** 5

    def dphi(self, r):
        """phi'(r)."""
        return 1.0 + 3.0 * self.phi3 * r ** 2 + 5.0 * self.phi5 * r ** 4

    def one_minus_dphi(self, r):
        """w = 1 - phi', without cancellation."""
        return -(3.0 * self.phi3 * r ** 2 + 5.0 * self.phi5 * r ** 4)

    def ddphi(self, r):
        """phi''(r)."""
        return 6.0 * self.phi3 * r + 20.0 * self.phi5 * r ** 3

    def dddphi(self, r):
        """phi'''(r)."""
        return 6.0 * self.phi3 + 60.0 * self.phi5 * r ** 2

    def ddddphi(self, r):
        """phi''''(r)."""
        return 120.0 * self.phi5 * r

    def df(self, r):
        """f'(r)."""
        return self.df1 * r + self.df3 * r ** 3

    def ddf(self, r):
        """f''(r)."""
        return self.df1 + 3.0 * self.df3 * r ** 2

    def dddf(self, r):
        """f'''(r)."""
        return 6.0 * self.df3 * r

    def spherical_ratio(self, r):
        """mu = f' phi' / phi with the factor r cancelled."""
        return ((self.df1 + self.df3 * r ** 2) * (1.0 + 3.0 * self.phi3 * r ** 2 + 5.0 * self.phi5 * r ** 4)
                / (1.0 + self.phi3 * r ** 2 + self.phi5 * r ** 4))

    def ddphi_over_phi(self, r):
        """phi'' / phi with the factor r cancelled."""
        return (6.0 * self.phi3 + 20.0 * self.phi5 * r ** 2) / (1.0 + self.phi3 * r ** 2 + self.phi5 * r ** 4)


class Violation(BaseModel):
    """A broken profile invariant."""

    invariant: str
    node: int
    magnitude: float

    def __str__(self) -> str:
        """Human form."""
        return f"{self.invariant} at node {self.node} (magnitude {self.magnitude:.3g})"


class SolitonProfile(BaseModel):
    """Sampled radial solution of the rotationally symmetric steady soliton system."""

    grid: RadialGrid
    phi: np.ndarray
    """Warp factor."""
    dphi: np.ndarray
    ddphi: np.ndarray
    df: np.ndarray
    """Radial derivative of the potential."""
    ddf: np.ndarray
    origin_data: Optional[OriginSeries] = None
    """Series used below the first node."""
    is_exact_soliton: bool = False
    """True for solver output."""

    _dddphi: np.ndarray = PrivateAttr()
    _ddddphi: np.ndarray = PrivateAttr()
    _dddf: np.ndarray = PrivateAttr()
    _splines: dict = PrivateAttr()

    class Config:
        """Allow numpy fields, no mutation."""

        arbitrary_types_allowed = True
        allow_mutation = False

    @validator('phi', 'dphi', 'ddphi', 'df', 'ddf', pre=True)
    def _as_array(cls, values):
        return frozen_array(values)

    @root_validator(skip_on_failure=True)
    def _check_lengths(cls, values):
        count = len(values['grid'])
        for name in ['phi', 'dphi', 'ddphi', 'df', 'ddf']:
            if values[name].shape != (count, ):
                raise ValueError(f"{name} has {values[name].size} samples, grid has {count}")
        return values

    def __init__(self, higher: Cascade = None, **data) -> None:
        """Validate with pydantic, then derive third derivatives and the interpolants.

        `higher` supplies phi''', phi'''' and f''' of a profile that is not an
        exact soliton; without it they are central differences of phi'' and f''.
        """
        super().__init__(**data)
        r = self.r
        if self.is_exact_soliton:
            cascade = soliton_cascade(self.phi, self.dphi, 1.0 - self.dphi, self.df, self.ddphi, self.ddf)
            self._dddphi, self._ddddphi, self._dddf = (frozen_array(c) for c in cascade)
        elif higher is not None:
            for name, values in zip(Cascade._fields, higher):
                if np.shape(values) != r.shape:
                    raise ValueError(f"{name} has {np.size(values)} samples, grid has {len(r)}")
            self._dddphi, self._ddddphi, self._dddf = (frozen_array(c) for c in higher)
        else:
            self._dddphi = frozen_array(finite_difference(self.ddphi, r))
            self._ddddphi = frozen_array(second_difference(self.ddphi, r))
            self._dddf = frozen_array(finite_difference(self.ddf, r))
        self._splines = {
            'phi': CubicHermiteSpline(r, self.phi, self.dphi),
            'dphi': CubicHermiteSpline(r, self.dphi, self.ddphi),
            'df': CubicHermiteSpline(r, self.df, self.ddf),
            'ddphi': CubicHermiteSpline(r, self.ddphi, self._dddphi),
            'ddf': CubicHermiteSpline(r, self.ddf, self._dddf),
        }

    @property
    def r(self) -> np.ndarray:
        """Grid nodes."""
        return self.grid.nodes

    @property
    def dddphi(self) -> np.ndarray:
        """phi''' at the nodes."""
        return self._dddphi

    @property
    def ddddphi(self) -> np.ndarray:
        """phi'''' at the nodes."""
        return self._ddddphi

    @property
    def dddf(self) -> np.ndarray:
        """f''' at the nodes."""
        return self._dddf

    @property
    def interval(self) -> tuple:
        """First and last node."""
        return float(self.r[0]), float(self.r[-1])

    def check_range(self, r: np.ndarray) -> None:
        """Raise RangeError if any r is outside the grid."""
        low, high = self.interval
        if np.any(r < low) or np.any(r > high) or np.any(np.isnan(r)):
            raise RangeError(f"r={np.atleast_1d(r)[(r < low) | (r > high) | np.isnan(r)][0]} outside [{low}, {high}]")

    def node_index(self, r: np.ndarray) -> tuple:
        """Indices of nodes hit exactly, and the mask of those hits."""
        index = np.clip(np.searchsorted(self.r, r), 0, len(self.r) - 1)
        return index, self.r[index] == r

    def _interpolate(self, name: str, stored: np.ndarray, r: np.ndarray, index, hit) -> np.ndarray:
        values = self._splines[name](r)
        values[hit] = stored[index[hit]]
        return values

    def eval(self, r) -> ProfileSample:
        """Cubic Hermite interpolation of the state, stored values bit-for-bit at nodes."""
        scalar = np.ndim(r) == 0
        r = np.atleast_1d(np.asarray(r, dtype=float))
        self.check_range(r)
        index, hit = self.node_index(r)
        sample = ProfileSample(
            phi=self._interpolate('phi', self.phi, r, index, hit),
            dphi=self._interpolate('dphi', self.dphi, r, index, hit),
            df=self._interpolate('df', self.df, r, index, hit),
            ddphi=self._interpolate('ddphi', self.ddphi, r, index, hit),
            ddf=self._interpolate('ddf', self.ddf, r, index, hit),
        )
        if scalar:
            return ProfileSample(*(float(value[0]) for value in sample))
        return sample

    def eval_higher(self, r: np.ndarray, sample: ProfileSample) -> Cascade:
        """Third and fourth derivatives at r, given the interpolated sample there."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        index, hit = self.node_index(r)
        if self.is_exact_soliton:
            cascade = soliton_cascade(sample.phi, sample.dphi, 1.0 - np.asarray(sample.dphi), sample.df,
                                      sample.ddphi, sample.ddf)
            cascade = Cascade(*(np.array(np.atleast_1d(c), dtype=float) for c in cascade))
        else:
            cascade = Cascade(*(np.interp(r, self.r, stored) for stored in [self._dddphi, self._ddddphi, self._dddf]))
        for computed, stored in zip(cascade, [self._dddphi, self._ddddphi, self._dddf]):
            computed[hit] = stored[index[hit]]
        return cascade

    def restrict(self, stop: int) -> 'SolitonProfile':
        """Profile on the first `stop` nodes."""
        higher = None if self.is_exact_soliton else Cascade(self._dddphi[:stop], self._ddddphi[:stop], self._dddf[:stop])
        return SolitonProfile(grid=RadialGrid(nodes=self.r[:stop]), phi=self.phi[:stop], dphi=self.dphi[:stop],
                              ddphi=self.ddphi[:stop], df=self.df[:stop], ddf=self.ddf[:stop],
                              origin_data=self.origin_data, is_exact_soliton=self.is_exact_soliton, higher=higher)

    def replace(self, **changes) -> 'SolitonProfile':
        """Copy with some columns or flags replaced, re-validated."""
        data = dict(grid=self.grid, phi=self.phi, dphi=self.dphi, ddphi=self.ddphi, df=self.df, ddf=self.ddf,
                    origin_data=self.origin_data, is_exact_soliton=self.is_exact_soliton)
        data.update(changes)
        return SolitonProfile(**data)


def eval_profile(profile: SolitonProfile, r) -> ProfileSample:
    """Interpolated (phi, phi', f', phi'', f'') at r."""
    return profile.eval(r)


def resample(profile: SolitonProfile, nodes) -> SolitonProfile:
    """Same profile on other nodes; values come from the interpolants."""
    grid = RadialGrid(nodes=nodes)
    sample = profile.eval(grid.nodes)
    return SolitonProfile(grid=grid, phi=sample.phi, dphi=sample.dphi, ddphi=sample.ddphi, df=sample.df,
                          ddf=sample.ddf, origin_data=profile.origin_data, is_exact_soliton=profile.is_exact_soliton)


def validate_profile(profile: SolitonProfile, conservation_tolerance: float = 1e-8) -> List[Violation]:
    """Every violated invariant, with node index and magnitude; empty means valid."""
    from soliton_forge.geometry import node_curvature

    violations = []
    for node in np.flatnonzero(~(profile.phi > 0)):
        violations.append(Violation(invariant='phi > 0', node=int(node), magnitude=float(profile.phi[node])))
    if not profile.is_exact_soliton:
        return violations
    if violations:
        if first_occurrence("skipping curvature invariants, phi not positive"):
            logger.warning("skipping curvature invariants, phi not positive")
        return violations

    curvature = node_curvature(profile)
    defect = np.abs(curvature.R + profile.df ** 2 - 1.0)
    for node in np.flatnonzero(~(defect <= conservation_tolerance)):
        violations.append(Violation(invariant='R + df^2 = 1', node=int(node), magnitude=float(defect[node])))
    for node in np.flatnonzero(~(np.diff(curvature.R) < 0)):
        violations.append(Violation(invariant='R strictly decreasing', node=int(node) + 1,
                                    magnitude=float(curvature.R[node + 1] - curvature.R[node])))
    for node in np.flatnonzero(~(np.diff(profile.df) > 0)):
        violations.append(Violation(invariant='df strictly increasing', node=int(node) + 1,
                                    magnitude=float(profile.df[node] - profile.df[node + 1])))
    for node in np.flatnonzero(~((profile.df > 0) & (profile.df < 1))):
        violations.append(Violation(invariant='0 < df < 1', node=int(node), magnitude=float(profile.df[node])))
    return violations


class PsiProfile(BaseModel):
    """psi(s), psi'(s) and u(s) sampled on an s-grid in (0, 1)."""

    s_nodes: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    u: np.ndarray
    limit_at_one: float
    """Extrapolated psi(1)."""
    u_limit_at_one: Optional[float] = None
    """Extrapolated u(1)."""

    _psi_spline: CubicHermiteSpline = PrivateAttr()
    _u_spline: CubicHermiteSpline = PrivateAttr()

    class Config:
        """Allow numpy fields, no mutation."""

        arbitrary_types_allowed = True
        allow_mutation = False

    @validator('s_nodes', 'psi', 'dpsi', 'u', pre=True)
    def _as_array(cls, values):
        return frozen_array(values)

    @validator('s_nodes')
    def _check_nodes(cls, s_nodes):
        if len(s_nodes) < 4:
            raise ValueError("psi profile needs at least 4 nodes")
        if not (s_nodes[0] > 0 and s_nodes[-1] < 1):
            raise ValueError("s nodes must lie in (0, 1)")
        if not np.all(np.diff(s_nodes) > 0):
            raise ValueError("nodes not increasing")
        return s_nodes

    @root_validator(skip_on_failure=True)
    def _check_columns(cls, values):
        count = len(values['s_nodes'])
        for name in ['psi', 'dpsi', 'u']:
            if values[name].shape != (count, ):
                raise ValueError(f"{name} has {values[name].size} samples, grid has {count}")
        if not np.all(np.isfinite(values['u'])):
            raise ValueError("u must be finite at every node")
        return values

    def __init__(self, **data) -> None:
        """Validate, then build the interpolants."""
        super().__init__(**data)
        self._psi_spline = CubicHermiteSpline(self.s_nodes, self.psi, self.dpsi)
        self._u_spline = CubicHermiteSpline(self.s_nodes, self.u, self.du_nodes)

    @property
    def du_nodes(self) -> np.ndarray:
        """u'(s) = psi'/psi + 3/(2(1-s)) - 1/((1-s) psi) at the nodes."""
        return weight_derivative(self.s_nodes, self.psi, self.dpsi)

    @property
    def interval(self) -> tuple:
        """First and last s node."""
        return float(self.s_nodes[0]), float(self.s_nodes[-1])

    def check_range(self, s) -> None:
        """Raise RangeError if any s is outside the grid."""
        low, high = self.interval
        s = np.atleast_1d(s)
        if np.any(s < low) or np.any(s > high) or np.any(np.isnan(s)):
            raise RangeError(f"s={s[(s < low) | (s > high) | np.isnan(s)][0]} outside [{low}, {high}]")

    def _exact(self, spline, stored, s):
        scalar = np.ndim(s) == 0
        s = np.atleast_1d(np.asarray(s, dtype=float))
        self.check_range(s)
        values = spline(s)
        index = np.clip(np.searchsorted(self.s_nodes, s), 0, len(self.s_nodes) - 1)
        hit = self.s_nodes[index] == s
        values[hit] = stored[index[hit]]
        return float(values[0]) if scalar else values

    def psi_at(self, s):
        """psi on the grid, bit-exact at nodes."""
        return self._exact(self._psi_spline, self.psi, s)

    def dpsi_at(self, s):
        """Derivative of the psi interpolant, stored psi' at nodes."""
        return self._exact(self._psi_spline.derivative(), self.dpsi, s)

    def u_at(self, s):
        """u on the grid, bit-exact at nodes."""
        return self._exact(self._u_spline, self.u, s)

    def _toward_one(self, at, top: float, limit: Optional[float], s, name: str):
        """at(s) on the grid, linear in 1 - s from the top node to limit at s = 1."""
        scalar = np.ndim(s) == 0
        s = np.atleast_1d(np.asarray(s, dtype=float))
        above = s > self.s_nodes[-1]
        if np.any(above) and limit is None:
            raise RangeError(f"s={s[above][0]} above the grid and no limit of {name} at 1")
        values = np.empty_like(s)
        if np.any(~above):
            values[~above] = at(s[~above])
        if np.any(above):
            fraction = np.clip((1.0 - s[above]) / (1.0 - self.s_nodes[-1]), 0.0, 1.0)
            values[above] = limit + fraction * (top - limit)
        return float(values[0]) if scalar else values

    def psi_extended(self, s):
        """psi(s), linear toward limit_at_one above the top node."""
        return self._toward_one(self.psi_at, self.psi[-1], self.limit_at_one, s, 'psi')

    def dpsi_extended(self, s):
        """Slope of psi_extended; the chord slope above the top node."""
        chord = (self.limit_at_one - self.psi[-1]) / (1.0 - self.s_nodes[-1])
        return self._toward_one(self.dpsi_at, chord, chord, s, 'psi')

    def u_extended(self, s):
        """u(s), linear in 1 - s toward u_limit_at_one above the top node."""
        return self._toward_one(self.u_at, self.u[-1], self.u_limit_at_one, s, 'u')

    def violations(self) -> List[Violation]:
        """Nodes where 0 < psi < s fails."""
        violations = []
        for node in np.flatnonzero(~(self.psi > 0)):
            violations.append(Violation(invariant='psi > 0', node=int(node), magnitude=float(self.psi[node])))
        margin = self.s_nodes - self.psi
        for node in np.flatnonzero(~(margin > 0)):
            violations.append(Violation(invariant='psi < s', node=int(node), magnitude=float(-margin[node])))
        return violations


def weight_derivative(s, psi, dpsi):
    """Derivative of the logarithmic weight u."""
    return dpsi / psi + 1.5 / (1.0 - s) - 1.0 / ((1.0 - s) * psi)


class CurvatureSample(BaseModel):
    """Pointwise curvature at one radius."""

    r: float
    lambda_: float = Field(alias='lambda')
    """Radial Ricci eigenvalue."""
    mu: float
    """Spherical Ricci eigenvalue, double."""
    R: float
    dR: float

    class Config:
        """Accept `lambda_` as well as `lambda`."""

        allow_population_by_field_name = True
        allow_mutation = False


class ResidualStats(BaseModel):
    """Summary of one residual over its samples."""

    name: str = Field(alias='id')
    max_abs: float
    rms: float
    n_samples: int
    threshold: float
    passed: bool = Field(None, alias='pass')

    class Config:
        """Serialize with report names."""

        allow_population_by_field_name = True
        allow_mutation = False

    @root_validator(skip_on_failure=True)
    def _check_pass(cls, values):
        expected = bool(values['max_abs'] <= values['threshold'])
        if values.get('passed') is None:
            values['passed'] = expected
        elif values['passed'] != expected:
            raise ValueError(f"{values['name']}: pass must equal max_abs <= threshold")
        return values

    @classmethod
    def from_residuals(cls, name: str, residuals, threshold: float) -> 'ResidualStats':
        """Summarize absolute residuals."""
        residuals = np.abs(np.asarray(residuals, dtype=float)).ravel()
        if residuals.size == 0:
            if first_occurrence(f"{name} has no samples"):
                logger.warning(f"{name} has no samples")
            return cls(name=name, max_abs=0.0, rms=0.0, n_samples=0, threshold=threshold)
        if not np.all(np.isfinite(residuals)):
            return cls(name=name, max_abs=float('inf'), rms=float('inf'), n_samples=residuals.size,
                       threshold=threshold)
        return cls(name=name, max_abs=float(residuals.max()), rms=float(np.sqrt(np.mean(residuals ** 2))),
                   n_samples=residuals.size, threshold=threshold)

    def merge(self, other: 'ResidualStats') -> 'ResidualStats':
        """Combine two summaries of the same check."""
        count = self.n_samples + other.n_samples
        mean_square = (self.rms ** 2 * self.n_samples + other.rms ** 2 * other.n_samples) / max(count, 1)
        return ResidualStats(name=self.name, max_abs=max(self.max_abs, other.max_abs), rms=float(np.sqrt(mean_square)),
                             n_samples=count, threshold=max(self.threshold, other.threshold))


class VerificationReport(BaseModel):
    """Ordered check results with the config that produced them."""

    version: int = 1
    config: dict = {}
    checks: List[ResidualStats] = []
    passed: bool = Field(None, alias='pass')

    class Config:
        """Serialize with report names."""

        allow_population_by_field_name = True

    @root_validator(skip_on_failure=True)
    def _overall(cls, values):
        if values.get('passed') is None:
            values['passed'] = all(check.passed for check in values['checks'])
        return values

    def check(self, name: str) -> ResidualStats:
        """Lookup by id."""
        return next(check for check in self.checks if check.name == name)

    def to_json(self) -> str:
        """Deterministic JSON text."""
        return json.dumps(self.dict(by_alias=True), indent=2) + "\n"
