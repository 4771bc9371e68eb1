"""Extract psi(s) and u(s) from the Bryant profile and check the psi ODE and its asymptotics."""

import logging
from typing import Callable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, validator
from scipy.integrate import quad
from scipy.interpolate import CubicHermiteSpline

from soliton_forge.common import AccuracyError, ConfigError, DomainError, RangeError, UsageError, first_occurrence
from soliton_forge.geometry import node_curvature, radial_state, state_curvature, state_ddR
from soliton_forge.model import PsiProfile, ResidualStats, SolitonProfile, frozen_array, weight_derivative

logger = logging.getLogger(__name__)

U_BASE_POINT = 0.5
SUBSTITUTION_START = 0.9
"""Above this u is integrated in tau, t = 1 - tau^2."""
SNAP_TOLERANCE = 1e-12
BISECTION_STEPS = 60

PSI_AT_ONE = 2.0 / 3.0
SLOPE_AT_ONE = -4.0 / 5.0
CUBIC_AT_ZERO = 1.0


class SGrid(BaseModel):
    """Strictly increasing nodes in (0, 1)."""

    nodes: np.ndarray

    class Config:
        """Allow numpy fields, no mutation."""

        arbitrary_types_allowed = True
        allow_mutation = False

    @validator('nodes', pre=True)
    def _check_nodes(cls, nodes):
        nodes = frozen_array(nodes)
        if nodes.ndim != 1 or len(nodes) < 4:
            raise ValueError("s grid needs at least 4 nodes")
        if not (nodes[0] > 0 and nodes[-1] < 1):
            raise ValueError(f"s grid must lie in (0, 1), got [{nodes[0]}, {nodes[-1]}]")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes not increasing")
        return nodes

    @classmethod
    def clustered(cls, s_min: float = 1e-3, top_gap: float = 1e-4, count: int = 1600) -> 'SGrid':
        """Geometric clustering toward both ends of [s_min, 1 - top_gap]."""
        if not 0 < s_min < 0.5 or not 0 < top_gap < 0.5:
            raise ConfigError(f"need 0 < s_min < 1/2 and 0 < top_gap < 1/2, got {s_min}, {top_gap}")
        half = max(count // 2, 2)
        lower = np.geomspace(s_min, 0.5, half)
        upper = 1.0 - np.geomspace(0.5, top_gap, count - half + 1)[1:]
        return cls(nodes=np.concatenate([lower, upper]))

    def refined(self) -> 'SGrid':
        """Twice as many intervals, old nodes kept."""
        mid = 0.5 * (self.nodes[:-1] + self.nodes[1:])
        return SGrid(nodes=np.sort(np.concatenate([self.nodes, mid])))


class TrialFunction(BaseModel):
    """A candidate psi with its derivative; optionally a precomputed weight u."""

    name: str
    value: Callable
    derivative: Callable
    domain: Tuple[float, float] = (0.0, 1.0)
    weight: Optional[Callable] = None
    """u(s), computed by quadrature when absent."""

    class Config:
        """Allow callables."""

        arbitrary_types_allowed = True

    def __call__(self, s):
        return np.asarray(self.value(s), dtype=float) * np.ones_like(np.asarray(s, dtype=float))

    def slope(self, s):
        """psi'(s)."""
        return np.asarray(self.derivative(s), dtype=float) * np.ones_like(np.asarray(s, dtype=float))

    def u(self, s, rel_tol: float = 1e-10):
        """u(s) = log psi(s) + integral from 1/2 to s."""
        if self.weight is not None:
            return self.weight(s)
        s_array = np.atleast_1d(np.asarray(s, dtype=float))
        values = np.array([np.log(float(self(t))) + weight_integral(self, U_BASE_POINT, t, rel_tol)
                           for t in s_array])
        return float(values[0]) if np.ndim(s) == 0 else values

    def du(self, s):
        """u'(s) from psi and psi'."""
        s = np.asarray(s, dtype=float)
        return weight_derivative(s, self(s), self.slope(s))


TRIAL_FUNCTIONS = {
    'half': TrialFunction(name='half', value=lambda s: 0.5 * np.asarray(s), derivative=lambda s: 0.5),
    'two_thirds': TrialFunction(name='two_thirds', value=lambda s: 2.0 / 3.0, derivative=lambda s: 0.0),
    'square': TrialFunction(name='square', value=lambda s: np.asarray(s) ** 2, derivative=lambda s: 2.0 * np.asarray(s)),
}


def trial_function(name: str) -> TrialFunction:
    """Lookup a named trial function."""
    if name not in TRIAL_FUNCTIONS:
        raise ConfigError(f"unknown trial function {name}, expected one of {sorted(TRIAL_FUNCTIONS)}")
    return TRIAL_FUNCTIONS[name]


def psi_trial(psi: PsiProfile) -> TrialFunction:
    """The extracted psi as a trial function, extended linearly to its limit at s = 1."""
    return TrialFunction(name='psi', value=psi.psi_extended, derivative=psi.dpsi_extended,
                         domain=(psi.interval[0], 1.0), weight=psi.u_extended)


def _quad(integrand: Callable, a: float, b: float, rel_tol: float) -> float:
    result = quad(integrand, a, b, epsabs=1e-14, epsrel=rel_tol, limit=200, full_output=1)
    if len(result) > 3:
        raise AccuracyError(f"quadrature over [{a}, {b}] did not converge: {result[3]}", estimate=result[1])
    return result[0]


def weight_integral(psi_fn: Callable, a: float, b: float, rel_tol: float = 1e-10) -> float:
    """Integral of 3/(2(1-t)) - 1/((1-t) psi(t)) from a to b."""
    if a == b:
        return 0.0
    if a > b:
        return -weight_integral(psi_fn, b, a, rel_tol)
    if not (0 < a and b < 1):
        raise DomainError(f"weight integral needs [{a}, {b}] inside (0, 1)")
    total = 0.0
    if a < SUBSTITUTION_START:
        total += _quad(lambda t: (1.5 - 1.0 / float(psi_fn(t))) / (1.0 - t), a, min(b, SUBSTITUTION_START), rel_tol)
    if b > SUBSTITUTION_START:
        low = max(a, SUBSTITUTION_START)
        total += _quad(lambda tau: 2.0 * (1.5 - 1.0 / float(psi_fn(1.0 - tau * tau))) / tau,
                       np.sqrt(1.0 - b), np.sqrt(1.0 - low), rel_tol)
    return total


def _node_weights(psi_fn: Callable, s_nodes: np.ndarray, rel_tol: float) -> np.ndarray:
    """Integral from 1/2 to each node, accumulated node to node."""
    integral = np.empty_like(s_nodes)
    for indices in [np.flatnonzero(s_nodes >= U_BASE_POINT), np.flatnonzero(s_nodes < U_BASE_POINT)[::-1]]:
        previous, running = U_BASE_POINT, 0.0
        for k in indices:
            running += weight_integral(psi_fn, previous, s_nodes[k], rel_tol)
            integral[k] = running
            previous = s_nodes[k]
    return integral


def extrapolate_to_one(s: np.ndarray, values: np.ndarray, window: float = 1e-2, degree: int = 2) -> float:
    """Polynomial fit in t = 1 - s over the topmost nodes, evaluated at t = 0."""
    t = 1.0 - np.asarray(s)
    chosen = t <= window
    if np.count_nonzero(chosen) < degree + 2:
        chosen = np.argsort(t)[:degree + 2]
    coefficients = np.polynomial.polynomial.polyfit(t[chosen], np.asarray(values)[chosen], degree)
    return float(coefficients[0])


def locate_radius(profile: SolitonProfile, s) -> np.ndarray:
    """r(s) with R(r(s)) = s, by bisection inside the node bracket and one Newton step."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    r_nodes = profile.r
    R_nodes = node_curvature(profile).R
    if not np.all(np.diff(R_nodes) < 0):
        raise DomainError("R is not strictly decreasing, r(s) is not defined")
    low, high = R_nodes[-1], R_nodes[0]
    outside = (s < low - SNAP_TOLERANCE) | (s > high + SNAP_TOLERANCE)
    if np.any(outside):
        raise RangeError(f"s={s[outside][0]} outside the range [{low}, {high}] of R")

    index = np.clip(np.searchsorted(-R_nodes, -s, side='left'), 1, len(r_nodes) - 1)
    lo, hi = r_nodes[index - 1].copy(), r_nodes[index].copy()
    radius = np.empty_like(s)
    snapped_top = s >= high
    snapped_bottom = s <= low
    exact = R_nodes[index] == s
    open_ = ~(snapped_top | snapped_bottom | exact)
    radius[snapped_top] = r_nodes[0]
    radius[snapped_bottom] = r_nodes[-1]
    radius[exact & ~snapped_top & ~snapped_bottom] = r_nodes[index[exact & ~snapped_top & ~snapped_bottom]]

    if np.any(open_):
        target, a, b = s[open_], lo[open_], hi[open_]
        for _ in range(BISECTION_STEPS):
            mid = 0.5 * (a + b)
            above = state_curvature(profile, radial_state(profile, mid)).R > target
            a = np.where(above, mid, a)
            b = np.where(above, b, mid)
        guess = 0.5 * (a + b)
        curvature = state_curvature(profile, radial_state(profile, guess))
        radius[open_] = np.clip(guess - (curvature.R - target) / curvature.dR, a, b)

    miss = np.abs(state_curvature(profile, radial_state(profile, radius)).R - s)
    bad = (miss > SNAP_TOLERANCE) & open_
    if np.any(bad):
        raise AccuracyError(f"|R(r(s)) - s| = {miss[bad].max():.3g} at s={s[bad][0]}", estimate=float(miss[bad].max()))
    return radius


def pointwise_psi(profile: SolitonProfile, r) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """s = R(r), psi = -R'/f' and psi' = (d psi/dr)/(dR/dr) read off the profile."""
    state = radial_state(profile, r)
    curvature = state_curvature(profile, state)
    ddR = state_ddR(profile, state, curvature)
    psi = -curvature.dR / state.df
    dpsi_dr = -(ddR * state.df - curvature.dR * state.ddf) / state.df ** 2
    return curvature.R, psi, dpsi_dr / curvature.dR


def extract_psi(profile: SolitonProfile, grid: SGrid = None, rel_tol: float = 1e-10) -> PsiProfile:
    """Sample psi, psi' and u on the s-grid from an exact soliton profile."""
    if not profile.is_exact_soliton:
        raise UsageError("psi can only be extracted from an exact soliton profile")
    grid = grid or SGrid.clustered()
    radius = locate_radius(profile, grid.nodes)
    _, psi, dpsi = pointwise_psi(profile, radius)
    s_nodes = grid.nodes
    spline = CubicHermiteSpline(s_nodes, psi, dpsi)
    u = np.log(psi) + _node_weights(spline, s_nodes, rel_tol)
    psi_profile = PsiProfile(s_nodes=s_nodes, psi=psi, dpsi=dpsi, u=u,
                             limit_at_one=extrapolate_to_one(s_nodes, psi),
                             u_limit_at_one=extrapolate_to_one(s_nodes, u))
    for violation in psi_profile.violations():
        if first_occurrence(f"psi profile: {violation.invariant}"):
            logger.warning(f"psi profile: {violation}")
    logger.info(f"extracted psi on {len(s_nodes)} nodes, psi(1) ~ {psi_profile.limit_at_one:.12f}")
    return psi_profile


def u_of_s(psi: PsiProfile, s: float, rel_tol: float = 1e-9, from_nodes: bool = True) -> float:
    """u(s) by quadrature of the interpolated psi.

    With from_nodes the integral starts at the nearest node's stored u,
    otherwise at the base point 1/2.
    """
    psi.check_range(s)
    if s == U_BASE_POINT:
        return float(np.log(psi.psi_at(s)))
    if not from_nodes:
        return float(np.log(psi.psi_at(s)) + weight_integral(psi.psi_at, U_BASE_POINT, s, rel_tol))
    k = int(np.argmin(np.abs(psi.s_nodes - s)))
    anchor = psi.u[k] - np.log(psi.psi[k])
    return float(np.log(psi.psi_at(s)) + anchor + weight_integral(psi.psi_at, psi.s_nodes[k], s, rel_tol))


def ode_residuals(s, psi, dpsi) -> Tuple[np.ndarray, np.ndarray]:
    """Residuals of the psi ODE and of its rearranged form."""
    ode = -0.75 * psi ** 2 + psi - s ** 2 + s * psi - (1.0 - s) * psi * dpsi
    rearranged = -s * (s - psi) / psi ** 2 - (0.75 - 1.0 / psi + (1.0 - s) * dpsi / psi)
    return ode, rearranged


def touching_bound(s, dpsi):
    """Right side of the rearranged ODE if psi(s) = s, with psi' capped at 1.

    At most -1/4 everywhere, so psi can never touch the diagonal from below.
    """
    s = np.asarray(s, dtype=float)
    return 0.75 - 1.0 / s + (1.0 - s) * np.minimum(dpsi, 1.0) / s


def psi_ode_residual(psi, window: Tuple[float, float] = (0.05, 0.95), threshold: float = 1e-6,
                     s_nodes=None) -> Tuple[ResidualStats, ResidualStats]:
    """EQ_ODE and EQ_ODE2 summaries over the s-window."""
    if isinstance(psi, PsiProfile):
        s, values, slopes = psi.s_nodes, psi.psi, psi.dpsi
    elif isinstance(psi, TrialFunction):
        s = np.asarray(s_nodes if s_nodes is not None else np.linspace(window[0], window[1], 201), dtype=float)
        values, slopes = psi(s), psi.slope(s)
    else:
        raise UsageError(f"expected a PsiProfile or TrialFunction, got {type(psi).__name__}")
    inside = (s >= window[0]) & (s <= window[1])
    ode, rearranged = ode_residuals(s[inside], values[inside], slopes[inside])
    return (ResidualStats.from_residuals('EQ_ODE', ode, threshold),
            ResidualStats.from_residuals('EQ_ODE2', rearranged, threshold))


class AsymptoticsFit(BaseModel):
    """Fitted expansions of psi at s = 1 and s = 0."""

    value_at_one: float
    slope_at_one: float
    remainder_at_one: float
    top_nodes: int
    cubic_at_zero: float
    remainder_at_zero: float
    bottom_nodes: int

    def deviations(self) -> List[float]:
        """Distance to the expected coefficients, in units of their tolerances."""
        return [abs(self.value_at_one - PSI_AT_ONE) / 1e-3,
                abs(self.slope_at_one - SLOPE_AT_ONE) / 0.05,
                abs(self.cubic_at_zero - CUBIC_AT_ZERO) / 0.05]


def asymptotics_check(psi: PsiProfile, top_window: float = 1e-2, bottom_window: float = 0.05) -> AsymptoticsFit:
    """Fit psi ~ a + b (1-s) near 1 and (psi - s^2)/s^3 ~ c + d s + e s^2 near 0."""
    s = psi.s_nodes
    if s[0] > 1e-3 * (1 + 1e-9) or 1.0 - s[-1] > 1e-3 * (1 + 1e-9):
        raise ConfigError(f"s grid [{s[0]}, {s[-1]}] must reach within 1e-3 of both endpoints")
    top = 1.0 - s <= top_window
    bottom = s <= bottom_window
    if np.count_nonzero(top) < 4 or np.count_nonzero(bottom) < 4:
        raise ConfigError(f"fit windows hold {np.count_nonzero(top)} and {np.count_nonzero(bottom)} nodes, need 4")

    t = 1.0 - s[top]
    a, b = np.polynomial.polynomial.polyfit(t, psi.psi[top], 1)
    remainder_at_one = np.abs(psi.psi[top] - (a + b * t)).max()

    small = s[bottom]
    scaled = (psi.psi[bottom] - small ** 2) / small ** 3
    # weights s^3: residuals are measured in psi, not in (psi - s^2) / s^3
    c, d, e = np.polynomial.polynomial.polyfit(small, scaled, 2, w=small ** 3)
    remainder_at_zero = np.abs(psi.psi[bottom] - small ** 2 - small ** 3 * (c + d * small + e * small ** 2)).max()

    fit = AsymptoticsFit(value_at_one=a, slope_at_one=b, remainder_at_one=remainder_at_one,
                         top_nodes=int(np.count_nonzero(top)), cubic_at_zero=c, remainder_at_zero=remainder_at_zero,
                         bottom_nodes=int(np.count_nonzero(bottom)))
    logger.debug(f"asymptotics {fit}")
    return fit


class CauchySequence(BaseModel):
    """|u(1 - delta) - u(1 - delta/2)| for halving delta."""

    deltas: List[float]
    differences: List[float]

    @property
    def monotonicity_violation(self) -> float:
        """Total increase along the sequence, zero when it only shrinks."""
        return float(sum(max(later - earlier, 0.0) for earlier, later in zip(self.differences, self.differences[1:])))

    @property
    def finest(self) -> float:
        """Last difference."""
        return self.differences[-1]


def u_cauchy(psi: PsiProfile, start: float = 1e-2, rel_tol: float = 1e-9) -> CauchySequence:
    """Halve delta from start while 1 - delta/2 stays on the grid."""
    top_gap = 1.0 - psi.s_nodes[-1]
    deltas, differences = [], []
    delta = start
    while delta / 2 >= top_gap:
        deltas.append(delta)
        differences.append(abs(u_of_s(psi, 1.0 - delta, rel_tol) - u_of_s(psi, 1.0 - delta / 2, rel_tol)))
        delta /= 2
    if not deltas:
        raise ConfigError(f"top gap {top_gap} leaves no room for the u sequence starting at {start}")
    return CauchySequence(deltas=deltas, differences=differences)
