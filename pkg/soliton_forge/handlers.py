"""Handle check observations: one handler per report entry."""

import logging
from functools import reduce
from typing import Callable, List, Optional

import numpy as np
from pydantic import BaseModel, PrivateAttr

from soliton_forge.common import first_occurrence
from soliton_forge.config import ForgeConfig
from soliton_forge.geometry import radial_state, state_curvature
from soliton_forge.identities import (POINTWISE_IDS, IdentityId, div_inequality_check, flux_scale, identity_residual,
                                      perturb, relative_flux)
from soliton_forge.model import PsiProfile, ResidualStats, SolitonProfile
from soliton_forge.observable import Command, Context, ObservableData
from soliton_forge.psi import asymptotics_check, psi_ode_residual, touching_bound, trial_function, u_cauchy
from soliton_forge.solver import first_integral_defect

logger = logging.getLogger(__name__)

FIRST_INTEGRAL = 'FIRST_INTEGRAL'
ASYMPTOTICS = 'ASYMPTOTICS'
U_CAUCHY = 'U_CAUCHY'
PSI_LT_S = 'PSI_LT_S'
FALSIFICATION = 'FALSIFICATION'

U_CAUCHY_THRESHOLD = 1e-3
FALSIFICATION_FACTOR = 10.0
"""Perturbed residuals must exceed this many thresholds."""
HALVING_RATIO = (1.5, 2.5)


class SuiteData(BaseModel):
    """What the checks observe."""

    profile: SolitonProfile
    """Profile under test."""
    psi: Optional[PsiProfile] = None
    """psi extracted from the exact soliton."""
    reference: Optional[SolitonProfile] = None
    """The exact soliton psi came from, when the profile under test is not one."""

    class Config:
        """Allow numpy backed models."""

        arbitrary_types_allowed = True


class CheckContext(Context):
    """Config shared by every check of one run."""

    config: ForgeConfig


class Check(Command):
    """A report entry computed by a handler function."""

    needs_psi: bool = False
    exact_only: bool = False
    _handler: Callable = PrivateAttr()

    def set_handler(self, handler: Callable) -> None:
        """Set the function that computes our entry."""
        self._handler = handler

    @property
    def handler(self) -> Callable:
        """Function computing this check."""
        return self._handler

    def interested(self, observable: ObservableData) -> bool:
        """Skip checks whose inputs are missing."""
        data: SuiteData = observable.payload
        if self.needs_psi and data.psi is None:
            return False
        if self.exact_only and not data.profile.is_exact_soliton:
            return False
        return True

    def notify(self, observable: ObservableData, context: CheckContext = None, *args, **kwargs) -> ResidualStats:
        """Delegate to handler, log the verdict."""
        stats = self._handler(check=self, data=observable.payload, context=context)
        verdict = 'pass' if stats.passed else 'FAIL'
        logger.info(f"{stats.name:<15} max_abs={stats.max_abs:.3e} threshold={stats.threshold:.1e} {verdict}")
        return stats


def _identity_stats(profile: SolitonProfile, psi: Optional[PsiProfile], id_: IdentityId, config: ForgeConfig,
                    threshold: float) -> ResidualStats:
    """Pointwise residual; the general identity is taken over every configured trial function."""
    if id_ == IdentityId.EQ_GENERAL:
        return reduce(ResidualStats.merge, [identity_residual(profile, trial_function(name), id_, config.window,
                                                              threshold)
                                            for name in config.trial_functions])
    return identity_residual(profile, psi, id_, config.window, threshold)


def first_integral_handler(check: Check, data: SuiteData, context: CheckContext) -> ResidualStats:
    """R + f'^2 - 1 at every node."""
    return first_integral_defect(data.profile, threshold=context.config.scaled(context.config.threshold_conservation))


def identity_handler(check: Check, data: SuiteData, context: CheckContext) -> ResidualStats:
    """Pointwise identity named by the check id."""
    config = context.config
    id_ = IdentityId(check.id)
    threshold = config.scaled(config.threshold_pointwise)
    stats = _identity_stats(data.profile, data.psi, id_, config, threshold)
    if id_ in (IdentityId.EQ_ODE, IdentityId.EQ_ODE2) and data.psi is not None and data.profile.is_exact_soliton:
        ode, rearranged = psi_ode_residual(data.psi, config.psi_window, threshold)
        stats = stats.merge(ode if id_ == IdentityId.EQ_ODE else rearranged)
    return stats


def asymptotics_handler(check: Check, data: SuiteData, context: CheckContext) -> ResidualStats:
    """Largest fitted coefficient deviation, in units of its tolerance."""
    fit = asymptotics_check(data.psi)
    deviations = np.array(fit.deviations())
    logger.info(f"psi(1) ~ {fit.value_at_one:.6f}, slope at 1 ~ {fit.slope_at_one:.4f}, "
                f"cubic at 0 ~ {fit.cubic_at_zero:.4f}")
    return ResidualStats(name=ASYMPTOTICS, max_abs=float(deviations.max()), rms=float(np.sqrt(np.mean(deviations ** 2))),
                         n_samples=fit.top_nodes + fit.bottom_nodes, threshold=1.0)


def u_cauchy_handler(check: Check, data: SuiteData, context: CheckContext) -> ResidualStats:
    """Finest difference plus any increase along the sequence."""
    sequence = u_cauchy(data.psi)
    differences = np.array(sequence.differences)
    logger.debug(f"u Cauchy differences {dict(zip(sequence.deltas, sequence.differences))}")
    return ResidualStats(name=U_CAUCHY, max_abs=sequence.finest + sequence.monotonicity_violation,
                         rms=float(np.sqrt(np.mean(differences ** 2))), n_samples=len(differences),
                         threshold=U_CAUCHY_THRESHOLD)


def psi_below_diagonal_handler(check: Check, data: SuiteData, context: CheckContext) -> ResidualStats:
    """Amount by which psi reaches s, zero when psi < s everywhere."""
    psi = data.psi
    margin = psi.s_nodes - psi.psi
    worst = int(np.argmin(margin))
    logger.info(f"min(s - psi) = {margin[worst]:.6e} at s={psi.s_nodes[worst]:.6f}, "
                f"touching bound <= {touching_bound(psi.s_nodes, psi.dpsi).max():.4f}")
    return ResidualStats.from_residuals(PSI_LT_S, np.maximum(-margin, 0.0), threshold=0.0)


def _inside(profile: SolitonProfile, psi: PsiProfile, radii: np.ndarray, name: str) -> np.ndarray:
    """Radii on the profile whose R lies on the psi grid; the rest are skipped with a warning."""
    low, high = profile.interval
    on_profile = radii[(radii >= low) & (radii <= high)]
    kept = on_profile
    if on_profile.size:
        R = state_curvature(profile, radial_state(profile, on_profile)).R
        kept = on_profile[(R >= psi.s_nodes[0]) & (R <= psi.s_nodes[-1])]
    skipped = sorted(set(radii.tolist()) - set(kept.tolist()))
    if skipped and first_occurrence(f"{name} skipped radii {skipped}"):
        logger.warning(f"{name} skipped radii {skipped}, outside the profile or the psi grid")
    return kept


def flux_decay_handler(check: Check, data: SuiteData, context: CheckContext) -> ResidualStats:
    """Relative weighted flux through spheres of radius 2^l."""
    config = context.config
    radii = _inside(data.profile, data.psi, 2.0 ** np.arange(config.flux_levels + 1), check.id)
    values = relative_flux(data.profile, data.psi, radii) if radii.size else radii
    logger.debug(f"relative flux {dict(zip(radii.tolist(), np.atleast_1d(values).tolist()))}")
    return ResidualStats.from_residuals(check.id, values, config.scaled(config.threshold_integral))


def div_inequality_handler(check: Check, data: SuiteData, context: CheckContext) -> ResidualStats:
    """Excess of lhs over rhs on each ball, relative to the flux scale when that exceeds one."""
    config = context.config
    radii = _inside(data.profile, data.psi, np.array(config.inequality_radii, dtype=float), check.id)
    excess = []
    for r in radii:
        lhs, rhs = div_inequality_check(data.profile, data.psi, float(r), rel_tol=config.rel_tol)
        excess.append(max(lhs - rhs, 0.0) / max(1.0, flux_scale(data.profile, data.psi, float(r))))
        logger.debug(f"ball r={r}: lhs={lhs:.3e} rhs={rhs:.3e}")
    return ResidualStats.from_residuals(check.id, excess, config.scaled(config.inequality_tolerance))


def _falsified(profile: SolitonProfile, psi: PsiProfile, config: ForgeConfig) -> dict:
    """Unscaled residuals of the conservation law and every pointwise identity."""
    residuals = {FIRST_INTEGRAL: first_integral_defect(profile, config.threshold_conservation).max_abs}
    for id_ in POINTWISE_IDS:
        residuals[id_.value] = _identity_stats(profile, psi, id_, config, config.threshold_pointwise).max_abs
    return residuals


def falsification_handler(check: Check, data: SuiteData, context: CheckContext) -> ResidualStats:
    """Perturb at delta and delta/2; every residual must exceed ten thresholds and halve with delta.

    Each identity contributes max(10 threshold / residual, |ratio - 2| / 0.5), which is at most
    one exactly when both conditions hold.
    """
    config = context.config
    amplitude = config.perturbation_amplitude
    full = _falsified(perturb(data.profile, config.perturbation_spec(amplitude)), data.psi, config)
    half = _falsified(perturb(data.profile, config.perturbation_spec(amplitude / 2)), data.psi, config)
    quotients = []
    for name, residual in full.items():
        threshold = config.threshold_conservation if name == FIRST_INTEGRAL else config.threshold_pointwise
        ratio = residual / half[name] if half[name] > 0 else float('inf')
        middle = 0.5 * (HALVING_RATIO[0] + HALVING_RATIO[1])
        spread = 0.5 * (HALVING_RATIO[1] - HALVING_RATIO[0])
        size = FALSIFICATION_FACTOR * threshold / residual if residual > 0 else float('inf')
        quotients.append(max(size, abs(ratio - middle) / spread))
        logger.debug(f"falsified {name}: residual {residual:.3e} at delta={amplitude}, ratio {ratio:.3f}")
    return ResidualStats.from_residuals(FALSIFICATION, quotients, threshold=1.0)


CHECKS: List[tuple] = [
    # (id, handler, needs psi, exact soliton only)
    (FIRST_INTEGRAL, first_integral_handler, False, False),
    (IdentityId.EQ_GRAD_R.value, identity_handler, False, False),
    (IdentityId.EQ_LAP_R.value, identity_handler, False, False),
    (IdentityId.EQ_B_NORM.value, identity_handler, False, False),
    (IdentityId.EQ_GENERAL.value, identity_handler, False, False),
    (IdentityId.EQ_ODE.value, identity_handler, False, False),
    (IdentityId.EQ_ODE2.value, identity_handler, False, False),
    (ASYMPTOTICS, asymptotics_handler, True, False),
    (U_CAUCHY, u_cauchy_handler, True, False),
    (PSI_LT_S, psi_below_diagonal_handler, True, False),
    (IdentityId.EQ_SIMPLIFIED.value, identity_handler, True, False),
    (IdentityId.EQ_FINAL.value, identity_handler, True, False),
    (IdentityId.FLUX_DECAY.value, flux_decay_handler, True, False),
    (IdentityId.DIV_INEQUALITY.value, div_inequality_handler, True, False),
    (FALSIFICATION, falsification_handler, True, True),
]


def handler_factory(observable: ObservableData = None) -> List[Check]:
    """Create every check in report order, registered with observable if given."""
    checks = []
    for id_, handler, needs_psi, exact_only in CHECKS:
        check = Check(_id=id_, needs_psi=needs_psi, exact_only=exact_only)
        check.set_handler(handler)
        check.observe(observable)
        checks.append(check)
    return checks
