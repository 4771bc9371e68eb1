"""Run every check against a profile and collect the report."""

import logging

from soliton_forge.common import ForgeError, ValidationFailed
from soliton_forge.config import ForgeConfig
from soliton_forge.handlers import CheckContext, SuiteData, handler_factory
from soliton_forge.model import SolitonProfile, VerificationReport, validate_profile
from soliton_forge.observable import ObservableData
from soliton_forge.psi import extract_psi
from soliton_forge.solver import solve_bryant

logger = logging.getLogger(__name__)


def reference_profile(config: ForgeConfig, profile: SolitonProfile = None) -> SolitonProfile:
    """The profile itself when it is an exact soliton, otherwise a fresh solve."""
    if profile is not None and profile.is_exact_soliton:
        return profile
    return solve_bryant(config.solver_config())


def _validate(config: ForgeConfig, profile: SolitonProfile) -> SolitonProfile:
    violations = validate_profile(profile, config.scaled(config.threshold_conservation))
    if violations:
        for violation in violations[:10]:
            logger.error(f"invalid profile: {violation}")
        raise ValidationFailed(f"profile violates {len(violations)} invariants, first: {violations[0]}",
                               violations=violations)
    return profile


def prepare_suite(config: ForgeConfig, profile: SolitonProfile = None) -> SuiteData:
    """Validate the profile, solve if needed, extract psi from the exact soliton."""
    if profile is not None:
        _validate(config, profile)
    reference = reference_profile(config, profile)
    if profile is None:
        profile = _validate(config, reference)
    psi = extract_psi(reference, config.s_grid(), rel_tol=config.rel_tol)
    return SuiteData(profile=profile, psi=psi, reference=None if reference is profile else reference)


def run_suite(config: ForgeConfig = None, profile: SolitonProfile = None, data: SuiteData = None) -> VerificationReport:
    """Prepare unless data is given, then run the checks concurrently.

    A ForgeError raised on the way carries a failed report holding the
    checks that finished before it in `error.report`.
    """
    config = config or ForgeConfig()
    try:
        if data is None:
            data = prepare_suite(config, profile)
        observable = ObservableData(payload=data, _id='exact soliton' if data.profile.is_exact_soliton else 'profile')
        handler_factory(observable)
        checks = observable.assert_observers().notify_observers(context=CheckContext(config=config),
                                                                workers=config.workers)
    except ForgeError as exc:
        exc.report = VerificationReport(config=config.dict(), checks=exc.results or [], passed=False)
        raise
    report = VerificationReport(config=config.dict(), checks=checks)
    failed = [check.name for check in report.checks if not check.passed]
    logger.info(f"{len(report.checks)} checks, {'all pass' if report.passed else f'failed: {failed}'}")
    return report
