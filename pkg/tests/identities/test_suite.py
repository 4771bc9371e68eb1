"""Test the check handlers and the suite that runs them."""

import time

import numpy as np
import pytest

from soliton_forge.common import ForgeError, UsageError, ValidationFailed
from soliton_forge.config import ForgeConfig
from soliton_forge.handlers import CHECKS, FALSIFICATION, SuiteData, handler_factory
from soliton_forge.model import RadialGrid, SolitonProfile
from soliton_forge.observable import Command, ObservableData
from soliton_forge.suite import prepare_suite, reference_profile, run_suite

REPORT_ORDER = ['FIRST_INTEGRAL', 'EQ_GRAD_R', 'EQ_LAP_R', 'EQ_B_NORM', 'EQ_GENERAL', 'EQ_ODE', 'EQ_ODE2',
                'ASYMPTOTICS', 'U_CAUCHY', 'PSI_LT_S', 'EQ_SIMPLIFIED', 'EQ_FINAL', 'FLUX_DECAY', 'DIV_INEQUALITY',
                'FALSIFICATION']


class Sleeper(Command):
    """Returns its id after a delay."""

    delay: float = 0.0

    def interested(self, observable: ObservableData) -> bool:
        return True

    def notify(self, observable: ObservableData, context=None, *args, **kwargs):
        time.sleep(self.delay)
        return self.id


class Failing(Sleeper):
    """Raises once notified."""

    def notify(self, observable: ObservableData, context=None, *args, **kwargs):
        raise UsageError(f"{self.id} failed")


def test_observer_order():
    """Results come back in registration order whatever the scheduling."""
    observable = ObservableData(payload=None, _id='data')
    for index, delay in enumerate([0.2, 0.0, 0.1, 0.05]):
        Sleeper(observable, _id=f"sleeper-{index}", delay=delay)
    expected = ['sleeper-0', 'sleeper-1', 'sleeper-2', 'sleeper-3']
    assert observable.notify_observers(workers=4) == expected
    assert observable.notify_observers(workers=1) == expected


def test_observer_failure_keeps_results():
    """Results finished before a failure ride on the exception."""
    observable = ObservableData(payload=None)
    Sleeper(observable, _id='first')
    Failing(observable, _id='second')
    with pytest.raises(ForgeError) as exc_info:
        observable.notify_observers(workers=1)
    assert exc_info.value.results == ['first']


def test_observable_type_check():
    """Observers need wrapped data."""
    with pytest.raises(TypeError):
        Sleeper({'not': 'observable'})


def test_handler_factory(suite_data):
    """One check per report entry, in report order."""
    observable = ObservableData(payload=suite_data)
    checks = handler_factory(observable)
    assert [check.id for check in checks] == REPORT_ORDER
    assert [id_ for id_, *_ in CHECKS] == REPORT_ORDER
    assert len(observable.observers) == len(REPORT_ORDER)


def test_handler_factory_without_psi(profile):
    """Checks that need psi are not registered."""
    observable = ObservableData(payload=SuiteData(profile=profile))
    handler_factory(observable)
    assert [observer.id for observer in observable.observers] == REPORT_ORDER[:7]


def test_default_suite(config, suite_data):
    """Every check passes on the exact soliton, the report is deterministic."""
    report = run_suite(config, data=suite_data)
    assert [check.name for check in report.checks] == REPORT_ORDER
    failed = [check for check in report.checks if not check.passed]
    assert report.passed, failed
    falsification = report.check(FALSIFICATION)
    assert falsification.max_abs > 0
    assert falsification.n_samples == 9
    assert run_suite(config, data=suite_data).to_json() == report.to_json()


def test_loose_tolerance_suite(config, suite_data):
    """A solve at rel_tol 1e-6 passes the same checks as the default run."""
    loose = run_suite(ForgeConfig(rel_tol=1e-6))
    default = run_suite(config, data=suite_data)
    assert [(check.name, check.passed) for check in loose.checks] == \
           [(check.name, check.passed) for check in default.checks]
    assert loose.passed


def test_perturbed_suite(config, perturbed, suite_data):
    """Perturbed profile fails the identities, falsification is skipped."""
    report = run_suite(config, data=SuiteData(profile=perturbed, psi=suite_data.psi, reference=suite_data.profile))
    assert not report.passed
    assert not report.check('EQ_GRAD_R').passed
    assert not report.check('FIRST_INTEGRAL').passed
    assert FALSIFICATION not in [check.name for check in report.checks]


def test_prepare_suite(config, profile, perturbed):
    """Exact profiles are their own reference, others are solved again."""
    assert reference_profile(config, profile) is profile
    data = prepare_suite(config, perturbed)
    assert np.array_equal(data.profile.r, perturbed.r)
    assert not data.profile.is_exact_soliton
    assert data.reference is not None and data.reference.is_exact_soliton
    assert data.psi is not None


def test_prepare_suite_invalid(config):
    """phi must be positive."""
    nodes = np.linspace(0.1, 5.0, 50)
    broken = SolitonProfile(grid=RadialGrid(nodes=nodes), phi=nodes - 1.0, dphi=np.ones_like(nodes),
                            ddphi=np.zeros_like(nodes), df=nodes / 3.0, ddf=np.full_like(nodes, 1.0 / 3.0))
    with pytest.raises(ValidationFailed) as exc_info:
        run_suite(config, profile=broken)
    assert exc_info.value.violations
    assert exc_info.value.report is not None
    assert not exc_info.value.report.passed
