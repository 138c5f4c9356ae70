"""Suite runner: registry shape, determinism, unknown-suite rejection."""

import pytest

from ckemlab.errors import ParameterDomainError
from ckemlab.report import reports_to_json
from ckemlab.suites import SUITES, SuiteConfig, run_suite


def test_suite_registry_shape():
    assert set(SUITES) == {"ansatz", "invariance", "calibration", "blowup", "all"}
    assert SUITES["all"] == sorted(SUITES["all"])
    assert len(SUITES["all"]) == 10
    for name, members in SUITES.items():
        assert set(members) <= set(SUITES["all"])


def test_unknown_suite_rejected():
    with pytest.raises(ParameterDomainError):
        run_suite("nonexistent", SuiteConfig())


def test_suite_run_is_deterministic():
    first = run_suite("invariance", SuiteConfig(seed=4))
    second = run_suite("invariance", SuiteConfig(seed=4))
    assert reports_to_json(first, zero_runtime=True) \
        == reports_to_json(second, zero_runtime=True)
    reseeded = run_suite("invariance", SuiteConfig(seed=5))
    assert reports_to_json(reseeded, zero_runtime=True) \
        != reports_to_json(first, zero_runtime=True)


def test_tolerance_scaling_is_recorded():
    report, = run_suite("invariance", SuiteConfig(seed=0, tol_scale=100.0))
    assert report.tolerance == 100.0
    assert report.inputs.get("tol_scale_override") == 100.0
