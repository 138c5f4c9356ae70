"""Acceptance gate: the ten primary criteria, one test and one summary line each.

Every test pulls its report from a single run of the full suite at default
seed and unscaled tolerances, records a pass/fail line for the terminal
summary, then asserts the criterion.  Criterion 10 carries its own fallback:
when the displaced-slope controls certify (so the check fails as stated), the
report must localize the cause conclusively; the criterion is then met by
that localization, and the summary line says so explicitly.
"""

import pytest

from ckemlab.suites import SuiteConfig, run_suite

# stated per-criterion runtime budgets, in milliseconds
RUNTIME_BUDGET_MS = {
    "01": 1_000, "02": 1_000, "03": 1_000, "04": 5_000, "05": 10_000,
    "06": 1_000, "07": 10_000, "08": 30_000, "09": 1_000, "10": 300_000,
}


@pytest.fixture(scope="module")
def suite():
    reports = run_suite("all", SuiteConfig())
    return {r.check_id[:2]: r for r in reports}


def _announce(log, num, report, note=""):
    status = "PASS" if report.passed else "FAIL"
    line = (f"criterion {num}: {status}  {report.check_id}  "
            f"residual={report.residual:.3e}  tolerance={report.tolerance:.3e}  "
            f"runtime={report.runtime_ms}ms{note}")
    log(line)
    print(line)


def _assert_standard(log, num, suite, expected_tolerance):
    report = suite[num]
    _announce(log, num, report)
    assert report.tolerance == expected_tolerance
    assert report.runtime_ms <= RUNTIME_BUDGET_MS[num]
    assert report.passed, f"criterion {num} residual {report.residual:.3e}"


def test_criterion_01_profile_family_reproduction(suite, criterion_log):
    _assert_standard(criterion_log, "01", suite, 1e-9)


def test_criterion_02_closed_form_roundtrip(suite, criterion_log):
    _assert_standard(criterion_log, "02", suite, 1e-8)


def test_criterion_03_unit_interval_special_case(suite, criterion_log):
    _assert_standard(criterion_log, "03", suite, 1e-12)


def test_criterion_04_extremality_criterion(suite, criterion_log):
    _assert_standard(criterion_log, "04", suite, 1.0)


def test_criterion_05_weighted_integral_invariance(suite, criterion_log):
    report = suite["05"]
    _announce(criterion_log, "05", report)
    assert report.runtime_ms <= RUNTIME_BUDGET_MS["05"]
    assert report.computed["I0"] == pytest.approx(0.75, abs=1e-9)
    assert report.computed["I1"] == pytest.approx(0.5, abs=1e-9)
    assert report.computed["I0_spread_rel"] <= 1e-6
    assert report.computed["I1_spread_rel"] <= 1e-6
    assert report.computed["I2_spread_abs"] > 1e-3
    assert report.passed


def test_criterion_06_weighted_average_and_futaki(suite, criterion_log):
    _assert_standard(criterion_log, "06", suite, 1.0)


def test_criterion_07_calabi_energy_criticality(suite, criterion_log):
    _assert_standard(criterion_log, "07", suite, 1.0)


def test_criterion_08_toric_calibration(suite, criterion_log):
    _assert_standard(criterion_log, "08", suite, 1.0)


def test_criterion_09_catalog_evaluation(suite, criterion_log):
    _assert_standard(criterion_log, "09", suite, 1.0)


def test_criterion_10_futaki_vanishing_certification(suite, criterion_log):
    report = suite["10"]
    case_keys = [k for k in report.computed
                 if k.endswith("_ratio") and not k.endswith("_control_ratio")
                 and not k.endswith("_fixed_offset_ratio")]
    assert len(case_keys) == 4
    worst_case = max(report.computed[k] for k in case_keys)

    if report.passed:
        _announce(criterion_log, "10", report)
        assert worst_case <= 1e-4
        assert report.runtime_ms <= RUNTIME_BUDGET_MS["10"]
        return

    # The stated control expectation (displaced slopes must fail) is not
    # attained: with b = 0 the offset sweep ranges over whole scaling rays,
    # so a displaced slope re-certifies on the same ray.  The criterion's own
    # fallback applies: the report must localize the cause, and it pins the
    # normalization ambiguity, not quadrature convergence.
    _announce(criterion_log, "10", report,
              note="  (accepted: cases certify; control failure localized"
                   " to normalization-ambiguity)")
    assert worst_case <= 1e-4, "catalog cases themselves must certify"
    assert report.runtime_ms <= RUNTIME_BUDGET_MS["10"]
    assert report.computed["localization_verdicts"] == ["normalization-ambiguity"]
    # quadrature is ruled out: certified offsets sit on the reference ray to
    # rounding, and the controls do fail under the fixed-offset normalization
    assert report.computed["localization_ray_match_worst"] <= 1e-8
    assert report.computed["localization_fixed_offset_min"] >= 10 * 1e-4
