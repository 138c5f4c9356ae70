"""Report plumbing and the command-line surface."""

import dataclasses
import json

import pytest

from ckemlab.cli import main
from ckemlab.report import (VerificationReport, emit, make_report,
                            reports_from_json, reports_to_csv, reports_to_json)


def _sample_reports():
    r1 = make_report("alpha_check", inputs={"p": 0.5}, computed={"value": 1.0},
                     residual=1e-12, tolerance=1e-9,
                     provenance="toric-calibration", runtime_ms=12)
    r2 = make_report("beta_check", inputs={"m": 2, "grid": [1, 2]},
                     computed={"worst": 3.0}, residual=2.0, tolerance=1.0,
                     provenance="futaki-character", seed=7, runtime_ms=34)
    return [r1, r2]


def test_pass_flag_is_derived_from_residual():
    ok = make_report("x", inputs={}, computed={}, residual=0.5, tolerance=1.0,
                     provenance="profile-ode")
    assert ok.passed
    bad = make_report("x", inputs={}, computed={}, residual=2.0, tolerance=1.0,
                      provenance="profile-ode")
    assert not bad.passed
    nonfinite = make_report("x", inputs={}, computed={}, residual=float("inf"),
                            tolerance=float("inf"), provenance="profile-ode")
    assert not nonfinite.passed
    nan = make_report("x", inputs={}, computed={}, residual=float("nan"),
                      tolerance=1.0, provenance="profile-ode")
    assert not nan.passed


def test_report_validation_rejects_bad_fields():
    with pytest.raises(ValueError):
        make_report("x", inputs={}, computed={}, residual=0.0, tolerance=1.0,
                    provenance="made-up-anchor")
    with pytest.raises(ValueError):
        VerificationReport(check_id="x", inputs={}, computed={}, residual=0.0,
                           tolerance=1.0, passed=False, provenance="profile-ode")


def test_reports_json_round_trip():
    reports = _sample_reports()
    restored = reports_from_json(reports_to_json(reports))
    assert [r.to_dict() for r in restored] \
        == [r.to_dict() for r in sorted(reports, key=lambda r: r.check_id)]


def test_serialization_is_deterministic_up_to_runtime():
    reports = _sample_reports()
    jittered = [dataclasses.replace(r, runtime_ms=r.runtime_ms + 5)
                for r in reports]
    for fn in (reports_to_json, reports_to_csv):
        assert fn(reports, zero_runtime=True) == fn(jittered, zero_runtime=True)
        assert fn(reports) != fn(jittered)


def test_csv_header_and_blank_seed():
    text = reports_to_csv(_sample_reports())
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    assert header[:7] == ["check_id", "residual", "tolerance", "pass",
                          "provenance", "seed", "runtime_ms"]
    assert header[7:] == sorted(header[7:])
    first = lines[1].split(",")
    assert first[0] == "alpha_check"
    assert first[5] == ""


def test_emit_formats(tmp_path):
    reports = _sample_reports()
    jpath, cpath = tmp_path / "r.json", tmp_path / "r.csv"
    emit(reports, "json", jpath)
    emit(reports, "csv", cpath)
    assert json.loads(jpath.read_text())[0]["check_id"] == "alpha_check"
    assert cpath.read_text().endswith("\n")
    with pytest.raises(ValueError):
        emit(reports, "yaml", tmp_path / "r.yaml")


# -- command-line surface ----------------------------------------------------


def test_cli_verify_suite_passes(capsys):
    assert main(["verify", "invariance"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "1/1 checks passed" in out


def test_cli_ansatz_solve_writes_json(tmp_path, capsys):
    out = tmp_path / "profile.json"
    code = main(["ansatz", "solve", "--m", "2", "--a", "1", "--b", "2",
                 "--B", "0", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert data["m"] == 2 and data["c"] == pytest.approx(-4.0)
    text = capsys.readouterr().out
    assert "positivity: positive_by_sampling" in text


def test_cli_ansatz_ckem(capsys):
    assert main(["ansatz", "ckem", "--m", "2", "--a", "1", "--b", "2"]) == 0
    out = capsys.readouterr().out
    assert "B*=-3" in out
    assert "feasible=True" in out


def test_cli_ansatz_plot_writes_svg(tmp_path):
    out = tmp_path / "profile.svg"
    code = main(["ansatz", "plot", "--m", "2", "--a", "1", "--b", "2",
                 "--out", str(out)])
    assert code == 0
    assert "<svg" in out.read_text()[:2000]


def test_cli_blowup_catalog(capsys):
    assert main(["blowup", "catalog", "--p", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "case 1: a=" in out
    # the square-root pair needs 9p^2 > 8p, which fails at p = 0.5
    assert "case 2: invalid" in out


def test_cli_blowup_verify_single_case(capsys):
    code = main(["blowup", "verify", "--p", "0.2", "--case", "4"])
    out = capsys.readouterr().out
    assert code == 0
    assert "PASS" in out and "1/1 checks passed" in out


def test_cli_blowup_verify_invalid_case(capsys):
    code = main(["blowup", "verify", "--p", "0.2", "--case", "2"])
    captured = capsys.readouterr()
    assert code == 1
    assert "invalid" in captured.err


def test_cli_blowup_verify_unknown_case(capsys):
    code = main(["blowup", "verify", "--p", "0.2", "--case", "99"])
    assert code == 2
    assert "no case 99" in capsys.readouterr().err


def test_cli_blowup_search(capsys):
    assert main(["blowup", "search", "--p", "0.5"]) == 0
    out = capsys.readouterr().out
    assert "found 1 critical slopes" in out
    assert "-0.585786" in out


def test_cli_futaki_eval_fixed_offset(capsys):
    code = main(["futaki", "eval", "--p", "0.5", "--a", "-0.1715728752538097",
                 "--b", "0", "--c", "0.29289321881345254"])
    assert code == 0
    out = capsys.readouterr().out
    assert "cbar = " in out
    norm = float(out.rsplit("norm = ", 1)[1].split()[0])
    assert norm <= 1e-8


def test_cli_futaki_eval_sweep(capsys):
    code = main(["futaki", "eval", "--p", "0.5", "--a", "-0.1715728752538097",
                 "--b", "0"])
    assert code == 0
    out = capsys.readouterr().out
    assert "best offset c* = 0.292893" in out


def test_cli_config_file_flags_win(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("m = 3\na = 1.0\nb = 2.0  # inline comment\nB 0.5\n")
    code = main(["ansatz", "solve", "--config", str(cfg), "--b", "3.0"])
    assert code == 0
    out = capsys.readouterr().out
    assert "m=3 interval=[1, 3]" in out


def test_cli_config_file_malformed(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("justakey\n")
    assert main(["ansatz", "solve", "--config", str(cfg)]) == 2
    assert "malformed config line" in capsys.readouterr().err


def test_cli_domain_error_exits_one(capsys):
    assert main(["blowup", "catalog", "--p", "1.5"]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_usage_error_exits_two():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "bogus"])
    assert exc.value.code == 2
