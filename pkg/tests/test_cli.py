"""CLI surface: exit codes, report determinism, round trips."""

import json
import os
import subprocess
import sys

import pytest

from aomega.cli import main
from aomega.suites import SessionConfig, run_suite


def run_cli(args, stdin_text=None, env=None):
    proc = subprocess.run(
        [sys.executable, "-m", "aomega.cli"] + args,
        input=stdin_text,
        capture_output=True,
        text=True,
        env={**os.environ, **(env or {})},
    )
    return proc


def test_help_everywhere():
    for args in (["--help"], ["torus", "--help"], ["torus", "run", "--help"], ["suite", "run", "--help"]):
        proc = run_cli(args)
        assert proc.returncode == 0
        assert "--" in proc.stdout or "usage" in proc.stdout


def test_unknown_flag_is_usage_error():
    proc = run_cli(["ainf", "verify", "--nonsense", "1"])
    assert proc.returncode == 2


def test_invalid_config_is_usage_error():
    proc = run_cli(["ainf", "verify", "--p", "4"])
    assert proc.returncode == 2
    proc = run_cli(["torus", "run", "--p", "3", "--dim", "9", "--stage", "tilde"])
    assert proc.returncode == 2


def test_ainf_verify_passes():
    proc = run_cli(["ainf", "verify", "--p", "3", "--depth", "2"])
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["passed"] is True


def test_witt_digits_round_trip():
    element = {"p": 3, "precision": 2, "terms": [[[0, 1], "8"]]}
    proc = run_cli(["witt", "digits", "--p", "3", "--precision", "2"], stdin_text=json.dumps(element))
    assert proc.returncode == 0
    payload = json.loads(proc.stdout)
    assert payload["digits"][0]["terms"] == [[[0, 1], "2"]]
    assert payload["digits"][1]["terms"] == []


def test_leta_apply_stream():
    complex_json = {"ring": "Z", "lo": 0, "ranks": [1, 1], "diffs": [["9"]]}
    proc = run_cli(["leta", "apply", "--f", "3"], stdin_text=json.dumps(complex_json))
    assert proc.returncode == 0
    out = json.loads(proc.stdout)
    assert out["diffs"] == [["3"]]
    proc2 = run_cli(["leta", "apply", "--f", "0"], stdin_text=json.dumps(complex_json))
    assert proc2.returncode != 0


def test_torus_run_stages():
    for stage in ("tilde", "ainf", "dr", "ht", "etale", "semicont"):
        proc = run_cli(["torus", "run", "--p", "2", "--depth", "1", "--dim", "1",
                        "--bound", "1", "--stage", stage])
        assert proc.returncode == 0, (stage, proc.stderr)
        json.loads(proc.stdout)


def test_qderham_commands():
    proc = run_cli(["qderham", "table", "--p", "3", "--dim", "1", "--bound", "2"])
    assert proc.returncode == 0
    proc = run_cli(["qderham", "compare", "--p", "2", "--dim", "1", "--bound", "2"])
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["passed"] is True


def test_reports_byte_identical():
    args = ["suite", "run", "--suite", "s4-torus-decomp", "--p", "3", "--seed", "99"]
    a = run_cli(args)
    b = run_cli(args)
    assert a.returncode == 0
    assert a.stdout == b.stdout


def test_report_determinism_in_process():
    cfg = SessionConfig(p=3, seed=123)
    r1 = run_suite("s4-torus-decomp", cfg)
    r2 = run_suite("s4-torus-decomp", cfg)
    assert r1.dumps() == r2.dumps()
    # timing is opt-in and excluded from the canonical payload
    assert "elapsed" not in r1.dumps()


def test_out_file_and_env_dir(tmp_path):
    env = {"AOMEGA_OUT": str(tmp_path)}
    proc = run_cli(
        ["ainf", "verify", "--p", "2", "--depth", "1", "--out", "report.json"], env=env
    )
    assert proc.returncode == 0
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["passed"] is True


def test_suite_exit_code_zero_on_pass():
    proc = run_cli(["suite", "run", "--suite", "s8-semicontinuity", "--p", "2", "--seed", "5"])
    assert proc.returncode == 0


def test_main_entry_point_directly():
    assert main(["ainf", "verify", "--p", "2", "--depth", "1", "--out", "-"]) == 0


def test_session_config_limits():
    with pytest.raises(ValueError):
        SessionConfig(p=15)
    with pytest.raises(ValueError):
        SessionConfig(p=3, dim=5)
    with pytest.raises(ValueError):
        SessionConfig(p=3, bound=9)
    with pytest.raises(ValueError):
        SessionConfig(p=3, precision=5)
