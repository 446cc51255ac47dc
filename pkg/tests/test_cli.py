"""Command line behavior: exit codes, config merging, deterministic output."""

import json

import pytest

import dunkl_lab.suites as suites_mod
from dunkl_lab.cli import main
from dunkl_lab.suites import SuiteResult

SIM_ARGS = [
    "simulate",
    "--family", "B", "--rank", "2", "--mults", "1,1/2",
    "--x0", "0.6,1.7", "--horizon", "0.25", "--ensemble", "8", "--seed", "1",
]


def test_verify_subset_exit_zero(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["verify", "oscillator", "--out", str(out)]) == 0
    assert "PASS oscillator" in capsys.readouterr().out
    payload = json.loads(out.read_text())
    assert payload["results"][0]["passed"] is True
    assert payload["results"][0]["name"] == "oscillator"


def test_verify_failure_exit_two(monkeypatch, capsys):
    def broken(seed=0):
        return SuiteResult(
            name="broken",
            passed=False,
            tolerance=1e-9,
            max_residual=1.0,
            reports=(),
            elapsed=0.0,
        )

    monkeypatch.setitem(suites_mod.SUITES, "broken", broken)
    assert main(["verify", "broken"]) == 2
    assert "FAIL broken" in capsys.readouterr().out


def test_unknown_suite_exit_one(capsys):
    assert main(["verify", "nonesuch"]) == 1
    assert "unknown suite" in capsys.readouterr().err


def test_missing_subcommand_exit_one(capsys):
    assert main([]) == 1
    assert "subcommand" in capsys.readouterr().err


def test_bad_flag_value_exit_one(capsys):
    # argparse errors are rerouted so the exit code stays ours
    assert main(["simulate", "--family", "Q"]) == 1
    capsys.readouterr()


def test_missing_required_option_exit_one(capsys):
    assert main(["simulate", "--family", "B", "--rank", "2"]) == 1
    assert "missing required option" in capsys.readouterr().err


def test_simulate_summary_and_determinism(tmp_path, capsys):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    assert main(SIM_ARGS + ["--out", str(out1)]) == 0
    assert main(SIM_ARGS + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    payload = json.loads(out1.read_text())
    assert payload["summary"]["paths"] == 8
    assert payload["config"]["multiplicities"] == ["1", "1/2"]
    assert payload["moment"]["predicted"] == pytest.approx((2 + 2 * 3.0) * 0.25)
    capsys.readouterr()


def test_simulate_csv_replay(tmp_path, capsys):
    csv_path = tmp_path / "path.csv"
    assert main(SIM_ARGS + ["--csv", str(csv_path), "--path-index", "3"]) == 0
    rows = csv_path.read_text().strip().splitlines()
    assert rows[0] == "t,x1,x2"
    assert len(rows) > 10
    capsys.readouterr()


def test_step_underflow_exit_three(capsys):
    args = [
        "simulate",
        "--family", "B", "--rank", "2", "--mults", "20,0.01",
        "--x0", "0.5,1.0", "--horizon", "10", "--dt", "0.2",
        "--dt-floor-factor", "1.0", "--ensemble", "4", "--seed", "0",
    ]
    assert main(args) == 3
    assert "floor" in capsys.readouterr().err


def test_config_file_merge_flags_win(tmp_path, capsys):
    cfg = {
        "seed": 9,
        "simulate": {
            "family": "B",
            "rank": 2,
            "multiplicities": [1, "1/2"],
            "x0": [0.6, 1.7],
            "horizon": 0.25,
            "ensemble": 4,
        },
    }
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "merged.json"
    rc = main(["--config", str(cfg_path), "simulate",
               "--ensemble", "2", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert payload["config"]["ensemble"] == 2  # flag beats file
    assert payload["config"]["master_seed"] == 9  # global seed reaches the run
    assert payload["config"]["horizon"] == 0.25
    capsys.readouterr()


def test_config_file_rejects_unknown_keys(tmp_path, capsys):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"simulate": {"family": "B", "dt": 0.1}}))
    assert main(["--config", str(cfg_path), "simulate"]) == 1
    assert "rejected" in capsys.readouterr().err
    cfg_path.write_text("{not json")
    assert main(["--config", str(cfg_path), "simulate"]) == 1
    capsys.readouterr()


def test_freeze_without_ode(tmp_path, capsys):
    out = tmp_path / "freeze.json"
    rc = main(["freeze", "--n", "2", "--k", "50", "--paths", "4",
               "--seed", "2", "--no-ode", "--out", str(out)])
    assert rc == 0
    payload = json.loads(out.read_text())
    assert "ode" not in payload
    assert len(payload["samples"]) == 1
    assert payload["samples"][0]["k"] == 50.0
    capsys.readouterr()


def test_roots_outputs(tmp_path, capsys):
    out = tmp_path / "h.json"
    assert main(["roots", "--kind", "hermite", "--n", "4", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    assert len(payload["roots"]) == 4
    assert payload["electrostatic_residual"] < 1e-10

    assert main(["roots", "--kind", "laguerre", "--n", "3", "--alpha", "1.5"]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert all(r > 0 for r in printed["roots"])

    assert main(["roots", "--kind", "system", "--family", "D", "--rank", "4",
                 "--mults", "1"]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["system"]["family"] == "D"
    assert len(printed["system"]["roots"]) == 24
