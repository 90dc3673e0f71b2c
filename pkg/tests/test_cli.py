import json
import math

import numpy as np
import pytest

from nntlab.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_simulate_csv_layout(capsys, tmp_path):
    out = tmp_path / "sim.csv"
    code, _, _ = run_cli(
        capsys,
        "simulate", "--space", "rrt", "--n", "300", "--reps", "10",
        "--seed", "5", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("seed,space,d,n,mean_siblings")
    body = [l for l in lines if not l.startswith("#")]
    assert len(body) == 1 + 10 + 1  # header, reps, aggregate
    assert body[-1].startswith("aggregate,")
    assert lines[-1].startswith("# version=")


def test_simulate_byte_identical_and_worker_invariant(capsys, tmp_path):
    a, b, c = (tmp_path / name for name in ("a.csv", "b.csv", "c.csv"))
    args = ["simulate", "--space", "torus", "--d", "2", "--n", "500",
            "--reps", "6", "--seed", "9"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert main(args + ["--out", str(c), "--workers", "2"]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() == c.read_bytes()


def test_simulate_json_mirrors_csv_columns(capsys, tmp_path):
    out = tmp_path / "sim.json"
    code, _, _ = run_cli(
        capsys,
        "simulate", "--space", "sphere", "--d", "1", "--n", "200", "--reps", "3",
        "--seed", "2", "--format", "json", "--out", str(out),
    )
    assert code == 0
    payload = json.loads(out.read_text())
    assert set(payload) == {"rows", "version", "config_hash"}
    columns = (
        "seed", "space", "d", "n", "mean_siblings", "mean_sq_degree",
        "root_degree", "leaf_count", "depth_last", "stderr_mean_siblings",
    )
    for row in payload["rows"]:
        assert tuple(row) == columns


def test_usage_errors_exit_two(capsys):
    assert run_cli(capsys, "simulate", "--space", "sphere", "--n", "100")[0] == 2
    assert run_cli(capsys, "simulate", "--space", "sphere", "--d", "0", "--n", "100", "--seed", "1")[0] == 2
    assert run_cli(capsys, "simulate", "--space", "rrt", "--d", "2", "--n", "100", "--seed", "1")[0] == 2
    assert run_cli(capsys, "quadrature", "--d", "0")[0] == 2
    assert run_cli(capsys, "quadrature", "--d", "2", "--tol", "-1")[0] == 2
    assert run_cli(capsys, "locallimit", "--d", "1", "--L", "100", "--reps", "4")[0] == 2
    assert run_cli(capsys, "locallimit", "--d", "2", "--L", "1.5", "--reps", "4", "--seed", "1")[0] == 2
    assert run_cli(capsys, "nonsense")[0] == 2


def test_quadrature_rows_and_consistency(capsys):
    code, out, _ = run_cli(capsys, "quadrature", "--d", "2..4", "--tol", "1e-7")
    assert code == 0
    lines = [l for l in out.splitlines() if l and not l.startswith("#")]
    header, rows = lines[0].split(","), lines[1:]
    assert len(rows) == 3
    for row in rows:
        rec = dict(zip(header, row.split(",")))
        s_d = float(rec["S_d"])
        gap = abs(s_d - (2.0 - float(rec["T_plus"]) + float(rec["T_minus"])))
        assert gap <= 10 * float(rec["err"]) + 1e-9
        assert 1.0 < s_d < 2.0


def test_quadrature_dimension_one_note(capsys):
    code, out, _ = run_cli(capsys, "quadrature", "--d", "1")
    assert code == 0
    assert repr(1.0 + math.log(2.0)) in out
    assert "closed form" in out


def test_locallimit_output(capsys, tmp_path):
    out = tmp_path / "loc.csv"
    code, _, _ = run_cli(
        capsys,
        "locallimit", "--d", "1", "--L", "200", "--reps", "8",
        "--seed", "3", "--out", str(out),
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "d,L,reps,estimate,std_error"
    body = [l for l in lines if not l.startswith("#")]
    assert len(body) == 3  # header + window + doubled window
    assert any(l.startswith("# window_doubling_consistent=") for l in lines)


def test_verify_quick_passes(capsys):
    code, out, _ = run_cli(capsys, "verify", "--quick")
    assert code == 0
    assert "overall: PASS" in out


def test_verify_fault_injection_fails(capsys):
    code, out, _ = run_cli(capsys, "verify", "--quick", "--fault-inject-lens")
    assert code == 1
    assert "lens-lower-bounds" in out and "FAIL" in out
