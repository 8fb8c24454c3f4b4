import csv
import io
import json
import subprocess
import sys

import pytest

from pdp_entropy.cli import BOUNDS_COLUMNS, main, read_config_file
from pdp_entropy.trajectory import STEP_COLUMNS


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def read_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_simulate_single_step(capsys):
    code, out, _ = run(capsys, "simulate", "--length", "1", "--alpha", "0", "--theta", "1")
    assert code == 0
    rows = read_rows(out)
    assert list(rows[0]) == list(STEP_COLUMNS)
    assert len(rows) == 1
    row = rows[0]
    assert float(row["a_value"]) == 0.0
    assert float(row["delta"]) == 0.0
    assert row["is_discovery"] == "1"
    assert row["ell"] == "1" and row["k"] == "1"


def test_simulate_rerun_is_byte_identical(tmp_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        assert main(["simulate", "--length", "200", "--replicas", "3", "--seed", "5", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert main(["simulate", "--length", "200", "--replicas", "3", "--seed", "6", "--out", str(paths[1])]) == 0
    assert paths[0].read_bytes() != paths[1].read_bytes()


def test_simulate_replicas(capsys):
    code, out, _ = run(
        capsys, "simulate", "--alpha", "0", "--theta", "1", "--length", "100", "--replicas", "10"
    )
    assert code == 0
    rows = read_rows(out)
    assert len(rows) == 1000
    assert {r["replica"] for r in rows} == {str(i) for i in range(10)}
    assert all(float(r["delta"]) >= -1e-12 for r in rows)
    for r in rows:
        assert (float(r["delta"]) < 1e-12) == (r["is_discovery"] == "1")
        assert float(r["eta"]) > 0


def test_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nalpha = 0.25\ntheta = 2\nlength = 7\nreplicas = 2\n")
    assert read_config_file(str(cfg))["alpha"] == "0.25"
    code, out, _ = run(capsys, "simulate", "--config", str(cfg))
    assert code == 0 and len(read_rows(out)) == 14
    code, out, _ = run(capsys, "simulate", "--config", str(cfg), "--length", "3")
    assert code == 0 and len(read_rows(out)) == 6


def test_bad_config_line(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    code, _, err = run(capsys, "simulate", "--config", str(cfg))
    assert code == 2 and "unrecognised" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["simulate", "--alpha", "1.0"],
        ["simulate", "--alpha", "0.5", "--theta", "-0.5"],
        ["simulate", "--length", "0"],
        ["simulate", "--replicas", "0"],
        ["simulate", "--seed", "-1"],
        ["prior-mc", "--truncation", "10", "--replicas", "10"],
        ["prior-mc", "--replicas", "1"],
        ["verify", "--grid", "0.5"],
        ["simulate", "--config", "/nonexistent/file.cfg"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err.startswith("error:")


def test_unwritable_output(capsys):
    code, _, err = run(capsys, "simulate", "--length", "2", "--out", "/nonexistent/dir/out.csv")
    assert code == 2 and "cannot write" in err


def test_bounds_command(capsys):
    code, out, _ = run(capsys, "bounds", "--alpha", "0.5", "--theta", "1", "--length", "300", "--replicas", "2")
    assert code == 0
    rows = read_rows(out)
    assert list(rows[0]) == list(BOUNDS_COLUMNS)
    assert len(rows) == 600
    for r in rows:
        assert r["out_of_bounds"] == "0"
        assert float(r["eta_lower"]) - 1e-12 <= float(r["eta"]) <= float(r["eta_upper"]) + 1e-12
        assert float(r["h_min"]) - 1e-10 <= float(r["h_pdp"]) <= float(r["h_max"]) + 1e-10


def test_prior_mc_command(capsys, tmp_path):
    out = tmp_path / "prior.json"
    code, text, _ = run(
        capsys, "prior-mc", "--alpha", "0", "--theta", "1", "--replicas", "2000",
        "--truncation", "2000", "--out", str(out),
    )
    assert code == 0
    assert text.startswith("[")
    summary = json.loads(out.read_text())
    assert summary["target"] == pytest.approx(1.0, abs=1e-12)
    assert summary["draws"] == 2000
    assert abs(summary["z_score"]) <= 3


def test_verify_small_grid(capsys, tmp_path):
    out = tmp_path / "verify.json"
    code, text, err = run(
        capsys, "verify", "--grid", "0:1,0.5:0.5", "--length", "200", "--replicas", "20", "--out", str(out)
    )
    assert code == 0, err
    summary = json.loads(out.read_text())
    assert summary["passed"] is True
    assert summary["first_failure"] is None
    assert all(line.startswith("[PASS]") for line in text.splitlines())


def test_module_entry_point(tmp_path):
    out = tmp_path / "x.csv"
    proc = subprocess.run(
        [sys.executable, "-m", "pdp_entropy", "simulate", "--length", "5", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert len(out.read_text().splitlines()) == 6
