import json
import random
import subprocess
import sys

import pathlib

import numpy as np
import pytest

from lagns import __version__
from lagns.cli import geometric_times, main
from lagns.diagnostics import CSV_HEADER

EQUILIBRIUM = """problem.length = 10
grid.dx = 0.1
initial.profile = equilibrium
run.t_end = 3
"""

BUMP = """problem.length = 10
grid.dx = 0.1
gas.beta = 1.5
initial.profile = large-data-composite
run.t_end = 2
"""


def write_cfg(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_geometric_times():
    assert geometric_times(10.0) == [0.0, 1.0, 2.0, 4.0, 8.0, 10.0]
    assert geometric_times(0.0) == [0.0]
    assert geometric_times(4.0) == [0.0, 1.0, 2.0, 4.0]


def test_version(capsys):
    assert main(["version"]) == 0
    assert capsys.readouterr().out.strip() == __version__


def test_unknown_subcommand_is_usage_error():
    assert main(["frobnicate"]) == 2


def test_run_equilibrium(tmp_path, capsys):
    out = tmp_path / "eq"
    assert main(["run", write_cfg(tmp_path, EQUILIBRIUM), "--out", str(out)]) == 0
    line = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert line["t_final"] == 3.0 and line["final_Linf_dev"] == 0.0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["pass_energy_inequality"] and summary["pass_positivity"] and summary["completed"]
    assert (out / "diagnostics.csv").read_text().splitlines()[0] == ",".join(CSV_HEADER)
    snaps = sorted(p.name for p in out.glob("snapshot_t*.csv"))
    assert snaps == ["snapshot_t0.csv", "snapshot_t1.csv", "snapshot_t2.csv", "snapshot_t3.csv"]
    assert (out / "snapshot_t2.csv").read_text().splitlines()[0] == "x,v,u,theta"
    assert (out / "diagnostics.png").stat().st_size > 0
    assert (out / "profiles.png").stat().st_size > 0


def test_run_replay_is_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path, BUMP)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["run", cfg, "--out", str(a)]) == 0
    assert main(["run", cfg, "--out", str(b)]) == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_cadence_thins_rows(tmp_path):
    cfg = write_cfg(tmp_path, BUMP)
    assert main(["run", cfg, "--out", str(tmp_path / "c1")]) == 0
    assert main(["run", cfg, "--out", str(tmp_path / "c5"), "--cadence", "5"]) == 0
    rows1 = np.genfromtxt(tmp_path / "c1" / "diagnostics.csv", delimiter=",", names=True)
    rows5 = np.genfromtxt(tmp_path / "c5" / "diagnostics.csv", delimiter=",", names=True)
    assert len(rows5) < len(rows1)
    assert rows5["t"][0] == 0.0 and rows5["t"][-1] == 2.0


def test_seedless_passes_and_detects_rng_use(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path, EQUILIBRIUM)
    assert main(["run", cfg, "--out", str(tmp_path / "s"), "--seedless"]) == 0
    import lagns.cli as cli
    real = cli.do_run

    def noisy(*a, **k):
        random.random()
        return real(*a, **k)

    monkeypatch.setattr(cli, "do_run", noisy)
    assert main(["run", cfg, "--out", str(tmp_path / "s2"), "--seedless"]) == 3


def test_bad_config_reports_json_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "gas.beta = 0\n")
    assert main(["run", cfg, "--out", str(tmp_path / "x")]) == 1
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "ConfigError" and "beta" in err["message"]


def test_missing_config_file(tmp_path, capsys):
    assert main(["run", str(tmp_path / "nope.cfg")]) == 1
    assert "error" in json.loads(capsys.readouterr().err.strip())


def test_verify_convergence_equilibrium(tmp_path):
    cfg = write_cfg(tmp_path, "verify.case = equilibrium\nverify.levels = 3\nverify.time_cells = 64\n")
    out = tmp_path / "v"
    assert main(["verify", "convergence", cfg, "--out", str(out)]) == 0
    result = json.loads((out / "verify_convergence.json").read_text())
    assert result["pass"] and result["max_error"] < 1e-13
    assert (out / "convergence_space.csv").read_text().startswith("level,dx,dt,error,order")


def test_verify_truncation(tmp_path):
    cfg = write_cfg(tmp_path, "grid.dx = 0.1\ninitial.profile = large-data-composite\nrun.t_end = 2\n"
                              "verify.lengths = 20, 40, 80\n")
    out = tmp_path / "t"
    assert main(["verify", "truncation", cfg, "--out", str(out)]) == 0
    assert (out / "truncation.csv").read_text().splitlines()[0] == "L,discrepancy"
    assert (out / "truncation.png").exists()


def test_console_script_entry_point():
    res = subprocess.run([sys.executable, "-m", "lagns.cli", "version"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.strip() == __version__


CONFIGS = pathlib.Path(__file__).resolve().parent.parent / "configs"


def test_verify_convergence_shipped_config(tmp_path, capsys):
    out = tmp_path / "mms"
    assert main(["verify", "convergence", str(CONFIGS / "mms1.cfg"), "--out", str(out)]) == 0
    result = json.loads((out / "verify_convergence.json").read_text())
    assert result["spatial_order"] >= 1.9 and result["temporal_order"] >= 0.9
    assert "space: level,dx,dt,error,order" in capsys.readouterr().out


@pytest.mark.slow
def test_accept_exits_zero(tmp_path, capsys):
    out = tmp_path / "acc"
    assert main(["accept", "--out", str(out)]) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if ln.startswith(("PASS", "FAIL"))]
    assert len(lines) == 10 and all(ln.startswith("PASS") for ln in lines)
    report = json.loads((out / "acceptance.json").read_text())
    assert all(v["pass"] for v in report.values())
