import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from schrodinger_kawahara.cli import main
from schrodinger_kawahara.errors import ResolutionWarning
from schrodinger_kawahara.io import read_snapshot

SMALL = "n = 64\nlength = 30\ndt = 0.002\nt_end = 0.02\ncadence = 5\n"


@pytest.fixture
def cfg(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(SMALL)
    return path


def test_usage_errors_exit_2(capsys):
    for argv in ([], ["bogus"], ["simulate"], ["simulate", "--config", "x", "--nope"], ["cht", "--config", "x", "--T", "-1", "--intervals", "2"]):
        with pytest.raises(SystemExit) as info:
            main(argv)
        assert info.value.code == 2
    assert "usage" in capsys.readouterr().err


def test_missing_config_exits_1(tmp_path, capsys):
    missing = tmp_path / "missing.cfg"
    assert main(["simulate", "--config", str(missing)]) == 1
    assert "missing.cfg" in capsys.readouterr().err


def test_bad_config_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("delta = 0\n")
    assert main(["simulate", "--config", str(bad)]) == 1
    err = capsys.readouterr().err
    assert "bad.cfg" in err and "line 1" in err


def test_simulate_writes_outputs(cfg, tmp_path):
    out = tmp_path / "run"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    rows = list(csv.DictReader((out / "diagnostics.csv").open()))
    # t = 0, every 5 steps of 10, the last coinciding with t_end
    assert [float(r["t"]) for r in rows] == pytest.approx([0, 0.01, 0.02])
    state, _ = read_snapshot(out / "final.skw")
    assert state.t == pytest.approx(0.02)
    assert (out / "config.cfg").exists()


def test_output_root_from_environment(cfg, tmp_path, monkeypatch):
    monkeypatch.setenv("SKW_OUTPUT_ROOT", str(tmp_path / "root"))
    assert main(["kawahara", "--config", str(cfg)]) == 0
    assert (tmp_path / "root" / "kawahara" / "diagnostics.csv").exists()


def test_checkpoint_resume_matches_uninterrupted(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("n = 128\nlength = 40\ndt = 0.001\nt_end = 0.1\ncadence = 10\nsnapshot_every = 25\n")
    full, part, resumed = tmp_path / "full", tmp_path / "part", tmp_path / "resumed"
    assert main(["simulate", "--config", str(path), "--out", str(full)]) == 0
    assert sorted(p.name for p in full.glob("checkpoint_*.skw")) == [f"checkpoint_{k:08d}.skw" for k in (25, 50, 75)]
    assert main(["simulate", "--config", str(path), "--out", str(part), "--stop-at", "0.05"]) == 0
    assert main(["simulate", "--config", str(path), "--out", str(resumed), "--resume", str(part / "final.skw")]) == 0
    a, _ = read_snapshot(full / "final.skw")
    b, _ = read_snapshot(resumed / "final.skw")
    assert np.max(np.abs(a.u - b.u)) <= 1e-12 and np.max(np.abs(a.v - b.v)) <= 1e-12
    mid, _ = read_snapshot(full / "checkpoint_00000050.skw")
    c, _ = read_snapshot(part / "final.skw")
    assert np.max(np.abs(mid.u - c.u)) <= 1e-12


def test_cht_writes_one_row_per_interval(cfg, tmp_path):
    out = tmp_path / "cht"
    assert main(["cht", "--config", str(cfg), "--T", "0.01", "--intervals", "20", "--out", str(out)]) == 0
    rows = list(csv.DictReader((out / "intervals.csv").open()))
    assert len(rows) == 20
    assert rows[0].keys() >= {"interval_index", "w_norm_end", "identity_residual"}


def test_scale_check(cfg, tmp_path):
    out = tmp_path / "sc"
    with pytest.warns(ResolutionWarning):
        assert main(["scale-check", "--config", str(cfg), "--lambda", "0.5", "--out", str(out)]) == 0
    res = json.loads((out / "scale_check.json").read_text())
    assert res["lambda"] == 0.5 and res["dilated"]["relative"] > 0


def test_norms(tmp_path):
    out = tmp_path / "norms"
    argv = ["norms", "--case", "uv", "--samples", "3", "--seeds", "1,2", "--resolutions", "16", "--workers", "1", "--out", str(out)]
    assert main(argv) == 0
    rows = list(csv.DictReader((out / "ensemble.csv").open()))
    assert [r["seed"] for r in rows] == ["1", "2"]
    assert all(float(r["max_ratio"]) > 0 for r in rows)


def test_verify_quick_exits_0():
    proc = subprocess.run([sys.executable, "-m", "schrodinger_kawahara", "verify", "--quick"], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stdout + proc.stderr
    assert "FAIL" not in proc.stdout
