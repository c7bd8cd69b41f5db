import cmath
import csv
import io
import json
import math
import os
import subprocess
import sys

import pytest

from nhresolve.cli import main, split_params
from nhresolve.config import OUT_ENV, RunConfig


def run(argv):
    buf = io.StringIO()
    code = main(argv, stdout=buf)
    return code, buf.getvalue()


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestKernel:
    def test_sinc_row(self):
        code, out = run(["kernel", "--model", "edge(0,0,1)", "--A", "10", "--x", "0.4", "--xp", "-0.7"])
        assert code == 0
        (row,) = rows(out)
        assert float(row["sinc_re"]) == pytest.approx(math.sin(11.0) / (1.1 * math.pi), abs=1e-15)
        assert float(row["abs_diff"]) < 1e-10
        assert out.endswith("\r\n")

    def test_grid_and_terms(self):
        code, out = run(["kernel", "--model", "inner(1,0,1)", "--A", "5", "--grid=-1:1:5", "--xp", "0.2"])
        assert code == 0
        table = rows(out)
        assert len(table) == 5
        assert {"sinc_re", "cos_band_re", "log_band_re", "total_re", "direct_re"} <= set(table[0])
        assert all(float(r["abs_diff"]) < 1e-8 for r in table)

    def test_eps_kernel_to_file(self, tmp_path):
        path = tmp_path / "k.csv"
        code, out = run(["kernel", "--model", "inner(1,0,1)", "--eps", "0.2", "--x", "0.1", "--x", "0.9",
                         "--xp", "0", "--output", str(path)])
        assert code == 0 and out == ""
        assert len(rows(path.read_text())) == 2

    @pytest.mark.parametrize("argv", [
        ["kernel", "--model", "edge(0,0,1)", "--eps", "0.2", "--x", "0", "--xp", "1"],
        ["kernel", "--model", "bulk(1)", "--A", "2", "--x", "0", "--xp", "1"],
        ["kernel", "--model", "edge(0,0,1)", "--A", "2", "--xp", "1"],
        ["kernel", "--model", "edge(0,0,1)", "--A", "2", "--grid", "0:1", "--xp", "1"],
        ["kernel", "--model", "inner(1,0,1)", "--A", "0.5", "--x", "0", "--xp", "1"],
    ])
    def test_usage_errors(self, argv):
        assert run(argv)[0] == 2


class TestProbe:
    def test_slow_growth_report(self):
        code, out = run(["probe", "--check", "T3.3", "--param", "kappa=0.5,k0=2,xprime=3"])
        assert code == 0
        rep = json.loads(out)
        target = cmath.exp(6j) * math.sqrt(3)
        assert complex(rep["target"]["re"], rep["target"]["im"]) == pytest.approx(target, abs=1e-14)
        assert rep["verdict"] == "converged"

    def test_csv_companion(self, tmp_path):
        path = tmp_path / "p.csv"
        code, _ = run(["probe", "--check", "L3.9", "--csv", str(path)])
        assert code == 0
        assert path.read_bytes().startswith(b"parameter,value_re,value_im,residual\r\n")

    @pytest.mark.parametrize("argv", [
        ["probe", "--check", "Z1.0"],
        ["probe", "--check", "L3.1"],
        ["probe", "--check", "T3.3", "--param", "kappa"],
        ["probe", "--check", "L3.9", "--param", "phi=inverse_square(1j)"],
    ])
    def test_usage_errors(self, argv):
        assert run(argv)[0] == 2

    def test_param_splitting_respects_brackets(self):
        assert split_params(["A=[25, 50],phi=gaussian(0,1)", "n=2"]) == {"A": [25, 50], "phi": "gaussian(0,1)",
                                                                        "n": 2}


class TestVerify:
    def test_passing_subset(self, tmp_path):
        code, out = run(["verify", "--suite", "L3.2,L4.5", "--out", str(tmp_path), "--format", "json,csv",
                         "--quiet"])
        assert code == 0
        assert "2/2 passed" in out
        assert {"check-L3.2.json", "check-L4.5.csv", "summary.json", "summary.csv", "config.json"} <= set(
            os.listdir(tmp_path))
        assert json.loads((tmp_path / "summary.json").read_text())["passed"] == 2

    def test_failure_exit_code(self, tmp_path):
        code, out = run(["verify", "--suite", "T3.2", "--out", str(tmp_path), "--quiet"])
        assert code == 1
        assert "T3.2" in out and "fail" in out

    def test_env_output_dir(self, tmp_path, monkeypatch):
        monkeypatch.setenv(OUT_ENV, str(tmp_path / "env"))
        assert run(["verify", "--suite", "L3.5", "--quiet"])[0] == 0
        assert (tmp_path / "env" / "check-L3.5.json").exists()

    @pytest.mark.parametrize("argv", [
        ["verify", "--suite", "L3.2,Q1"],
        ["verify", "--bogus"],
        ["verify", "--config", "/nonexistent/cfg.json"],
        ["verify", "--format", "xml"],
        ["frobnicate"],
        [],
    ])
    def test_usage_errors(self, argv):
        assert run(argv)[0] == 2

    def test_dump_config_round_trip(self, tmp_path):
        path = tmp_path / "cfg.json"
        assert run(["verify", "--suite", "L3.1 L4.1", "--seed", "99", "--dump-config", str(path)])[0] == 0
        cfg = RunConfig.load(str(path))
        assert [c["id"] for c in cfg.checks] == ["L3.1", "L4.1"] and cfg.seed == 99
        code, out = run(["verify", "--config", str(path), "--dump-config"])
        assert code == 0
        assert RunConfig.loads(out) == cfg

    def test_config_drives_run(self, tmp_path):
        cfg = RunConfig(checks=[{"id": "L3.2", "params": {}, "tolerances": {}},
                                {"id": "L3.5", "params": {}, "tolerances": {}, "enabled": False}],
                        output_dir=str(tmp_path / "o"))
        cfg.dump(str(tmp_path / "c.json"))
        code, out = run(["verify", "--config", str(tmp_path / "c.json"), "--quiet"])
        assert code == 0 and "1/1 passed" in out


class TestReport:
    def test_regenerates_summary(self, tmp_path):
        run(["verify", "--suite", "L3.2,T3.2", "--out", str(tmp_path), "--quiet"])
        os.remove(tmp_path / "summary.json")
        code, out = run(["report", "--dir", str(tmp_path)])
        assert code == 1
        assert json.loads((tmp_path / "summary.json").read_text())["checks"] == {"L3.2": "pass", "T3.2": "fail"}
        assert out.index("L3.2") < out.index("T3.2")

    def test_empty_dir(self, tmp_path):
        assert run(["report", "--dir", str(tmp_path)])[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nhresolve", "kernel", "--model", "edge(1,0,1)", "--A", "3",
                           "--x", "0.5", "--xp", "0.1", "--no-direct"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert "direct_re" not in proc.stdout
    bad = subprocess.run([sys.executable, "-m", "nhresolve", "probe"], capture_output=True, text=True)
    assert bad.returncode == 2
