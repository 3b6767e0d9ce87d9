import json

import pytest

from acoumetro.channel import ChannelGeometry, velocity_quantization
from acoumetro.cli import main

from conftest import run_cli


def report(text):
    """Parse 'key = value unit' report lines."""
    out = {}
    for line in text.splitlines():
        if " = " in line:
            k, v = line.split(" = ", 1)
            out[k.strip()] = v.split()[0]
    return out


class TestSimulate:
    def test_deterministic_default_seed(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli("simulate", "--speed-noise", "0.01", "--out", a).returncode == 0
        assert run_cli("--seed", "42", "simulate", "--speed-noise", "0.01", "--out", b).returncode == 0
        assert a.read_bytes() == b.read_bytes()

    def test_row_count(self, tmp_path):
        out = tmp_path / "log.csv"
        cp = run_cli("simulate", "--replicates", "15", "--out", out)
        assert cp.returncode == 0, cp.stderr
        lines = out.read_text().splitlines()
        assert lines[0] == "timestamp,temperature_C,code_N"
        assert len(lines) == 1 + 105

    def test_bad_temperature(self):
        cp = run_cli("simulate", "--temperatures", "4,99")
        assert cp.returncode != 0
        assert "outside valid range" in cp.stderr

    def test_seed_changes_noisy_output(self):
        a = run_cli("simulate", "--speed-noise", "0.01", "--seed", "1").stdout
        b = run_cli("simulate", "--speed-noise", "0.01", "--seed", "2").stdout
        assert a != b


class TestCalibrate:
    def test_noiseless_round_trip(self, tmp_path):
        log = tmp_path / "log.csv"
        model = tmp_path / "model.csv"
        run_cli("simulate", "--out", log)
        cp = run_cli("calibrate", log, "--model-out", model)
        assert cp.returncode == 0, cp.stderr
        rmse = float(report(cp.stdout)["rmse"])
        # cubic-in-code model error plus floor quantization of the timer codes
        assert rmse < velocity_quantization(ChannelGeometry(), 1505.0)
        assert model.read_text().startswith("degree,code_center,code_scale,c0,c1,c2,c3,rmse")

    def test_noisy_log(self, tmp_path):
        log = tmp_path / "log.csv"
        # 25 levels leave 21 residual degrees of freedom, so one run is representative
        grid = ",".join(str(t) for t in range(4, 29))
        run_cli("simulate", "--temperatures", grid, "--replicates", "1", "--speed-noise", "0.01",
                "--seed", "7", "--out", log)
        cp = run_cli("calibrate", log)
        assert 0.005 <= float(report(cp.stdout)["rmse"]) <= 0.015

    def test_csv_residual_table(self, tmp_path):
        log = tmp_path / "log.csv"
        run_cli("simulate", "--out", log)
        cp = run_cli("calibrate", log, "--format", "csv")
        lines = cp.stdout.splitlines()
        assert lines[0] == "temperature_C,code_N,code_std,c_ref_m_s,c_fit_m_s,residual_m_s"
        assert len(lines) == 8

    def test_empty_file(self, tmp_path):
        log = tmp_path / "empty.csv"
        log.write_text("")
        cp = run_cli("calibrate", log)
        assert cp.returncode != 0 and "empty.csv" in cp.stderr

    def test_malformed_row(self, tmp_path):
        log = tmp_path / "log.csv"
        run_cli("simulate", "--out", log)
        text = log.read_text().splitlines()
        text[5] = "garbage"
        log.write_text("\n".join(text) + "\n")
        cp = run_cli("calibrate", log)
        assert cp.returncode != 0 and "log.csv:6" in cp.stderr


class TestBudget:
    def test_fixture(self, data):
        cp = run_cli("budget", data("budget_samples.csv"), "--ub", "reference=0.02", "--k", "2")
        r = report(cp.stdout)
        assert float(r["U"]) == pytest.approx(0.041, abs=5e-4)
        assert float(r["u_A"]) == pytest.approx(0.005, rel=1e-3)
        assert "u_B[reference]" in r
        assert " m/s" in cp.stdout

    def test_identical_samples(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("speed_m_s\n" + "1482.5\n" * 15)
        r = report(run_cli("budget", p).stdout)
        assert r["u_A"] == r["u_c"] == r["U"] == "0"

    def test_default_k(self, data):
        r = report(run_cli("budget", data("budget_samples.csv")).stdout)
        assert r["k"] == "2"

    def test_too_few(self, tmp_path):
        p = tmp_path / "s.csv"
        p.write_text("speed_m_s\n1482.5\n")
        assert run_cli("budget", p).returncode != 0


class TestConform:
    def test_table3(self):
        cp = run_cli("conform", "--specs", "table3", "--format", "csv")
        rows = {line.split(",")[0]: line.split(",") for line in cp.stdout.splitlines()[1:]}
        assert rows["SVP-20/SVP-25 (RESON)"][2] == "fail"
        assert rows["Midas SVP (Valeport)"][2] == "skip"

    def test_table1(self):
        cp = run_cli("conform", "--specs", "table1", "--format", "csv")
        verdicts = [l.split(",") for l in cp.stdout.splitlines()[1:]]
        additive = [v for v in verdicts if v[1] == "final=calibration+stability"]
        assert len(additive) == 3 and all(v[2] == "pass" for v in additive)

    def test_measured_file(self, data):
        cp = run_cli("conform", "--specs", "table2", "--measured", data("measured_isz1.csv"),
                     "--format", "csv")
        assert "ISZ-1 sound speed,declared_error,pass,0.02,0.02,0,m/s" in cp.stdout

    def test_missing_spec_file(self, tmp_path):
        assert run_cli("conform", "--specs", tmp_path / "nope.csv").returncode == 1

    def test_fail_verdicts_exit_zero(self):
        assert run_cli("conform", "--specs", "table3").returncode == 0


def test_atten(data):
    r = report(run_cli("atten", data("attenuation_power_law.csv"), "--eval", "3").stdout)
    assert r["a1"] == "0.5" and r["b"] == "2"
    assert float(r["alpha(3 MHz)"]) == pytest.approx(4.5)


def test_scatter_equal_contrasts():
    r = report(run_cli("scatter", "--beta", "0.5", "--q", "0.5", "--k", "10").stdout)
    assert r["backscatter D(180 deg)"] == "0"


def test_scatter_from_frequency():
    r = report(run_cli("scatter", "--beta", "1", "--q", "0", "--freq", "2.4e6", "--c", "1500").stdout)
    assert float(r["k"]) == pytest.approx(10053.1, rel=1e-5)


def test_turbidity(data):
    r = report(run_cli("turbidity", data("turbidity_dilution.csv"), "--degree", "1",
                       "--reading", "50").stdout)
    assert r["p1"] == "10"
    assert r["concentration(50)"] == "500"


def test_turbidity_bad_degree(data):
    cp = run_cli("turbidity", data("turbidity_dilution.csv"), "--degree", "5")
    assert cp.returncode != 0 and "degree" in cp.stderr


@pytest.mark.parametrize("cmd, flags", [
    ("simulate", ["--temperatures", "--replicates", "--speed-noise", "--seed", "--out", "--format", "--config"]),
    ("calibrate", ["--degree", "--model-out", "--seed"]),
    ("budget", ["--ub", "--k", "--of-mean"]),
    ("conform", ["--specs", "--measured"]),
    ("atten", ["--eval"]),
    ("scatter", ["--beta", "--q", "--k", "--freq", "--n-polar", "--n-azimuth", "--scheme"]),
    ("turbidity", ["--mode", "--degree", "--reading", "--disable"]),
])
def test_help_lists_flags(cmd, flags):
    cp = run_cli(cmd, "--help")
    assert cp.returncode == 0
    for f in flags:
        assert f in cp.stdout


def test_unknown_flag():
    assert run_cli("atten", "--bogus").returncode != 0


def test_config_file(tmp_path, data, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"beta": 2.0, "q": 1.0, "k": 1.0, "format": "csv"}))
    assert main(["scatter", "--config", str(cfg)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("quantity,value,units\n")
    # command line overrides the file
    assert main(["scatter", "--config", str(cfg), "--q", "2"]) == 0
    assert "backscatter D(180 deg),0," in capsys.readouterr().out


def test_bad_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{nope")
    assert main(["scatter", "--config", str(cfg)]) == 1
    assert "cfg.json:1" in capsys.readouterr().err
