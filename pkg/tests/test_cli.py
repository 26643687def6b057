import json
import subprocess
import sys
from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


def efk(*args, cwd=None, env=None):
    return subprocess.run(
        [sys.executable, "-m", "efk.cli", *map(str, args)],
        capture_output=True,
        text=True,
        cwd=cwd,
        env=env,
    )


@pytest.fixture
def matrix_csv(tmp_path):
    out = tmp_path / "m.csv"
    r = efk("synth", "nested", "--countries", 6, "--products", 9,
            "--noise", 0.1, "--seed", 7, "--output", out)
    assert r.returncode == 0, r.stderr
    return out


@pytest.fixture
def points_csv(tmp_path):
    out = tmp_path / "pts.csv"
    r = efk("synth", "drift", "--countries", 8, "--years", 15,
            "--noise-sd", 0, "--seed", 3, "--output", out)
    assert r.returncode == 0, r.stderr
    return out


class TestHappyPaths:
    def test_fitness_from_trade_csv(self, tmp_path):
        out = tmp_path / "fit.csv"
        r = efk("fitness", "--input", DATA / "trade.csv", "--year", 2015 - 15,
                "--format", "csv", "--output", out)
        assert r.returncode == 0, r.stderr
        lines = out.read_text().splitlines()
        assert lines[0] == "entity,score,rank"
        assert "fitness:" in r.stdout
        assert "converged=True" in r.stdout

    def test_fitness_json_metadata(self, matrix_csv, tmp_path):
        out = tmp_path / "fit.json"
        r = efk("fitness", "--matrix", matrix_csv, "--format", "json", "--output", out)
        assert r.returncode == 0
        obj = json.loads(out.read_text())
        assert obj["schema_version"] == 1
        assert obj["algorithm"] == "fitness"
        assert obj["converged"] is True
        assert "timestamp" not in obj

    def test_timestamp_flag_recorded(self, matrix_csv, tmp_path):
        out = tmp_path / "fit.json"
        r = efk("fitness", "--matrix", matrix_csv, "--format", "json",
                "--output", out, "--timestamp", "2026-08-09T00:00:00Z")
        assert r.returncode == 0
        assert json.loads(out.read_text())["timestamp"] == "2026-08-09T00:00:00Z"

    def test_eci_json_has_order_and_lambda(self, matrix_csv, tmp_path):
        out = tmp_path / "eci.json"
        r = efk("eci", "--matrix", matrix_csv, "--format", "json", "--output", out)
        assert r.returncode == 0
        obj = json.loads(out.read_text())
        assert obj["algorithm"] == "eci"
        assert obj["order_n"] == 2
        assert "lambda" in obj

    def test_compare_identical_files(self, matrix_csv, tmp_path):
        out = tmp_path / "fit.csv"
        efk("fitness", "--matrix", matrix_csv, "--output", out)
        r = efk("compare", "--a", out, "--b", out, "--format", "json",
                "--output", tmp_path / "cmp.json")
        assert r.returncode == 0
        obj = json.loads((tmp_path / "cmp.json").read_text())
        assert obj["spearman"] == 1.0
        assert "spearman=1.0000" in r.stdout

    def test_reflections_csv(self, matrix_csv, tmp_path):
        out = tmp_path / "refl.csv"
        r = efk("reflections", "--matrix", matrix_csv, "--depth", 6, "--output", out)
        assert r.returncode == 0
        header = out.read_text().splitlines()[0]
        assert header.endswith("level_6")

    def test_nestedness(self, matrix_csv):
        r = efk("nestedness", "--matrix", matrix_csv)
        assert r.returncode == 0
        assert "nodf_total=" in r.stdout

    def test_counterfactual_single_json(self, matrix_csv, tmp_path):
        out = tmp_path / "cf.json"
        r = efk("counterfactual", "--matrix", matrix_csv, "--country", "C001",
                "--product", "P001", "--output", out)
        assert r.returncode == 0, r.stderr
        obj = json.loads(out.read_text())
        assert obj["country"] == "C001"

    def test_counterfactual_batch_csv(self, matrix_csv, tmp_path):
        pairs = tmp_path / "pairs.csv"
        pairs.write_text("country,product\nC001,P001\nC002,P001\n")
        out = tmp_path / "batch.csv"
        r = efk("counterfactual", "--matrix", matrix_csv, "--pairs", pairs,
                "--format", "csv", "--output", out)
        assert r.returncode == 0, r.stderr
        lines = out.read_text().splitlines()
        assert lines[0] == (
            "country,product,fit_rank_before,fit_rank_after,"
            "eci_rank_before,eci_rank_after"
        )
        assert len(lines) == 3

    def test_forecast_json(self, points_csv, tmp_path):
        out = tmp_path / "fc.json"
        r = efk("forecast", "--points", points_csv, "--country", "C001",
                "--year", 2005, "--radius", 0.5, "--min-analogues", 3,
                "--output", out)
        assert r.returncode == 0, r.stderr
        obj = json.loads(out.read_text())
        assert obj["regime"] == "laminar"
        assert obj["dx"] == pytest.approx(0.5, abs=1e-9)

    def test_backtest(self, points_csv, tmp_path):
        r = efk("backtest", "--points", points_csv, "--split-year", 2008,
                "--radius", 0.5, "--min-analogues", 3)
        assert r.returncode == 0, r.stderr
        assert "mae_analogue=" in r.stdout

    def test_regime_map_csv(self, points_csv, tmp_path):
        out = tmp_path / "rm.csv"
        r = efk("regime-map", "--points", points_csv, "--nx", 4, "--ny", 3,
                "--radius", 0.9, "--min-analogues", 3, "--output", out)
        assert r.returncode == 0, r.stderr
        assert out.read_text().splitlines()[0] == "xn,yn,regime"

    def test_plot_data(self, points_csv, tmp_path):
        out = tmp_path / "plot.json"
        r = efk("plot-data", "--points", points_csv, "--radius", 0.9,
                "--min-analogues", 3, "--output", out)
        assert r.returncode == 0, r.stderr
        obj = json.loads(out.read_text())
        assert set(obj) >= {"trajectories", "regime_grid", "forecasts", "theta"}

    def test_full_pipeline_trade_and_gdp(self, tmp_path):
        out = tmp_path / "fc.json"
        r = efk("forecast", "--trade", DATA / "trade.csv", "--gdp", DATA / "gdp.csv",
                "--country", "CCC", "--year", 2000, "--horizon", 2,
                "--radius", 2.0, "--min-analogues", 2, "--output", out)
        assert r.returncode == 0, r.stderr
        obj = json.loads(out.read_text())
        assert obj["country"] == "CCC"

    def test_synth_nested_as_trade_round_trips(self, tmp_path):
        trade = tmp_path / "t.csv"
        r = efk("synth", "nested", "--countries", 5, "--products", 7,
                "--noise", 0.1, "--seed", 2, "--as-trade", "--year", 2001,
                "--output", trade)
        assert r.returncode == 0
        r = efk("fitness", "--input", trade, "--year", 2001)
        assert r.returncode == 0, r.stderr

    def test_help_everywhere(self):
        assert efk("--help").returncode == 0
        for cmd in ("fitness", "eci", "reflections", "nestedness", "compare",
                    "counterfactual", "forecast", "backtest", "regime-map",
                    "plot-data", "synth"):
            assert efk(cmd, "--help").returncode == 0


class TestErrorPaths:
    def test_order_n_out_of_range_exit_1(self, matrix_csv):
        r = efk("eci", "--matrix", matrix_csv, "--order-n", 99)
        assert r.returncode == 1
        err = json.loads(r.stderr)["error"]
        assert err["type"] == "InvalidParameter"
        assert err["code"] == 1

    def test_missing_file_exit_1(self):
        r = efk("fitness", "--input", "nope.csv", "--year", 2000)
        assert r.returncode == 1
        assert json.loads(r.stderr)["error"]["code"] == 1

    def test_unknown_flag_rejected(self, matrix_csv):
        r = efk("fitness", "--matrix", matrix_csv, "--bogus", 1)
        assert r.returncode == 1
        assert "error" in json.loads(r.stderr)

    def test_degenerate_spectrum_exit_3(self, tmp_path):
        m = tmp_path / "ones.csv"
        m.write_text(",P1,P2\nA,1,1\nB,1,1\n")
        r = efk("eci", "--matrix", m)
        assert r.returncode == 3
        assert json.loads(r.stderr)["error"]["type"] == "DegenerateSpectrum"

    def test_insufficient_analogues_exit_4(self, points_csv):
        r = efk("forecast", "--points", points_csv, "--country", "C001",
                "--year", 2014, "--radius", 0.001, "--min-analogues", 5)
        assert r.returncode == 4
        assert json.loads(r.stderr)["error"]["type"] == "InsufficientAnalogues"

    def test_nonconvergence_exit_2(self, tmp_path):
        m = tmp_path / "st.csv"
        r = efk("synth", "nested", "--countries", 4, "--products", 4, "--output", m)
        assert r.returncode == 0
        r = efk("fitness", "--matrix", m, "--tol", 0, "--max-iter", 5,
                "--rank-patience", 50)
        assert r.returncode == 2
        assert json.loads(r.stderr)["error"]["type"] == "NonConvergence"

    def test_failed_run_writes_no_output(self, matrix_csv, tmp_path):
        out = tmp_path / "never.csv"
        r = efk("eci", "--matrix", matrix_csv, "--order-n", 99, "--output", out)
        assert r.returncode == 1
        assert not out.exists()

    def test_empty_year_selection(self, tmp_path):
        r = efk("fitness", "--input", DATA / "trade.csv", "--year", 1901)
        assert r.returncode == 1
        assert json.loads(r.stderr)["error"]["type"] == "EmptyInput"


class TestDataDirResolution:
    def test_relative_paths_resolve_under_efk_data_dir(self, tmp_path):
        import os

        env = dict(os.environ, EFK_DATA_DIR=str(DATA))
        r = efk("fitness", "--input", "trade.csv", "--year", 2000,
                cwd=tmp_path, env=env)
        assert r.returncode == 0, r.stderr
