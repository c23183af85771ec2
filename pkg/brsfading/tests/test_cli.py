import io
import json
import logging
import math

import pytest

from .. import cli
from .._utils import worker_count
from .._version import __version__
from ..cli import build_options, build_parser, run
from ..errors import AccuracyError
from ..tables import read_csv


def output_table(capsys):
    return read_csv(io.StringIO(capsys.readouterr().out))


class TestExitStatus:
    def test_success(self, capsys):
        argv = ["mgf", "--k-factor", "1", "--m", "2", "--rho", "0.5", "--theta1", "0"]
        assert run(argv) == 0
        table = output_table(capsys)
        assert table.y == [pytest.approx(1.0, abs=1e-12)]
        assert table.header["quantity"] == "mgf"

    def test_invalid_parameter(self, capsys):
        assert run(["pdf", "--m", "0.1"]) == 2
        assert "key=m" in capsys.readouterr().err

    def test_invalid_figure_parameter(self, capsys, tmp_path):
        assert run(["figure", "lcr", "--m", "0.1", "--out", str(tmp_path)]) == 2
        assert "m=0.1" in capsys.readouterr().err

    def test_unknown_command(self, capsys):
        assert run(["plot"]) == 2

    def test_version(self, capsys):
        assert run(["--version"]) == 0
        assert __version__ in capsys.readouterr().out

    def test_accuracy_failure(self, capsys, monkeypatch):
        def fail(params, point):
            raise AccuracyError("quadrature did not converge")

        monkeypatch.setattr(cli, "mgf", fail)
        assert run(["mgf"]) == 3
        assert "did not converge" in capsys.readouterr().err

    def test_debug_logs_options(self, caplog, tmp_path):
        caplog.set_level(logging.DEBUG, logger="brsfading.cli")
        assert run(["mgf", "-vv", "--out", str(tmp_path / "mgf.csv")]) == 0
        assert "theta1" in caplog.text
        assert "(default)" in caplog.text

    def test_help_lists_options(self):
        text = build_parser().format_help()
        assert "mc.draws" in text
        assert "Rician factor" in text


class TestOptions:
    def parse(self, argv):
        return build_options(build_parser().parse_args(argv))

    def test_defaults(self):
        options = self.parse(["pdf"])
        assert options.k_factor == 1.0
        assert options.mc.draws == 0
        assert options.mc.seed == 7
        assert options.lcr.u_db[0] == -30.0

    def test_negative_grid(self):
        options = self.parse(["afd", "--u-db=-20:10:0", "--ts", "0.01"])
        assert options.afd.u_db == (-20.0, -10.0, 0.0)
        assert options.afd.ts == 0.01

    def test_figure_flags(self):
        options = self.parse(
            ["figure", "outage", "--m", "3", "--rho", "0.4", "--k-factor", "5"]
        )
        assert options.figure.m_list == (3.0,)
        assert options.figure.rho_list == (0.4,)
        assert options.figure.k_factor == 5.0
        # the figure flags leave the global parameters alone
        assert options.m == 2.0

    def test_simulate_draws_follow_mc(self):
        assert self.parse(["simulate"]).simulate.draws == cli.SIMULATE_DRAWS
        assert self.parse(["simulate", "--mc", "2e5"]).simulate.draws == 200_000

    def test_config_then_flags(self, tmp_path):
        path = tmp_path / "run.json"
        values = {"sigma2": 2.0, "k_factor": 0.0, "mgf": {"theta1": [-1.0]}}
        path.write_text(json.dumps(values))
        options = self.parse(["mgf", "--config", str(path), "--sigma2", "1"])
        assert options.sigma2 == 1.0
        assert options.k_factor == 0.0
        assert options.mgf.theta1 == (-1.0,)

    def test_rho_parameter_and_sweep_section(self, tmp_path):
        path = tmp_path / "run.json"
        values = {"rho": 0.7, "rho_sweep": {"m_list": [3.0], "rho_grid": [0.0, 1.0]}}
        path.write_text(json.dumps(values))
        options = self.parse(["rho", "--config", str(path)])
        assert options.rho == 0.7
        assert options.rho_sweep.m_list == (3.0,)
        assert options.rho_sweep.rho_grid == (0.0, 1.0)
        options = self.parse(["rho", "--rho", "0.2", "--rho-grid", "0:0.5:1"])
        assert options.rho == 0.2
        assert options.rho_sweep.rho_grid == (0.0, 0.5, 1.0)

    def test_yaml_config(self, tmp_path):
        pytest.importorskip("yaml")
        path = tmp_path / "run.yaml"
        path.write_text("m: 5\nmc:\n  draws: 1000\n")
        options = self.parse(["cdf", "--config", str(path)])
        assert options.m == 5.0
        assert options.mc.draws == 1000

    def test_bool_config_value(self, tmp_path, capsys):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"m": True}))
        assert run(["pdf", "--config", str(path)]) == 2
        assert "key=m" in capsys.readouterr().err

    def test_unknown_config_key(self, tmp_path, capsys):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"k": 1.0}))
        assert run(["mgf", "--config", str(path)]) == 2

    def test_thread_cap(self, monkeypatch):
        monkeypatch.setenv("BRS_THREADS", "1")
        assert worker_count(8) == 1
        monkeypatch.setenv("BRS_THREADS", "many")
        with pytest.raises(ValueError, match="BRS_THREADS"):
            worker_count()


class TestSubcommands:
    def test_mgf_against_closed_form(self, capsys, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"k_factor": 0.0, "mgf": {"theta1": [-1.0]}}))
        assert run(["mgf", "--config", str(path)]) == 0
        assert output_table(capsys).y == [pytest.approx(0.5, rel=1e-12)]

    def test_pdf(self, capsys):
        assert run(["pdf", "--r1", "0,1", "--r2", "1"]) == 0
        table = output_table(capsys)
        assert table.x == [0.0, 1.0]
        assert table.y[0] == 0.0
        assert table.y[1] > 0.0
        assert table.header["diagonal_collapse"] == "False"

    def test_pdf_diagonal(self, capsys):
        assert run(["pdf", "--rho", "1", "--r1", "0.5,1", "--r2", "1"]) == 0
        table = output_table(capsys)
        assert table.y[0] == 0.0
        assert table.y[1] > 0.0
        assert table.header["diagonal_collapse"] == "True"

    def test_marginal_cdf_with_mc(self, capsys):
        assert run(["cdf", "--r1", "1,2", "--mc", "20000", "--seed", "3"]) == 0
        table = output_table(capsys)
        assert table.header["quantity"] == "marginal_cdf"
        assert table.header["seed"] == 3
        for row in table.rows:
            assert abs(row.y - row.y_mc) <= 4 * row.y_mc_se + 1e-12

    def test_rho(self, tmp_path):
        path = tmp_path / "rho.csv"
        argv = ["rho", "--m-list", "1,5", "--rho-grid", "0:0.5:1", "--out", str(path)]
        assert run(argv) == 0
        lines = [
            line for line in path.read_text().splitlines() if not line.startswith("#")
        ]
        assert lines[0] == "rho,rho_bs_m1,rho_bs_m5"
        assert len(lines) == 4
        last = [float(v) for v in lines[-1].split(",")]
        assert last[1:] == [pytest.approx(1.0), pytest.approx(1.0)]

    def test_outage_with_mc(self, tmp_path):
        path = tmp_path / "outage.csv"
        argv = ["outage", "--k-factor", "10", "--gamma-th-db", "10", "--m", "5"]
        argv += ["--rho", "0.3", "--gamma-bar-db", "5,15"]
        argv += ["--mc", "40000", "--seed", "7"]
        argv += ["--out", str(path)]
        assert run(argv) == 0
        table = read_csv(path)
        assert table.x == [5.0, 15.0]
        assert table.y[0] > table.y[1]
        for row in table.rows:
            assert abs(row.y - row.y_mc) <= 4 * row.y_mc_se

    def test_lcr(self, tmp_path):
        path = tmp_path / "lcr.csv"
        assert run(["lcr", "--u-db=-10:5:0", "--out", str(path)]) == 0
        table = read_csv(path)
        assert table.x == [-10.0, -5.0, 0.0]
        assert all(y >= 0.0 for y in table.y)
        assert table.header["quantity"] == "lcr"

    @pytest.mark.parametrize("command", ["lcr", "afd"])
    def test_crossings_with_mc(self, command, tmp_path):
        path = tmp_path / f"{command}.csv"
        argv = [command, "--u-db=-10:2.5:5", "--mc", "400000", "--seed", "11"]
        assert run(argv + ["--out", str(path)]) == 0
        rows = read_csv(path).rows
        assert len(rows) == 7
        misses = [row for row in rows if abs(row.y - row.y_mc) > 3 * row.y_mc_se]
        assert len(misses) <= 1
        assert all(abs(row.y - row.y_mc) <= 5 * row.y_mc_se for row in rows)

    def test_undefined_afd(self, tmp_path):
        path = tmp_path / "afd.csv"
        assert run(["afd", "--rho", "1", "--u-db", "0", "--out", str(path)]) == 0
        assert read_csv(path).y == [math.inf]

    def test_simulate(self, tmp_path):
        summary = tmp_path / "summary.csv"
        pairs = tmp_path / "pairs.bin"
        argv = ["simulate", "--mc", "100000", "--out", str(summary)]
        argv += ["--dump-pairs", str(pairs)]
        assert run(argv) == 0
        lines = summary.read_text().splitlines()
        assert "quantity,analytic,mc,mc_se" in lines
        assert lines[-1].startswith("rho_bs,")
        assert pairs.stat().st_size == 16 * 100000


class TestFigures:
    def test_afd_lower_bound(self, tmp_path):
        assert run(["figure", "afd", "--u-db=-30:10:0", "--out", str(tmp_path)]) == 0
        files = sorted(p.name for p in tmp_path.iterdir())
        assert files == [
            "afd_m1_rho0.5.csv",
            "afd_m1_rho0.9.csv",
            "afd_m5_rho0.5.csv",
            "afd_m5_rho0.9.csv",
        ]
        for name in files:
            table = read_csv(tmp_path / name)
            assert table.header["quantity"] == "afd_normalized"
            assert all(y >= 1.0 - 1e-12 for y in table.y)

    def test_lcr_vanishes_for_equal_samples(self, tmp_path):
        argv = ["figure", "lcr", "--rho", "0.9999", "--u-db=-20:10:10"]
        assert run(argv + ["--out", str(tmp_path)]) == 0
        for path in tmp_path.iterdir():
            assert all(y <= 1e-3 for y in read_csv(path).y)

    def test_rho(self, tmp_path):
        argv = ["figure", "rho", "--rho-grid", "0:0.5:1", "--out", str(tmp_path)]
        assert run(argv) == 0
        files = sorted(p.name for p in tmp_path.iterdir())
        assert files == ["rho_m1.csv", "rho_m2.csv", "rho_m20.csv", "rho_m5.csv"]
        table = read_csv(tmp_path / "rho_m1.csv")
        assert table.header["k_factor"] == 1.0
        assert table.x == [0.0, 0.5, 1.0]

    def test_outage_defaults(self, tmp_path):
        argv = ["figure", "outage", "--gamma-bar-db", "10", "--out", str(tmp_path)]
        assert run(argv) == 0
        values = {p.name: read_csv(p).y[0] for p in tmp_path.iterdir()}
        assert len(values) == 4
        assert values["outage_m1_rho0.8.csv"] >= values["outage_m1_rho0.3.csv"]
        assert values["outage_m5_rho0.8.csv"] >= values["outage_m5_rho0.3.csv"]
