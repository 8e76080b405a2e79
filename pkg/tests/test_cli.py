"""Command-line front-end tests.

Everything here drives ``levyq.cli.main`` in-process and checks the three
things the CLI owns: argument handling, files written where asked, and the
documented exit-code contract (0 success / 2 input error / 3 numerical
failure).  One subprocess smoke test exercises the installed console
script.
"""

import json
import shutil
import subprocess

import pytest

import levyq.cli as cli
from levyq.errors import NumericalError
from levyq.harness import ExperimentConfig, parse_config_text, run_mc_table
from levyq.options import generate_synthetic_chain, write_chain_csv

MC_CFG = ("n = 32\n"
          "taus = 1.0\n"
          "spectral_points = 1024\n"
          "replications = 1\n"
          "seed = 11\n")

DEMO_CFG = ("kind = compound-poisson-exp\n"
            "intensity = 1.0\n"
            "jump_rate = 1.0\n"
            "sigma = 0.0\n"
            "gamma = 0.0\n"
            "increment_delta = 0.5\n"
            "h = 0.05\n"
            "method = exact-compound-poisson\n"
            "spectral_points = 512\n"
            "taus = 0.5\n"
            "seed = 2\n"
            "n = 400\n")


@pytest.fixture()
def mc_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text(MC_CFG)
    return path


class TestMcTableCommand:
    def test_writes_table_and_reports(self, mc_config_file, tmp_path, capsys):
        out = tmp_path / "table.csv"
        code = cli.main(["mc-table", "--config", str(mc_config_file),
                         "--out", str(out)])
        assert code == 0
        text = out.read_text()
        assert text.startswith("tau,q_minus,q_plus,rmse_oracle_minus,")
        assert len(text.strip().split("\n")) == 2
        assert "wrote" in capsys.readouterr().out

    def test_overrides_match_library_call(self, mc_config_file, tmp_path):
        out = tmp_path / "table.csv"
        code = cli.main(["mc-table", "--config", str(mc_config_file),
                         "--reps", "2", "--seed", "21", "--out", str(out)])
        assert code == 0
        expected = run_mc_table(parse_config_text(MC_CFG),
                                replications=2, seed=21)
        assert out.read_text() == expected.to_csv()

    def test_missing_config_file(self, tmp_path, capsys):
        code = cli.main(["mc-table", "--config", str(tmp_path / "no.cfg"),
                         "--out", str(tmp_path / "t.csv")])
        assert code == 2
        assert capsys.readouterr().err.startswith("error:")

    def test_bad_config_names_line(self, tmp_path, capsys):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("n = 32\nbogus = 1\n")
        code = cli.main(["mc-table", "--config", str(cfg),
                         "--out", str(tmp_path / "t.csv")])
        assert code == 2
        assert "line 2" in capsys.readouterr().err

    def test_missing_output_directory(self, mc_config_file, tmp_path, capsys):
        out = tmp_path / "absent" / "table.csv"
        code = cli.main(["mc-table", "--config", str(mc_config_file),
                         "--out", str(out)])
        assert code == 2
        assert "directory" in capsys.readouterr().err


class TestEstimateChainCommand:
    @pytest.fixture()
    def chain_file(self, tmp_path, bench_model):
        cfg = ExperimentConfig(n=48, spectral_points=1024)
        chain = generate_synthetic_chain(
            bench_model, cfg.T, cfg.r, cfg.n, cfg.noise_fraction,
            (cfg.strike_mean, cfg.strike_variance), seed=3)
        path = tmp_path / "chain.csv"
        write_chain_csv(path, chain)
        cfg_path = tmp_path / "run.cfg"
        cfg_path.write_text("n = 48\nspectral_points = 1024\n")
        return path, cfg_path

    def test_writes_report_and_plot_csvs(self, chain_file, tmp_path, capsys):
        chain_path, cfg_path = chain_file
        out_dir = tmp_path / "results"       # created by the command
        code = cli.main(["estimate-chain", "--chain", str(chain_path),
                         "--config", str(cfg_path), "--out", str(out_dir)])
        assert code == 0
        report = json.loads((out_dir / "report.json").read_text())
        assert report["n"] == 48
        assert len(report["taus"]) == 20     # default threshold ladder
        for side in ("minus", "plus"):
            lines = (out_dir / f"quantiles_{side}.csv").read_text() \
                .strip().split("\n")
            assert lines[0] == "tau,quantile"
            assert len(lines) == 21
        assert "report.json" in capsys.readouterr().out

    def test_malformed_chain_names_line(self, chain_file, tmp_path, capsys):
        _, cfg_path = chain_file
        bad = tmp_path / "bad.csv"
        bad.write_text("x,price,noise\n0.1,oops,0.001\n")
        code = cli.main(["estimate-chain", "--chain", str(bad),
                         "--config", str(cfg_path),
                         "--out", str(tmp_path / "r")])
        assert code == 2
        assert "line 2" in capsys.readouterr().err


class TestDemoDirectCommand:
    def test_writes_json_report(self, tmp_path, capsys):
        cfg = tmp_path / "demo.cfg"
        cfg.write_text(DEMO_CFG)
        out = tmp_path / "report.json"
        code = cli.main(["demo-direct", "--config", str(cfg),
                         "--out", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert report["n"] == 400
        assert {row["side"] for row in report["results"]} == {"-", "+"}
        assert "closed-form truth" in capsys.readouterr().out

    def test_numerical_failure_exit_code(self, tmp_path, capsys, monkeypatch):
        def boom(config):
            raise NumericalError("synthetic blow-up")

        monkeypatch.setattr(cli, "demo_direct", boom)
        cfg = tmp_path / "demo.cfg"
        cfg.write_text(DEMO_CFG)
        code = cli.main(["demo-direct", "--config", str(cfg),
                         "--out", str(tmp_path / "r.json")])
        assert code == 3
        assert capsys.readouterr().err.startswith("numerical failure:")


class TestParser:
    def test_requires_subcommand(self):
        with pytest.raises(SystemExit):
            cli.main([])

    def test_unknown_subcommand(self):
        with pytest.raises(SystemExit):
            cli.main(["frobnicate"])

    def test_console_script_installed(self, tmp_path):
        exe = shutil.which("levyq")
        assert exe, "console script should be on PATH after installation"
        cfg = tmp_path / "demo.cfg"
        cfg.write_text(DEMO_CFG)
        out = tmp_path / "report.json"
        proc = subprocess.run([exe, "demo-direct", "--config", str(cfg),
                               "--out", str(out)],
                              capture_output=True, text=True, timeout=120)
        assert proc.returncode == 0, proc.stderr
        assert out.exists()
