"""Command-line interface: subcommands, exit codes, file outputs."""

import json
from pathlib import Path

import pytest

from skybeam.cli import main


def write_config(tmp_path, **run_overrides):
    cfg = {
        "fleet": {"k": 3, "horizon": 10},
        "run": {"trials": 1, **run_overrides},
    }
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg))
    return str(path)


class TestSimulate:
    def test_missing_config_exit_1_names_path(self, tmp_path, capsys):
        code = main(["simulate", "--config", str(tmp_path / "missing.json")])
        assert code == 1
        assert "missing.json" in capsys.readouterr().err

    def test_small_run_writes_outputs(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        assert (out / "dia_results.csv").exists()
        assert (out / "dia_summary.json").exists()
        assert "accuracy=" in capsys.readouterr().out

    def test_scheme_override(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out),
                     "--scheme", "feedback"]) == 0
        assert (out / "feedback_results.csv").exists()

    def test_unknown_scheme_exit_1(self, tmp_path):
        assert main(["simulate", "--scheme", "psychic"]) == 1

    def test_bad_json_exit_1(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        assert main(["simulate", "--config", str(path)]) == 1


class TestCompare:
    def test_shared_seed_outputs_are_deterministic(self, tmp_path):
        cfg = write_config(tmp_path)
        d1, d2 = tmp_path / "d1", tmp_path / "d2"
        assert main(["compare", "--config", cfg, "--seed", "7", "--out", str(d1)]) == 0
        assert main(["compare", "--config", cfg, "--seed", "7", "--out", str(d2)]) == 0
        files = sorted(p.name for p in d1.glob("*.csv"))
        assert len(files) == 5   # one per scheme
        for name in files + ["compare_summary.json"]:
            assert (d1 / name).read_bytes() == (d2 / name).read_bytes()


class TestSweep:
    def test_emits_one_row_per_grid_cell(self, tmp_path):
        cfg = write_config(tmp_path)
        out = tmp_path / "sweep"
        assert main(["sweep", "--config", cfg, "--out", str(out),
                     "--k-grid", "2,3", "--speed-grid", "10,20"]) == 0
        rows = (out / "sweep.csv").read_text().strip().splitlines()
        assert rows[0].startswith("k,v_max_mps,scheme")
        assert len(rows) - 1 == 2 * 2 * 3   # (K, speed) cells x 3 schemes


class TestReport:
    def test_recomputes_from_stored_results(self, tmp_path, capsys):
        cfg = write_config(tmp_path)
        out = tmp_path / "out"
        assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
        first = json.loads((out / "dia_summary.json").read_text())
        assert main(["report", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["dia"]["accuracy_mean"] == pytest.approx(first["accuracy_mean"])

    def test_empty_directory_exit_1(self, tmp_path):
        assert main(["report", str(tmp_path)]) == 1


class TestUsage:
    def test_unknown_subcommand_exit_1(self):
        assert main(["transmogrify"]) == 1

    def test_help_exits_cleanly(self):
        assert main(["--help"]) == 0
