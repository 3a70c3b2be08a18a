import json
import logging
import os

import pandas as pd
import pytest

import core.kernels.property_checks as property_checks
from cli.commands import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, KERNEL_REPORT, SOBOL_DUMP, main
from config.app_config import config
from config.logging_config import LoggerFactory, get_module_logger


@pytest.fixture
def small_kernel_config(write_json, small_space_dict):
    return write_json(
        "kernel.json",
        {
            "space": small_space_dict,
            "n_param_draws": 2,
            "n_points": 10,
            "n_gram_draws": 3,
            "gram_size": 8,
        },
    )


class TestSobolDump:
    def test_writes_and_refuses_to_overwrite(self, write_json, tmp_path):
        cfg = write_json("sobol.json", {"dimension": 3, "count": 16})
        out = str(tmp_path / "out")
        assert main(["sobol-dump", "--config", cfg, "--out", out]) == EXIT_OK
        path = os.path.join(out, SOBOL_DUMP)
        frame = pd.read_csv(path)
        assert list(frame.columns) == ["u0", "u1", "u2"]
        assert frame.iloc[0].tolist() == [0.5, 0.5, 0.5]
        with open(path, "rb") as f:
            first = f.read()

        assert main(["sobol-dump", "--config", cfg, "--out", out]) == EXIT_USAGE
        assert main(["sobol-dump", "--config", cfg, "--out", out, "--force"]) == EXIT_OK
        with open(path, "rb") as f:
            assert f.read() == first

    def test_seed_scrambles(self, write_json, tmp_path):
        cfg = write_json("sobol.json", {"dimension": 2, "count": 8})
        assert main(["sobol-dump", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "3"]) == EXIT_OK
        frame = pd.read_csv(tmp_path / "a" / SOBOL_DUMP)
        assert frame.iloc[0].tolist() != [0.5, 0.5]

    def test_runs_without_config(self, tmp_path):
        assert main(["sobol-dump", "--out", str(tmp_path)]) == EXIT_OK
        frame = pd.read_csv(tmp_path / SOBOL_DUMP)
        assert frame.shape == (2000, 24)
        bundled = os.path.join(config.bench.defaults_dir, "sobol_dump.json")
        assert main(["sobol-dump", "--config", bundled, "--out", str(tmp_path / "bundled")]) == EXIT_OK
        assert (tmp_path / "bundled" / SOBOL_DUMP).read_bytes() == (tmp_path / SOBOL_DUMP).read_bytes()

    def test_unsupported_dimension(self, write_json, tmp_path):
        cfg = write_json("sobol.json", {"dimension": 30000, "count": 8})
        assert main(["sobol-dump", "--config", cfg, "--out", str(tmp_path)]) == EXIT_USAGE


class TestCheckKernel:
    def test_small_space_passes(self, small_kernel_config, tmp_path, capsys):
        assert main(["check-kernel", "--config", small_kernel_config, "--out", str(tmp_path)]) == EXIT_OK
        report = json.loads((tmp_path / KERNEL_REPORT).read_text())
        assert report["passed"] is True
        assert report["n_dims"] == 3
        assert all(p["passed"] for p in report["properties"])
        lines = capsys.readouterr().out.splitlines()
        assert lines and all(line.startswith("PASS  ") for line in lines)

    @pytest.mark.slow
    def test_bundled_default(self, tmp_path):
        cfg = os.path.join(config.bench.defaults_dir, "check_kernel.json")
        assert main(["check-kernel", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK

    def test_invalid_rho_is_a_usage_error(self, write_json, small_space_dict, tmp_path):
        cfg = write_json("kernel.json", {"space": small_space_dict, "params": {"rho": [0.5, 1.5, 0.5]}})
        assert main(["check-kernel", "--config", cfg, "--out", str(tmp_path)]) == EXIT_USAGE

    def test_parameter_length_mismatch(self, write_json, small_space_dict, tmp_path):
        cfg = write_json("kernel.json", {"space": small_space_dict, "params": {"omega": [1.0, 1.0]}})
        assert main(["check-kernel", "--config", cfg, "--out", str(tmp_path)]) == EXIT_USAGE

    def test_corrupted_distance_fails(self, small_kernel_config, tmp_path, capsys, monkeypatch):
        monkeypatch.setattr(property_checks, "arc_distance", lambda *args: 3.0)
        assert main(["check-kernel", "--config", small_kernel_config, "--out", str(tmp_path)]) == EXIT_FAILURE
        assert "FAIL  case_table" in capsys.readouterr().out
        assert json.loads((tmp_path / KERNEL_REPORT).read_text())["passed"] is False


class TestExperiments:
    def test_optimize(self, write_json, tmp_path):
        cfg = write_json(
            "optimize.json",
            {"arms": ["random_search"], "seeds": [0, 1], "budget": 10, "init_count": 10, "grid_size": 32, "max_workers": 1},
        )
        assert main(["optimize", "--config", cfg, "--out", str(tmp_path), "--seed", "4"]) == EXIT_OK
        trajectories = pd.read_csv(tmp_path / "trajectories.csv")
        assert trajectories["seed"].unique().tolist() == [4]
        assert len(trajectories) == 10
        assert (tmp_path / "histories" / "random_search_seed4.csv").exists()

    def test_regress(self, write_json, tmp_path):
        cfg = write_json(
            "regress.json",
            {"models": ["linear_regression"], "folds": 2, "n_points": 60, "max_workers": 1},
        )
        assert main(["regress", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
        assert len(pd.read_csv(tmp_path / "nmse.csv")) == 2
        assert (tmp_path / "nmse_summary.csv").exists()

    def test_failing_experiment_exits_one(self, write_json, tmp_path):
        cfg = write_json(
            "regress.json",
            {"models": ["linear_regression"], "folds": 2, "n_points": 20, "max_workers": 1},
        )
        assert main(["regress", "--config", cfg, "--out", str(tmp_path)]) == EXIT_FAILURE


class TestUsage:
    def test_unknown_command(self):
        assert main(["tune"]) == EXIT_USAGE

    def test_missing_config(self, tmp_path):
        assert main(["regress", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path)]) == EXIT_USAGE


def test_reruns_are_byte_identical(write_json, tmp_path):
    cfg = write_json(
        "optimize.json",
        {
            "arms": ["arc_gp", "random_search"],
            "seeds": [0],
            "budget": 11,
            "init_count": 10,
            "grid_size": 32,
            "max_workers": 1,
            "inference": {"method": "slice", "n_samples": 2, "burn_in": 2, "thin": 1, "refresh_burn_in": 1},
        },
    )
    for name in ("a", "b"):
        assert main(["optimize", "--config", cfg, "--out", str(tmp_path / name)]) == EXIT_OK
    for output in ("trajectories.csv", "architectures.csv", "bo_summary.csv"):
        assert (tmp_path / "a" / output).read_bytes() == (tmp_path / "b" / output).read_bytes()


def test_log_level_override(write_json, tmp_path, monkeypatch):
    monkeypatch.setattr(LoggerFactory, "_level", None)
    cfg = write_json("sobol.json", {"dimension": 1, "count": 4})
    try:
        assert main(["--log-level", "WARNING", "sobol-dump", "--config", cfg, "--out", str(tmp_path)]) == EXIT_OK
        assert get_module_logger("cli").level == logging.WARNING
    finally:
        LoggerFactory.set_level("INFO")
