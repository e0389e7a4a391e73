"""
End-to-end tests for the hazardfield command line.

Each test runs main() with tiny settings and inspects the files written to
a temporary output directory.
"""

import logging
import os
from unittest.mock import patch

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from src.cli.app import EXIT_IO, EXIT_OK, EXIT_RUNTIME, EXIT_VALIDATION, exit_code_for, main
from src.cli.manifest import MANIFEST_FILE, RunManifest
from src.geometry.partition import build_partition
from src.model.spec import ModelSpec
from src.sampler.runner import META_COLUMNS
from src.simstudy.landscape import study_cell_counts, study_geometry
from src.utils.exceptions import (
    CholeskyJitterError,
    DatasetError,
    InputOutputError,
    InitializationError,
    QuadratureError,
)

TINY_CONFIG = """\
seed = 7
households = 5
observations = 2
population_size = 20
distribution = uniform
cells = 4
prior_predictive_draws = 2
functional_points = 3
validation_cells = 4, 8
validation_households = 2.5:1.0
"""


@pytest.fixture(autouse=True)
def isolated_logging():
    """Restore root logging after main() reconfigures it."""
    root = logging.getLogger()
    saved_handlers, saved_level = list(root.handlers), root.level
    env = {k: v for k, v in os.environ.items() if not k.startswith("HAZARDFIELD_")}
    with patch.dict(os.environ, env, clear=True):
        yield
    for handler in root.handlers:
        if handler not in saved_handlers:
            handler.close()
    root.handlers[:] = saved_handlers
    root.setLevel(saved_level)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "tiny.conf"
    path.write_text(TINY_CONFIG)
    return path


def _simulate(config_file, out_dir):
    return main(["--config", str(config_file), "--out", str(out_dir), "simulate"])


class TestExitCodes:
    """Test the mapping from failures to exit codes."""

    @pytest.mark.parametrize("error,code", [
        (DatasetError("bad"), EXIT_VALIDATION),
        (CholeskyJitterError("bad", omega=1.0), EXIT_RUNTIME),
        (QuadratureError("bad", 1.0, 0.1), EXIT_RUNTIME),
        (InitializationError("bad"), EXIT_RUNTIME),
        (InputOutputError("bad"), EXIT_IO),
        (FileNotFoundError("bad"), EXIT_IO),
        (RuntimeError("bad"), 1),
    ])
    def test_mapping(self, error, code):
        assert exit_code_for(error) == code

    def test_validation_error(self):
        with pytest.raises(ValidationError) as info:
            ModelSpec(cells=0)
        assert exit_code_for(info.value) == EXIT_VALIDATION

    def test_invalid_setting_exits_with_validation_code(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("households = 0\n")
        assert main(["--config", str(path), "--out", str(tmp_path / "out"), "simulate"]) == EXIT_VALIDATION

    def test_unknown_key_exits_with_validation_code(self, tmp_path):
        path = tmp_path / "bad.conf"
        path.write_text("colour = blue\n")
        assert main(["--config", str(path), "--out", str(tmp_path / "out"), "validate"]) == EXIT_VALIDATION

    def test_missing_data_exits_with_io_code(self, config_file, tmp_path):
        code = main(["--config", str(config_file), "--out", str(tmp_path / "out"), "fit", "--data", str(tmp_path / "none")])
        assert code == EXIT_IO


class TestDryRun:
    """Test that dry runs write nothing."""

    @pytest.mark.parametrize("command", ["simulate", "validate", "study"])
    def test_returns_zero(self, command, config_file, tmp_path):
        out_dir = tmp_path / "out"
        assert main(["--config", str(config_file), "--out", str(out_dir), "--dry-run", command]) == EXIT_OK
        assert not out_dir.exists()

    def test_fit_dry_run(self, config_file, tmp_path):
        data_dir = tmp_path / "sim"
        assert _simulate(config_file, data_dir) == EXIT_OK
        out_dir = tmp_path / "fit"
        args = ["--config", str(config_file), "--out", str(out_dir), "--dry-run", "fit", "--data", str(data_dir)]
        assert main(args) == EXIT_OK
        assert not (out_dir / MANIFEST_FILE).exists()


class TestSimulate:
    """Test the simulate command."""

    def test_outputs(self, config_file, tmp_path):
        out_dir = tmp_path / "sim"
        assert _simulate(config_file, out_dir) == EXIT_OK
        for name in ("households.csv", "observations.csv", "truth.csv", "truth_parameters.csv",
                     "prior_predictive.csv", MANIFEST_FILE):
            assert (out_dir / name).exists(), name
        assert len(pd.read_csv(out_dir / "households.csv")) == 5
        assert len(pd.read_csv(out_dir / "observations.csv")) == 10
        assert len(pd.read_csv(out_dir / "prior_predictive.csv")) == 2

    def test_deterministic(self, config_file, tmp_path):
        _simulate(config_file, tmp_path / "a")
        _simulate(config_file, tmp_path / "b")
        for name in ("households.csv", "observations.csv", "truth.csv", "prior_predictive.csv"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_manifest(self, config_file, tmp_path):
        out_dir = tmp_path / "sim"
        _simulate(config_file, out_dir)
        manifest = RunManifest.read(out_dir)
        assert manifest.command == "simulate"
        assert manifest.seed == 7
        assert manifest.config_path == str(config_file)
        assert manifest.settings["households"] == 5
        assert manifest.version


class TestAnalysisCommands:
    """Test diagnose, functional and validate on small inputs."""

    @pytest.fixture
    def draws_file(self, tmp_path):
        partition = build_partition(study_geometry(split_y=True), study_cell_counts(4))
        rng = np.random.default_rng(0)
        n = 20
        frames = []
        for chain in range(2):
            frame = pd.DataFrame({
                "chain": chain,
                "iter": np.arange(1, n + 1),
                "divergent": 0,
                "treedepth": 3,
                "accept_stat": 0.9,
                "stepsize": 0.2,
                "n_leapfrog": 7,
                "energy": rng.normal(size=n),
                "lambda_b": rng.uniform(0.03, 0.07, n),
                "rho": rng.uniform(0.08, 0.12, n),
            })
            for sid, m in partition.cell_labels():
                frame[f"z.{sid}.{m}"] = rng.normal(-1.0, 0.2, n)
            frames.append(frame)
        path = tmp_path / "draws.csv"
        pd.concat(frames).to_csv(path, index=False)
        assert set(META_COLUMNS) <= set(frames[0].columns)
        return path

    def test_diagnose(self, config_file, draws_file, tmp_path):
        out_dir = tmp_path / "diag"
        args = ["--config", str(config_file), "--out", str(out_dir), "diagnose", "--draws", str(draws_file)]
        assert main(args) == EXIT_OK
        report = pd.read_csv(out_dir / "report.csv")
        assert "rho" in set(report["name"])
        assert str(draws_file) in RunManifest.read(out_dir).input_digests

    def test_functional(self, config_file, draws_file, tmp_path):
        data_dir = tmp_path / "sim"
        _simulate(config_file, data_dir)
        out_dir = tmp_path / "func"
        args = [
            "--config", str(config_file), "--out", str(out_dir),
            "functional", "--draws", str(draws_file), "--data", str(data_dir),
        ]
        assert main(args) == EXIT_OK
        curve = pd.read_csv(out_dir / "odds_change.csv")
        assert len(curve) == 3
        assert curve.loc[0, "mean"] == 0.0
        distances = pd.read_csv(out_dir / "min_distance.csv")
        assert len(distances) == 5
        assert list(distances.columns) == ["household_id", "log_min_distance_km"]

    def test_validate(self, config_file, tmp_path):
        out_dir = tmp_path / "val"
        assert main(["--config", str(config_file), "--out", str(out_dir), "validate"]) == EXIT_OK
        frame = pd.read_csv(out_dir / "validation.csv")
        assert sorted(frame["cells"]) == [4, 8]
        assert (frame["bound"] >= frame["error"]).all()
