"""Unit tests for bias, MSE, coverage and IMAE estimators."""

import math

import numpy as np
import pandas as pd
import pytest

from src.simstudy.estimators import (
    ESTIMATE_COLUMNS,
    ReplicationErrors,
    cell_imae,
    estimate,
    estimate_imae,
    interval_covers,
    replication_errors,
)
from src.simstudy.landscape import true_intensities
from src.simstudy.scenario import TruthRecord
from src.utils.exceptions import EstimatorError


@pytest.fixture
def truth():
    return TruthRecord(("h1", "h2"), [0.2, 0.5], lambda_b=0.05, rho=0.1, gamma=[-0.15])


@pytest.fixture
def draws():
    n = 101
    grid = np.linspace(-1.0, 1.0, n)
    return pd.DataFrame({
        "lambda_b": 0.06 + 0.01 * grid,
        "rho": 0.1 + 0.05 * grid,
        "gamma.1": np.full(n, -0.1),
        "theta.h1": 0.25 + 0.1 * grid,
        "theta.h2": 0.5 + 0.1 * grid,
    })


class TestIntervalCovers:
    """Test central-interval coverage indicators."""

    def test_hand_checked(self):
        samples = np.arange(101.0)
        assert interval_covers(samples, [50.0], 0.8)[0] == 1.0
        assert interval_covers(samples, [95.0], 0.8)[0] == 0.0
        assert interval_covers(samples, [95.0], 0.95)[0] == 1.0

    def test_endpoint_is_not_covered(self):
        assert interval_covers(np.arange(101.0), [10.0], 0.8)[0] == 0.0

    def test_degenerate_interval(self):
        covered = interval_covers(np.column_stack([np.full(20, 3.0), np.arange(20.0)]), [3.0, 10.0], 0.8)
        assert math.isnan(covered[0])
        assert covered[1] == 1.0


class TestReplicationErrors:
    """Test the errors of one fit."""

    def test_errors(self, draws, truth):
        result = replication_errors(draws, truth, replication=4)
        assert result.replication == 4
        assert result.errors["lambda_b"][0] == pytest.approx(0.01)
        assert result.errors["rho"][0] == pytest.approx(0.0, abs=1e-15)
        np.testing.assert_allclose(result.errors["theta"], [0.05, 0.0], atol=1e-15)
        assert result.coverage[0.8]["rho"][0] == 1.0
        assert result.coverage[0.8]["lambda_b"][0] == 0.0
        assert math.isnan(result.coverage[0.8]["gamma.1"][0])
        assert result.imae == {}

    def test_missing_parameter(self, draws, truth):
        with pytest.raises(EstimatorError, match="lack column 'rho'"):
            replication_errors(draws.drop(columns=["rho"]), truth)

    def test_missing_household(self, draws, truth):
        with pytest.raises(EstimatorError, match="disagree on households"):
            replication_errors(draws.drop(columns=["theta.h2"]), truth)


class TestCellImae:
    """Test integrated absolute error of the fitted intensity."""

    def test_exact_field_gives_zero(self, small_partition):
        intensities = true_intensities(split_y=False)
        columns = {}
        for cells in small_partition:
            for m, c in enumerate(cells.centroid_arc):
                columns[f"z.{cells.segment_id}.{m + 1}"] = np.full(3, math.log(intensities[cells.segment_id](c)))
        result = cell_imae(pd.DataFrame(columns), small_partition, intensities)
        assert set(result) == {"x1", "x2", "y"}
        assert all(v == pytest.approx(0.0, abs=1e-12) for v in result.values())

    def test_offset_field(self, small_partition):
        columns = {
            f"z.{sid}.{m}": np.zeros(2) for sid, m in small_partition.cell_labels()
        }
        flat = {sid: (lambda c: 2.0) for sid in ("x1", "x2", "y")}
        result = cell_imae(pd.DataFrame(columns), small_partition, flat)
        assert result["x1"] == pytest.approx(10.0)
        assert result["y"] == pytest.approx(4.0)

    def test_missing_columns(self, small_partition):
        with pytest.raises(EstimatorError, match="field columns"):
            cell_imae(pd.DataFrame({"rho": [0.1]}), small_partition, true_intensities())


class TestEstimate:
    """Test study-level aggregation."""

    def _replication(self, r, bias, covered):
        return ReplicationErrors(
            replication=r,
            errors={"rho": np.array([bias])},
            coverage={0.8: {"rho": np.array([covered])}, 0.5: {"rho": np.array([covered])}},
            imae={"x1": 1.0 + r},
        )

    def test_bias_mse_coverage(self):
        reps = [self._replication(0, 0.1, 1.0), self._replication(1, -0.3, 0.0)]
        frame = estimate(reps, "S")
        assert list(frame.columns) == ESTIMATE_COLUMNS
        row = frame.iloc[0]
        assert row["bias"] == pytest.approx(-0.1)
        assert row["mse"] == pytest.approx((0.01 + 0.09) / 2)
        assert row["coverage"] == pytest.approx(0.5)
        assert row["se_bias"] == pytest.approx(0.2)
        assert not row["degenerate"]
        assert row["n_replications"] == 2

    def test_degenerate_coverage(self):
        reps = [self._replication(0, 0.0, math.nan), self._replication(1, 0.0, math.nan)]
        row = estimate(reps, "S").iloc[0]
        assert row["degenerate"]
        assert pd.isna(row["coverage"])

    def test_single_replication_has_no_se(self):
        row = estimate([self._replication(0, 0.2, 1.0)], "S").iloc[0]
        assert pd.isna(row["se_bias"])

    def test_no_replications(self):
        with pytest.raises(EstimatorError, match="no completed replications"):
            estimate([], "S")

    def test_imae(self):
        reps = [self._replication(0, 0.0, 1.0), self._replication(1, 0.0, 1.0)]
        frame = estimate_imae(reps, "S")
        assert frame.loc[0, "imae"] == pytest.approx(1.5)
        assert frame.loc[0, "segment"] == "x1"
