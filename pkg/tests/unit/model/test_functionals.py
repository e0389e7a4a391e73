"""Unit tests for posterior functionals."""

import math

import numpy as np
import pandas as pd
import pytest

from src.model.functionals import (
    change_in_odds,
    exposure_at,
    min_distance_predictor,
    odds_change_curve,
    summarize_odds_change,
)
from src.model.dataset import SurveyDataset
from src.utils.exceptions import DatasetError, DimensionMismatchError


@pytest.fixture
def draws(small_partition):
    """Forty synthetic draws over the 4-cell study partition."""
    rng = np.random.default_rng(8)
    n = 40
    frame = pd.DataFrame({
        f"z.{sid}.{m}": rng.normal(-1.0, 0.3, n) for sid, m in small_partition.cell_labels()
    })
    frame["rho"] = rng.uniform(0.2, 0.4, n)
    frame["lambda_b"] = rng.uniform(0.03, 0.07, n)
    return frame


class TestExposureAt:
    """Test per-draw exposure at arbitrary points."""

    def test_matches_hand_sum(self, draws, small_partition):
        location = np.array([5.5, 1.0])
        theta = exposure_at(draws, small_partition, "exponential", location)
        distances = np.hypot(*(small_partition.centroid_xy - location).T)
        columns = [f"z.{sid}.{m}" for sid, m in small_partition.cell_labels()]
        row = draws.iloc[3]
        expected = np.sum(
            np.exp(-distances / row["rho"]) * np.exp(row[columns].to_numpy(float)) * small_partition.widths
        )
        assert theta.shape == (len(draws),)
        assert theta[3] == pytest.approx(expected)

    def test_missing_columns(self, draws, small_partition):
        with pytest.raises(DimensionMismatchError):
            exposure_at(draws.drop(columns=["z.y.2"]), small_partition, "exponential", [1.0, 1.0])


class TestChangeInOdds:
    """Test relative odds changes along a ray."""

    def test_same_point_gives_zero(self, draws, small_partition):
        values = change_in_odds(draws, small_partition, "exponential", [5.2, 1.0], [5.2, 1.0])
        np.testing.assert_array_equal(values, 0.0)

    def test_curve_shape_and_first_row(self, draws, small_partition):
        curve = odds_change_curve(
            draws, small_partition, "exponential", (5.0, 1.0), (1.0, 0.0), 0.01, 1.0, 7
        )
        assert list(curve.columns) == ["distance_km", "mean", "q10", "q90"]
        assert len(curve) == 7
        assert curve["distance_km"].iloc[0] == pytest.approx(0.01)
        assert curve["distance_km"].iloc[-1] == pytest.approx(1.0)
        assert (curve.iloc[0][["mean", "q10", "q90"]] == 0.0).all()

    def test_moving_away_from_canal_lowers_odds(self, draws, small_partition):
        curve = odds_change_curve(
            draws, small_partition, "exponential", (5.0, 1.0), (1.0, 0.0), 0.01, 1.0, 5
        )
        assert curve["mean"].iloc[-1] < 0.0
        assert (curve["q10"] <= curve["mean"]).all()
        assert (curve["mean"] <= curve["q90"]).all()

    def test_invalid_ray(self, draws, small_partition):
        with pytest.raises(ValueError, match="direction"):
            odds_change_curve(draws, small_partition, "exponential", (5, 1), (0, 0), 0.0, 1.0, 3)
        with pytest.raises(ValueError, match="reference_km"):
            odds_change_curve(draws, small_partition, "exponential", (5, 1), (1, 0), 1.0, 1.0, 3)

    def test_summary(self):
        summary = summarize_odds_change(np.arange(11.0))
        assert summary.mean == pytest.approx(5.0)
        assert summary.lower == pytest.approx(1.0)
        assert summary.upper == pytest.approx(9.0)


class TestMinDistancePredictor:
    """Test the log minimum-distance covariate."""

    def test_log_distances(self, study_network, tiny_dataset):
        values = min_distance_predictor(study_network, tiny_dataset)
        assert values[0] == pytest.approx(math.log(0.4))
        assert values[4] == pytest.approx(math.log(0.2))

    def test_household_on_canal(self, study_network):
        dataset = SurveyDataset(("a",), [[5.0, 2.0]], [[0.0]], [0], [0], [0])
        with pytest.raises(DatasetError, match="lie on the canal"):
            min_distance_predictor(study_network, dataset)
