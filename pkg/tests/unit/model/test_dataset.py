"""Unit tests for survey datasets."""

import numpy as np
import pandas as pd
import pytest

from src.model.dataset import SurveyDataset, load_dataset, save_dataset
from src.utils.exceptions import DatasetError, InputOutputError


def _dataset(**changes):
    values = dict(
        household_ids=("a", "b"),
        locations=[[0.0, 1.0], [2.0, 3.0]],
        covariates=[[0.5], [-0.5]],
        groups=[0, 0],
        observation_households=[0, 0, 1],
        outcomes=[1, 0, 0],
    )
    values.update(changes)
    return SurveyDataset(**values)


class TestSurveyDataset:
    """Test validation and counts."""

    def test_counts(self, tiny_dataset):
        assert tiny_dataset.n_households == 6
        assert tiny_dataset.n_observations == 12
        assert tiny_dataset.n_covariates == 1
        np.testing.assert_array_equal(tiny_dataset.positives(), [1, 0, 2, 0, 1, 0])
        np.testing.assert_array_equal(tiny_dataset.negatives(), [1, 2, 0, 2, 1, 2])

    def test_empty_dataset_rejected(self):
        with pytest.raises(DatasetError, match="no households"):
            _dataset(household_ids=(), locations=np.zeros((0, 2)), covariates=np.zeros((0, 1)),
                     groups=[], observation_households=[], outcomes=[])

    def test_duplicate_ids_rejected(self):
        with pytest.raises(DatasetError, match="unique"):
            _dataset(household_ids=("a", "a"))

    def test_non_binary_outcome_rejected(self):
        with pytest.raises(DatasetError, match="0 or 1"):
            _dataset(outcomes=[1, 2, 0])

    def test_unknown_household_rejected(self):
        with pytest.raises(DatasetError, match="unknown household"):
            _dataset(observation_households=[0, 0, 5])

    def test_length_mismatch_rejected(self):
        with pytest.raises(DatasetError, match="disagree"):
            _dataset(groups=[0])

    def test_arrays_are_read_only(self, tiny_dataset):
        with pytest.raises(ValueError):
            tiny_dataset.locations[0, 0] = 1.0


class TestDatasetFiles:
    """Test households.csv and observations.csv."""

    def test_save_and_load(self, tiny_dataset, tmp_path):
        save_dataset(tiny_dataset, tmp_path)
        loaded = load_dataset(tmp_path)
        assert loaded.household_ids == tiny_dataset.household_ids
        np.testing.assert_array_equal(loaded.locations, tiny_dataset.locations)
        np.testing.assert_array_equal(loaded.covariates, tiny_dataset.covariates)
        np.testing.assert_array_equal(loaded.groups, tiny_dataset.groups)
        np.testing.assert_array_equal(loaded.outcomes, tiny_dataset.outcomes)
        np.testing.assert_array_equal(
            loaded.observation_households, tiny_dataset.observation_households
        )

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputOutputError, match="missing dataset file"):
            load_dataset(tmp_path)

    def test_missing_column(self, tmp_path):
        pd.DataFrame({"household_id": ["a"], "x_km": [0.0], "y_km": [0.0]}).to_csv(
            tmp_path / "households.csv", index=False
        )
        pd.DataFrame({"household_id": ["a"], "y": [1]}).to_csv(tmp_path / "observations.csv", index=False)
        with pytest.raises(DatasetError, match="group"):
            load_dataset(tmp_path)

    def test_unknown_household_in_observations(self, tmp_path):
        pd.DataFrame({"household_id": ["a"], "x_km": [0.0], "y_km": [0.0], "group": [0]}).to_csv(
            tmp_path / "households.csv", index=False
        )
        pd.DataFrame({"household_id": ["b"], "y": [1]}).to_csv(tmp_path / "observations.csv", index=False)
        with pytest.raises(DatasetError, match="unknown households"):
            load_dataset(tmp_path)

    def test_covariates_are_ordered_numerically(self, tmp_path):
        pd.DataFrame({
            "household_id": ["a"], "x_km": [0.0], "y_km": [0.0], "group": [0],
            "x10": [10.0], "x2": [2.0], "x1": [1.0],
        }).to_csv(tmp_path / "households.csv", index=False)
        pd.DataFrame({"household_id": ["a"], "y": [0]}).to_csv(tmp_path / "observations.csv", index=False)
        dataset = load_dataset(tmp_path)
        np.testing.assert_array_equal(dataset.covariates, [[1.0, 2.0, 10.0]])
