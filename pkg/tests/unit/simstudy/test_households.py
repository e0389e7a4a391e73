"""Unit tests for household sampling."""

import numpy as np
import pytest

from src.geometry.network import min_distance_to_network
from src.simstudy.households import (
    STUDY_REGION,
    clustered_population,
    sample_households,
    uniform_population,
)
from src.simstudy.scenario import StudyScenario
from src.utils.exceptions import ConfigurationError


def _inside(points, region=STUDY_REGION):
    x0, y0, x1, y1 = region
    return np.all((points[:, 0] >= x0) & (points[:, 0] <= x1) & (points[:, 1] >= y0) & (points[:, 1] <= y1))


class TestPopulations:
    """Test uniform and clustered populations."""

    def test_uniform_inside_region(self):
        points = uniform_population(500, np.random.default_rng(0))
        assert points.shape == (500, 2)
        assert _inside(points)

    def test_clustered_inside_region(self, split_network):
        points = clustered_population(500, split_network, 0.25, np.random.default_rng(1))
        assert _inside(points)

    def test_clustered_hugs_canal(self, split_network):
        points = clustered_population(300, split_network, 0.1, np.random.default_rng(2))
        distances = np.array([min_distance_to_network(split_network, p) for p in points])
        assert np.median(distances) < 0.15

    def test_clustered_gives_up(self, split_network):
        with pytest.raises(ConfigurationError, match="inside the region"):
            clustered_population(3, split_network, 0.01, np.random.default_rng(3), region=(20.0, 20.0, 21.0, 21.0))


class TestSampleHouseholds:
    """Test survey sampling from a population."""

    def test_shapes_and_determinism(self, split_network):
        scenario = StudyScenario(households=12, population_size=40, distribution="uniform")
        a = sample_households(scenario, split_network, np.random.default_rng(4))
        b = sample_households(scenario, split_network, np.random.default_rng(4))
        assert a[0].shape == (12, 2)
        assert a[1].shape == (12, 1)
        np.testing.assert_array_equal(a[0], b[0])
        np.testing.assert_array_equal(a[1], b[1])

    def test_households_are_distinct(self, split_network):
        scenario = StudyScenario(households=30, population_size=30)
        locations, _ = sample_households(scenario, split_network, np.random.default_rng(5))
        assert len(np.unique(locations, axis=0)) == 30

    def test_more_households_than_population(self, split_network):
        scenario = StudyScenario(households=10, population_size=5)
        with pytest.raises(ValueError, match="population_size"):
            sample_households(scenario, split_network, np.random.default_rng(0))
