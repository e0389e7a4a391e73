"""
Unit tests for canal segments and networks.

Tests arc-length parametrisation, projection, network distances and the
consistency checks applied when a network is built.
"""

import math

import numpy as np
import pytest

from src.geometry.network import (
    UNREACHABLE,
    CanalNetwork,
    CanalSegment,
    Intersection,
    NetworkPoint,
    euclid_distance,
    min_distance_to_network,
    network_distance,
    network_distances_from,
    point_at,
)
from src.utils.exceptions import GeometryConsistencyError, GeometryDomainError


@pytest.fixture
def bent_segment():
    """An L-shaped polyline of length 7: 3 km east, then 4 km north."""
    return CanalSegment("bend", np.array([[0.0, 0.0], [3.0, 0.0], [3.0, 4.0]]))


class TestCanalSegment:
    """Test arc-length geometry of one polyline."""

    def test_length_and_cumulative_arclength(self, bent_segment):
        """Length is the sum of leg lengths."""
        assert bent_segment.length == pytest.approx(7.0)
        np.testing.assert_allclose(bent_segment.cumulative_arclength, [0.0, 3.0, 7.0])

    def test_points_at_follow_the_legs(self, bent_segment):
        """Arc positions map onto the right leg."""
        points = bent_segment.points_at([0.0, 1.5, 3.0, 5.0, 7.0])
        np.testing.assert_allclose(
            points, [[0, 0], [1.5, 0], [3, 0], [3, 2], [3, 4]], atol=1e-12
        )

    def test_point_at_outside_segment_raises(self, bent_segment):
        """Arc lengths beyond the segment are a domain error."""
        with pytest.raises(GeometryDomainError):
            point_at(bent_segment, 7.5)
        with pytest.raises(GeometryDomainError):
            point_at(bent_segment, -0.1)

    def test_project_returns_distance_and_arc(self, bent_segment):
        """The nearest point on the second leg is found."""
        distance, arc = bent_segment.project([4.0, 2.0])
        assert distance == pytest.approx(1.0)
        assert arc == pytest.approx(5.0)

    def test_tangent_is_unit_direction(self, bent_segment):
        """Tangents point along the leg carrying the arc."""
        tangents = bent_segment.tangent_at([1.0, 5.0])
        np.testing.assert_allclose(tangents, [[1.0, 0.0], [0.0, 1.0]])

    def test_repeated_vertices_rejected(self):
        """Zero-length legs are inconsistent geometry."""
        with pytest.raises(GeometryConsistencyError, match="repeated"):
            CanalSegment("bad", np.array([[0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]))

    def test_single_vertex_rejected(self):
        """A segment needs two vertices."""
        with pytest.raises(GeometryConsistencyError, match="at least 2"):
            CanalSegment("bad", np.array([[0.0, 0.0]]))


class TestCanalNetwork:
    """Test network construction and distances."""

    def test_study_network_facts(self, study_network):
        """Three segments totalling 24 km."""
        assert study_network.segment_ids == ["x1", "x2", "y"]
        assert study_network.total_length == pytest.approx(24.0)
        assert len(study_network.intersections) == 2

    def test_duplicate_segment_ids_rejected(self):
        """Segment ids must be unique."""
        a = CanalSegment("a", np.array([[0.0, 0.0], [1.0, 0.0]]))
        b = CanalSegment("a", np.array([[0.0, 1.0], [1.0, 1.0]]))
        with pytest.raises(GeometryConsistencyError, match="duplicate"):
            CanalNetwork((a, b))

    def test_intersection_anchors_must_coincide(self):
        """Anchors further apart than 1e-9 km are rejected."""
        a = CanalSegment("a", np.array([[0.0, 0.0], [2.0, 0.0]]))
        b = CanalSegment("b", np.array([[1.0, -1.0], [1.0, 1.0]]))
        CanalNetwork((a, b), intersections=(Intersection("a", 1.0, "b", 1.0),))
        with pytest.raises(GeometryConsistencyError, match="apart"):
            CanalNetwork((a, b), intersections=(Intersection("a", 1.0, "b", 1.0 + 1e-6),))

    def test_unknown_segment_lookup(self, study_network):
        """Unknown ids raise a consistency error."""
        with pytest.raises(GeometryConsistencyError, match="unknown segment"):
            study_network.segment("nope")

    def test_euclid_distance(self):
        assert euclid_distance([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0)

    def test_min_distance_to_network(self, study_network):
        """A point above x2 is nearest to x2 or y."""
        assert min_distance_to_network(study_network, [2.0, 3.0]) == pytest.approx(1.0 / 3.0)
        assert min_distance_to_network(study_network, [5.2, 1.0]) == pytest.approx(0.2)

    def test_network_distance_along_one_segment(self, study_network):
        distance = network_distance(
            study_network, NetworkPoint("x1", 1.0), NetworkPoint("x1", 4.5)
        )
        assert distance == pytest.approx(3.5)

    def test_network_distance_through_junction(self, study_network):
        """x1 start to the top of y goes through the x1/y crossing."""
        distance = network_distance(
            study_network, NetworkPoint("x1", 0.0), NetworkPoint("y", 4.0)
        )
        assert distance == pytest.approx(9.0)

    def test_unreachable_points(self):
        """Disconnected segments have infinite network distance."""
        a = CanalSegment("a", np.array([[0.0, 0.0], [1.0, 0.0]]))
        b = CanalSegment("b", np.array([[0.0, 5.0], [1.0, 5.0]]))
        network = CanalNetwork((a, b))
        distance = network_distance(network, NetworkPoint("a", 0.0), NetworkPoint("b", 0.0))
        assert distance == UNREACHABLE
        assert math.isinf(distance)

    def test_distance_matrix(self, study_network):
        """One row per origin, one column per target."""
        matrix = network_distances_from(
            study_network,
            [NetworkPoint("x1", 0.0), NetworkPoint("x2", 0.0)],
            [NetworkPoint("y", 0.0), NetworkPoint("y", 8.0 / 3.0)],
        )
        assert matrix.shape == (2, 2)
        np.testing.assert_allclose(matrix, [[5.0, 5.0 + 8.0 / 3.0], [5.0 + 8.0 / 3.0, 5.0]])


class TestDistanceProperties:
    """Test metric properties on sampled network points."""

    @staticmethod
    def _sample_points(network, n, rng):
        lengths = np.array([s.length for s in network.segments])
        picks = rng.choice(len(lengths), size=n, p=lengths / lengths.sum())
        return [
            NetworkPoint(network.segments[k].segment_id, float(rng.uniform(0.0, lengths[k])))
            for k in picks
        ]

    def test_triangle_inequality(self, split_network):
        points = self._sample_points(split_network, 20, np.random.default_rng(3))
        matrix = network_distances_from(split_network, points, points)
        np.testing.assert_allclose(np.diag(matrix), 0.0, atol=1e-12)
        np.testing.assert_allclose(matrix, matrix.T, atol=1e-12)
        through = matrix[:, :, None] + matrix[None, :, :]
        assert np.all(matrix[:, None, :] <= through + 1e-12)

    def test_triangle_inequality_with_single_queries(self, study_network):
        a, b, c = self._sample_points(study_network, 3, np.random.default_rng(4))
        ab = network_distance(study_network, a, b)
        bc = network_distance(study_network, b, c)
        ac = network_distance(study_network, a, c)
        assert ac <= ab + bc + 1e-12

    def test_min_distance_never_exceeds_canal_points(self, split_network):
        """Checked against 10^4 sampled canal points per household."""
        rng = np.random.default_rng(5)
        lengths = np.array([s.length for s in split_network.segments])
        counts = rng.multinomial(10_000, lengths / lengths.sum())
        canal = np.vstack([
            segment.points_at(rng.uniform(0.0, segment.length, count))
            for segment, count in zip(split_network.segments, counts)
        ])
        households = np.column_stack([rng.uniform(-1.0, 11.0, 25), rng.uniform(-1.0, 5.0, 25)])
        for household in households:
            nearest = min_distance_to_network(split_network, household)
            sampled = np.hypot(*(canal - household).T)
            assert nearest <= sampled.min() + 1e-12
            assert nearest <= euclid_distance(household, canal[0]) + 1e-12
