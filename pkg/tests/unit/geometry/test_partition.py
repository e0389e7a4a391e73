"""Unit tests for equi-width partitions."""

import numpy as np
import pytest

from src.geometry.partition import build_partition
from src.simstudy.landscape import study_cell_counts
from src.utils.exceptions import ConfigurationError, DimensionMismatchError


class TestBuildPartition:
    """Test cell layout on the study network."""

    def test_cells_cover_each_segment(self, study_network):
        """Widths on a segment sum to its length."""
        partition = build_partition(study_network, 8)
        for cells in partition:
            segment = study_network.segment(cells.segment_id)
            assert cells.n_cells == 8
            assert cells.width.sum() == pytest.approx(segment.length, abs=1e-12)
            assert cells.lower[0] == 0.0
            assert cells.upper[-1] == segment.length
            np.testing.assert_allclose(cells.upper[:-1], cells.lower[1:])

    def test_centroids_are_midpoints(self, study_network):
        partition = build_partition(study_network, 4)
        y = partition.cells_for("y")
        np.testing.assert_allclose(y.centroid_arc, [0.5, 1.5, 2.5, 3.5])
        np.testing.assert_allclose(y.centroid_xy[:, 0], 5.0)
        np.testing.assert_allclose(y.centroid_xy[:, 1], [0.5, 1.5, 2.5, 3.5])

    def test_study_cell_counts_on_split_network(self, split_network):
        """y pieces carry half the cells of x1 and x2."""
        partition = build_partition(split_network, study_cell_counts(6))
        assert partition.cell_counts() == {"x1": 6, "x2": 6, "y_lower": 3, "y_upper": 3}
        assert partition.n_cells == 18
        np.testing.assert_allclose(partition.cells_for("y_lower").width, 8.0 / 9.0)
        np.testing.assert_allclose(partition.cells_for("y_upper").width, 4.0 / 9.0)

    def test_unknown_segment_in_counts(self, study_network):
        with pytest.raises(ConfigurationError, match="unknown segments"):
            build_partition(study_network, {"x1": 2, "x2": 2, "y": 2, "z": 2})

    def test_missing_segment_in_counts(self, study_network):
        with pytest.raises(ConfigurationError, match="no partition"):
            build_partition(study_network, {"x1": 2, "x2": 2})

    def test_zero_cells_rejected(self, study_network):
        with pytest.raises(ConfigurationError, match="at least 1"):
            build_partition(study_network, 0)


class TestFlatLayout:
    """Test the flat cell vector used by the model."""

    def test_split_and_join_are_inverse(self, small_partition):
        flat = np.arange(small_partition.n_cells, dtype=float)
        parts = small_partition.split(flat)
        assert list(parts) == ["x1", "x2", "y"]
        np.testing.assert_array_equal(parts["x2"], [4.0, 5.0, 6.0, 7.0])
        np.testing.assert_array_equal(small_partition.join(parts), flat)

    def test_split_checks_length(self, small_partition):
        with pytest.raises(DimensionMismatchError):
            small_partition.split(np.zeros(small_partition.n_cells + 1))

    def test_join_checks_lengths(self, small_partition):
        with pytest.raises(DimensionMismatchError):
            small_partition.join({"x1": np.zeros(4), "x2": np.zeros(3), "y": np.zeros(4)})

    def test_cell_labels_are_one_based(self, small_partition):
        labels = small_partition.cell_labels()
        assert labels[0] == ("x1", 1)
        assert labels[4] == ("x2", 1)
        assert labels[-1] == ("y", 4)
        assert len(labels) == small_partition.n_cells

    def test_block_slices(self, small_partition):
        assert small_partition.block("y") == slice(8, 12)

    @pytest.mark.parametrize("m", [1, 3, 10])
    def test_doubling_splits_every_cell_in_two(self, split_network, m):
        """Children of each coarse cell straddle its centroid symmetrically."""
        coarse = build_partition(split_network, m)
        fine = build_partition(split_network, 2 * m)
        for cells in coarse:
            children = fine.cells_for(cells.segment_id)
            np.testing.assert_allclose(children.lower[0::2], cells.lower, atol=1e-12)
            np.testing.assert_allclose(children.upper[1::2], cells.upper, atol=1e-12)
            np.testing.assert_allclose(children.upper[0::2], cells.centroid_arc, atol=1e-12)
            left, right = children.centroid_arc[0::2], children.centroid_arc[1::2]
            assert np.all(left < cells.centroid_arc) and np.all(cells.centroid_arc < right)
            np.testing.assert_allclose(0.5 * (left + right), cells.centroid_arc, atol=1e-12)
