"""Unit tests for the study geometry and true intensities."""

import pytest

from src.simstudy.landscape import (
    CROSSING_HEIGHT_KM,
    lambda_x1,
    lambda_x2,
    lambda_y,
    study_cell_counts,
    study_geometry,
    true_intensities,
)


class TestStudyGeometry:
    """Test the three-canal layout."""

    def test_unsplit(self):
        network = study_geometry(split_y=False)
        assert network.segment_ids == ["x1", "x2", "y"]
        assert network.segment("y").length == pytest.approx(4.0)
        assert len(network.intersections) == 2

    def test_split(self):
        network = study_geometry(split_y=True)
        assert network.segment_ids == ["x1", "x2", "y_lower", "y_upper"]
        assert network.segment("y_lower").length == pytest.approx(CROSSING_HEIGHT_KM)
        assert network.segment("y_upper").length == pytest.approx(4.0 - CROSSING_HEIGHT_KM)
        assert len(network.intersections) == 3

    def test_total_length(self):
        assert study_geometry(split_y=True).total_length == pytest.approx(24.0)


class TestIntensities:
    """Test values and continuity of the true intensities."""

    def test_values(self):
        assert lambda_x1(0.0) == pytest.approx(0.15)
        assert lambda_x1(10.0) == pytest.approx(1.15)
        assert lambda_y(4.0) == pytest.approx(0.4 + 1.0)

    def test_continuous_at_x1_crossing(self):
        assert lambda_y(0.0) == pytest.approx(lambda_x1(5.0), abs=1e-12)

    def test_continuous_at_x2_crossing(self):
        assert lambda_x2(5.0) == pytest.approx(lambda_y(CROSSING_HEIGHT_KM), abs=1e-12)

    def test_split_pieces_join(self):
        pieces = true_intensities(split_y=True)
        assert pieces["y_upper"](0.0) == pytest.approx(pieces["y_lower"](CROSSING_HEIGHT_KM), abs=1e-12)
        assert pieces["y_upper"](1.0) == pytest.approx(lambda_y(CROSSING_HEIGHT_KM + 1.0))

    def test_positive_everywhere(self):
        for c in (0.0, 2.0, 5.0, 10.0):
            assert lambda_x2(c) > 0


class TestStudyCellCounts:
    """Test grid resolutions on the split network."""

    def test_halves_on_y(self):
        assert study_cell_counts(40) == {"x1": 40, "x2": 40, "y_lower": 20, "y_upper": 20}

    @pytest.mark.parametrize("m", [0, 1, 7])
    def test_invalid(self, m):
        with pytest.raises(ValueError, match="even integer"):
            study_cell_counts(m)
