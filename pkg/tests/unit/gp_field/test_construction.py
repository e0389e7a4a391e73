"""
Unit tests for the intersection-constrained field prior.

Tests the junction law, the exact intersection constraint, unit marginal
variances and the analytic gradients against finite differences.
"""

import math

import numpy as np
import pytest

from src.geometry.network import NetworkPoint
from src.gp_field.construction import (
    FieldTransform,
    LatentField,
    conditional_segment_dist,
    gp_conditional_on_point,
    intersection_value_dist,
    log_prior_density,
    sample_prior_field,
)
from src.gp_field.flow import FlowGraph
from src.utils.exceptions import DegenerateConditioningError, DimensionMismatchError


def _perturbed(latent, kind, key, index, delta):
    segments = {k: v.copy() for k, v in latent.segment_values.items()}
    sources = dict(latent.source_values)
    junctions = dict(latent.junction_values)
    if kind == "segment":
        segments[key][index] += delta
    elif kind == "source":
        sources[key] += delta
    else:
        junctions[key] += delta
    return LatentField(segments, sources, junctions, latent.flow)


class TestJunctionLaw:
    """Test the junction mean and sd."""

    def test_two_upstream_formula(self):
        omega = 1.7
        z = [0.4, -1.2]
        d = [1.0, 2.5]
        w = np.exp(-0.5 * (np.array(d) / omega) ** 2)
        mean, sd = intersection_value_dist(z, d, omega)
        assert mean == pytest.approx((w[0] * z[0] + w[1] * z[1]) / math.sqrt(2.0))
        assert sd == pytest.approx(math.sqrt(1.0 - (w[0] ** 2 + w[1] ** 2) / 2.0))

    def test_zero_distance_single_parent_is_degenerate(self):
        mean, sd = intersection_value_dist([0.8], [0.0], 1.0)
        assert mean == pytest.approx(0.8)
        assert sd == 0.0

    def test_mismatched_inputs(self):
        with pytest.raises(DimensionMismatchError):
            intersection_value_dist([0.1, 0.2], [1.0], 1.0)
        with pytest.raises(ValueError):
            intersection_value_dist([0.1], [-1.0], 1.0)

    def test_junction_values_have_unit_variance(self, study_network, small_partition):
        """coef'coef + sd^2 = 1 for every junction."""
        transform = FieldTransform(FlowGraph(study_network), small_partition, 1.5)
        for junction_id in transform.flow.junction_ids:
            coef = transform.junction_coef[junction_id]
            sd = transform.junction_sd[junction_id]
            assert float(coef @ coef) + sd * sd == pytest.approx(1.0)


class TestConditioning:
    """Test segment laws given an anchor value."""

    def test_zero_sd_raises(self, small_partition):
        with pytest.raises(DegenerateConditioningError):
            conditional_segment_dist(small_partition.cells_for("y"), 0.0, 1.0, 0.0, 0.0, 1.0)

    def test_unit_sd_matches_point_conditioning(self, small_partition):
        """With mean 0 and sd 1 the law equals textbook conditioning on the point."""
        cells = small_partition.cells_for("y")
        mean_a, cov_a = conditional_segment_dist(cells, 0.0, 0.7, 0.0, 1.0, 1.3)
        mean_b, cov_b = gp_conditional_on_point(cells, 0.0, 0.7, 1.3)
        np.testing.assert_allclose(mean_a, mean_b)
        np.testing.assert_allclose(cov_a, cov_b)


class TestFieldTransform:
    """Test the map from innovations to fields."""

    def test_innovation_count(self, study_network, small_partition):
        transform = FieldTransform(FlowGraph(study_network), small_partition, 2.0)
        assert transform.n_anchor == 5
        assert transform.n_innovations == 5 + 12

    def test_unit_marginal_variances(self, split_network, split_partition):
        transform = FieldTransform(FlowGraph(split_network), split_partition, 2.0)
        np.testing.assert_allclose(transform.cell_marginal_variances(), 1.0, atol=1e-6)

    def test_marginal_sd_scales_variances(self, study_network, small_partition):
        transform = FieldTransform(FlowGraph(study_network), small_partition, 2.0, alpha=0.5)
        np.testing.assert_allclose(transform.cell_marginal_variances(), 0.25, atol=1e-6)

    def test_wrong_innovation_length(self, study_network, small_partition):
        transform = FieldTransform(FlowGraph(study_network), small_partition, 2.0)
        with pytest.raises(DimensionMismatchError):
            transform.cell_values(np.zeros(3))

    def test_pullback_is_transpose_of_linear_map(self, study_network, small_partition):
        transform = FieldTransform(FlowGraph(study_network), small_partition, 2.0)
        n = transform.n_innovations
        jacobian = np.column_stack([transform.cell_values(e) for e in np.eye(n)])
        g = np.random.default_rng(3).standard_normal(small_partition.n_cells)
        np.testing.assert_allclose(transform.pullback(g), jacobian.T @ g, atol=1e-12)

    def test_lengthscale_gradient_matches_differences(self, study_network, small_partition):
        flow = FlowGraph(study_network)
        rng = np.random.default_rng(11)
        u = rng.standard_normal(FieldTransform(flow, small_partition, 2.0).n_innovations)
        g = rng.standard_normal(small_partition.n_cells)

        def objective(omega):
            return float(g @ FieldTransform(flow, small_partition, omega).cell_values(u))

        h = 1e-5
        numeric = (objective(2.0 + h) - objective(2.0 - h)) / (2 * h)
        analytic = FieldTransform(flow, small_partition, 2.0).lengthscale_gradient(u, g)
        assert analytic == pytest.approx(numeric, rel=1e-4, abs=1e-6)


class TestPriorField:
    """Test sampled fields and their log density."""

    def test_intersection_value_is_shared(self, study_network, small_partition):
        """Both segments meeting at a crossing read one scalar."""
        latent = sample_prior_field(study_network, small_partition, 2.0, rng_seed=5)
        for index, crossing in enumerate(study_network.intersections):
            on_a = latent.value_at(NetworkPoint(crossing.segment_a, crossing.arc_a))
            on_b = latent.value_at(NetworkPoint(crossing.segment_b, crossing.arc_b))
            assert on_a == on_b == latent.intersection_value(index)

    def test_split_network_pieces_share_their_joint(self, split_network, split_partition):
        latent = sample_prior_field(split_network, split_partition, 2.0, rng_seed=9)
        assert latent.intersection_value(1) == latent.intersection_value(2)

    def test_same_seed_same_field(self, study_network, small_partition):
        a = sample_prior_field(study_network, small_partition, 2.0, rng_seed=1)
        b = sample_prior_field(study_network, small_partition, 2.0, rng_seed=1)
        np.testing.assert_array_equal(a.flat(small_partition), b.flat(small_partition))

    @pytest.mark.parametrize("seed", range(20))
    def test_log_density_gradient_matches_differences(self, study_network, small_partition, seed):
        omega = 0.8 + 0.15 * seed
        latent = sample_prior_field(study_network, small_partition, omega, rng_seed=seed)
        _, gradient = log_prior_density(latent, small_partition, omega)
        # quadratic in the values, so a wide step adds no truncation error
        h = 1e-3

        def numeric(kind, key, index=0):
            up = log_prior_density(_perturbed(latent, kind, key, index, h), small_partition, omega)[0]
            down = log_prior_density(_perturbed(latent, kind, key, index, -h), small_partition, omega)[0]
            return (up - down) / (2 * h)

        for sid, values in latent.segment_values.items():
            for m in range(values.size):
                assert gradient.segment_values[sid][m] == pytest.approx(
                    numeric("segment", sid, m), rel=1e-6, abs=1e-8
                )
        for source_id in latent.source_values:
            assert gradient.source_values[source_id] == pytest.approx(
                numeric("source", source_id), rel=1e-6, abs=1e-8
            )
        for junction_id in latent.junction_values:
            assert gradient.junction_values[junction_id] == pytest.approx(
                numeric("junction", junction_id), rel=1e-6, abs=1e-8
            )

    def test_log_density_checks_shapes(self, study_network, small_partition):
        latent = sample_prior_field(study_network, small_partition, 2.0, rng_seed=0)
        latent.segment_values["y"] = latent.segment_values["y"][:2]
        with pytest.raises(DimensionMismatchError):
            log_prior_density(latent, small_partition, 2.0)
