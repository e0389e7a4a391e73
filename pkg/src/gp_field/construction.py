"""Intersection-constrained Gaussian process prior on a partitioned network.

Sources carry iid standard normal values. Each junction draws its value from
its upstream anchors, and each segment's centroid values are drawn
conditionally on the segment's anchor. The sampler works with iid standard
normal innovations; FieldTransform maps them to field values.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from src.geometry.network import CanalNetwork, NetworkPoint
from src.geometry.partition import PartitionedNetwork, SegmentPartition
from src.gp_field.flow import FlowGraph
from src.gp_field.kernels import (
    centroid_distances,
    jittered_cholesky,
    sqexp_cov,
    sqexp_cov_domega,
)
from src.utils.exceptions import DegenerateConditioningError, DimensionMismatchError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

LOG_2PI = math.log(2.0 * math.pi)


def intersection_value_dist(
    upstream_values: Sequence[float], distances: Sequence[float], omega: float
) -> Tuple[float, float]:
    """Mean and sd of a junction value given its upstream anchors.

    With two upstream anchors this is
    mean = (w1 Z1 + w2 Z2) / sqrt(2), sd = sqrt(1 - (w1^2 + w2^2) / 2),
    w_i = exp(-d_i^2 / (2 omega^2)). Upstream values are standardized
    residuals (a source's value is its own residual).
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    values = np.asarray(upstream_values, dtype=float)
    d = np.asarray(distances, dtype=float)
    if values.shape != d.shape or values.size == 0:
        raise DimensionMismatchError("need one distance per upstream value")
    if np.any(d < 0):
        raise ValueError("distances must be non-negative")
    weights = np.exp(-0.5 * (d / omega) ** 2)
    n = values.size
    mean = float(weights @ values) / math.sqrt(n)
    variance = 1.0 - float(np.sum(weights * weights)) / n
    assert variance >= 0.0, f"negative junction variance {variance}"
    return mean, math.sqrt(variance)


def cross_covariance(cells: SegmentPartition, arc: float, omega: float, alpha: float = 1.0) -> np.ndarray:
    """Covariance between each centroid value and the field at an arc position."""
    return sqexp_cov(np.abs(cells.centroid_arc - arc), omega, alpha)


def conditional_segment_dist(
    cells: SegmentPartition,
    arc: float,
    value: float,
    mean: float,
    sd: float,
    omega: float,
    alpha: float = 1.0,
) -> Tuple[np.ndarray, np.ndarray]:
    """Segment centroid law given the field value at one point on the segment.

    mean = Sigma(p) (Z(p) - mu_p) / sd^2, cov = Sigma - Sigma(p) Sigma(p)' / sd^2.

    Raises:
        DegenerateConditioningError: If sd is zero; use gp_conditional_on_point
    """
    if not sd > 0:
        raise DegenerateConditioningError(
            "conditioning sd is zero; condition on the known value with gp_conditional_on_point"
        )
    cov = sqexp_cov(centroid_distances(cells), omega, alpha)
    cross = cross_covariance(cells, arc, omega, alpha)
    precision = 1.0 / (sd * sd)
    return precision * cross * (value - mean), cov - precision * np.outer(cross, cross)


def gp_conditional_on_point(
    cells: SegmentPartition, arc: float, value: float, omega: float, alpha: float = 1.0
) -> Tuple[np.ndarray, np.ndarray]:
    """Textbook GP conditioning of centroid values on an exactly known point value."""
    cov = sqexp_cov(centroid_distances(cells), omega, alpha)
    cross = cross_covariance(cells, arc, omega, alpha)
    point_var = alpha * alpha
    return cross * value / point_var, cov - np.outer(cross, cross) / point_var


@dataclass
class LatentField:
    """Field values at cell centroids, sources and junctions.

    A declared intersection has no value of its own: it reads the value of the
    junction it belongs to, so both segments meeting there see one scalar.
    """

    segment_values: Dict[str, np.ndarray]
    source_values: Dict[str, float]
    junction_values: Dict[str, float]
    flow: FlowGraph = field(repr=False)

    def intersection_value(self, index: int) -> float:
        return self.junction_values[self.flow.intersection_junctions[index]]

    def value_at(self, point: NetworkPoint) -> Optional[float]:
        """Anchor value at a network point, or None if no anchor sits there."""
        anchor_id = self.flow.anchor_at(point)
        if anchor_id is None:
            return None
        if anchor_id in self.junction_values:
            return self.junction_values[anchor_id]
        return self.source_values[anchor_id]

    def flat(self, partition: PartitionedNetwork) -> np.ndarray:
        return partition.join(self.segment_values)


@dataclass
class _SegmentFactor:
    anchor: Optional[str]
    cross: np.ndarray
    factor: np.ndarray
    distances: np.ndarray
    anchor_distances: np.ndarray
    scale: float


class FieldTransform:
    """Non-centered map from iid N(0, 1) innovations to a LatentField.

    Innovation layout: sources and junctions in flow order, then cell
    innovations segment by segment in partition order.
    """

    def __init__(
        self,
        flow: FlowGraph,
        partition: PartitionedNetwork,
        omega: float,
        alpha: float = 1.0,
        lengthscale_factors: Optional[Mapping[str, float]] = None,
    ):
        if not omega > 0:
            raise ValueError("omega must be positive")
        self.flow = flow
        self.partition = partition
        self.omega = float(omega)
        self.alpha = float(alpha)
        factors = dict(lengthscale_factors or {})

        self.anchor_ids = list(flow.order)
        self.anchor_index = {a: i for i, a in enumerate(self.anchor_ids)}
        self.n_anchor = len(self.anchor_ids)
        self.n_innovations = self.n_anchor + partition.n_cells

        # junction rule: mean = sum(coef * parent residual), sd = sigma
        self.junction_coef: Dict[str, np.ndarray] = {}
        self.junction_weights: Dict[str, np.ndarray] = {}
        self.junction_sd: Dict[str, float] = {}
        for junction_id in flow.junction_ids:
            parents = flow.parents[junction_id]
            d = np.array([p.distance for p in parents])
            weights = np.exp(-0.5 * (d / self.omega) ** 2)
            _, sd = intersection_value_dist(np.zeros(len(parents)), d, self.omega)
            self.junction_weights[junction_id] = weights
            self.junction_coef[junction_id] = weights / math.sqrt(len(parents))
            self.junction_sd[junction_id] = sd

        self.segments: Dict[str, _SegmentFactor] = {}
        for cells in partition:
            sid = cells.segment_id
            scale = float(factors.get(sid, 1.0))
            omega_seg = self.omega * scale
            dist = centroid_distances(cells)
            anchor = flow.segment_anchor[sid]
            if anchor is None:
                cov = sqexp_cov(dist, omega_seg)
                cross = np.zeros(cells.n_cells)
                anchor_dist = np.zeros(cells.n_cells)
                anchor_id = None
            else:
                anchor_id, arc = anchor
                _, cov = conditional_segment_dist(cells, arc, 0.0, 0.0, 1.0, omega_seg)
                cross = cross_covariance(cells, arc, omega_seg)
                anchor_dist = np.abs(cells.centroid_arc - arc)
            factor, _ = jittered_cholesky(cov, 1.0, omega_seg)
            self.segments[sid] = _SegmentFactor(anchor_id, cross, factor, dist, anchor_dist, scale)

    def _anchor_residuals(self, u: np.ndarray) -> np.ndarray:
        return u[: self.n_anchor]

    def _cell_innovations(self, u: np.ndarray, segment_id: str) -> np.ndarray:
        block = self.partition.block(segment_id)
        return u[self.n_anchor + block.start: self.n_anchor + block.stop]

    def _check(self, u: np.ndarray) -> np.ndarray:
        u = np.asarray(u, dtype=float)
        if u.shape != (self.n_innovations,):
            raise DimensionMismatchError(
                f"expected {self.n_innovations} innovations, got shape {u.shape}"
            )
        return u

    def cell_values(self, u: np.ndarray) -> np.ndarray:
        """Flat centroid values for an innovation vector."""
        u = self._check(u)
        eps = self._anchor_residuals(u)
        parts = []
        for cells in self.partition:
            seg = self.segments[cells.segment_id]
            values = seg.factor @ self._cell_innovations(u, cells.segment_id)
            if seg.anchor is not None:
                values = values + seg.cross * eps[self.anchor_index[seg.anchor]]
            parts.append(self.alpha * values)
        return np.concatenate(parts)

    def apply(self, u: np.ndarray) -> LatentField:
        u = self._check(u)
        eps = self._anchor_residuals(u)
        sources = {a: self.alpha * float(eps[self.anchor_index[a]]) for a in self.flow.source_ids}
        junctions = {}
        for junction_id in self.flow.junction_ids:
            parents = self.flow.parents[junction_id]
            parent_eps = np.array([eps[self.anchor_index[p.anchor_id]] for p in parents])
            mean = float(self.junction_coef[junction_id] @ parent_eps)
            sd = self.junction_sd[junction_id]
            junctions[junction_id] = self.alpha * (mean + sd * float(eps[self.anchor_index[junction_id]]))
        values = self.partition.split(self.cell_values(u))
        return LatentField(
            {k: np.array(v) for k, v in values.items()}, sources, junctions, self.flow
        )

    def pullback(self, grad_cells: np.ndarray) -> np.ndarray:
        """Gradient with respect to innovations of a function of the cell values."""
        grad_cells = np.asarray(grad_cells, dtype=float)
        grad = np.zeros(self.n_innovations)
        for cells in self.partition:
            seg = self.segments[cells.segment_id]
            block = self.partition.block(cells.segment_id)
            g = self.alpha * grad_cells[block]
            grad[self.n_anchor + block.start: self.n_anchor + block.stop] = seg.factor.T @ g
            if seg.anchor is not None:
                grad[self.anchor_index[seg.anchor]] += float(seg.cross @ g)
        return grad

    def lengthscale_gradient(self, u: np.ndarray, grad_cells: np.ndarray) -> float:
        """Derivative with respect to omega of a function of the cell values.

        Differentiates the Cholesky factors with L^{-1} dC L^{-T} projected onto
        its lower triangle (half diagonal).
        """
        u = self._check(u)
        eps = self._anchor_residuals(u)
        total = 0.0
        for cells in self.partition:
            seg = self.segments[cells.segment_id]
            omega_seg = self.omega * seg.scale
            g = grad_cells[self.partition.block(cells.segment_id)]
            d_cov = sqexp_cov_domega(seg.distances, omega_seg) * seg.scale
            if seg.anchor is not None:
                d_cross = sqexp_cov_domega(seg.anchor_distances, omega_seg) * seg.scale
                d_cov = d_cov - np.outer(d_cross, seg.cross) - np.outer(seg.cross, d_cross)
                total += self.alpha * float(g @ d_cross) * float(eps[self.anchor_index[seg.anchor]])
            inner = solve_triangular(seg.factor, d_cov, lower=True, check_finite=False)
            inner = solve_triangular(seg.factor, inner.T, lower=True, check_finite=False)
            phi = np.tril(inner)
            phi[np.diag_indices_from(phi)] *= 0.5
            d_factor = seg.factor @ phi
            total += self.alpha * float(g @ (d_factor @ self._cell_innovations(u, cells.segment_id)))
        return total

    def cell_marginal_variances(self) -> np.ndarray:
        """Prior variance of every centroid value under this construction."""
        parts = []
        for cells in self.partition:
            seg = self.segments[cells.segment_id]
            parts.append(self.alpha ** 2 * (seg.cross ** 2 + np.sum(seg.factor ** 2, axis=1)))
        return np.concatenate(parts)


def sample_prior_field(
    network: CanalNetwork,
    partition: PartitionedNetwork,
    omega: float,
    rng_seed: int,
    alpha: float = 1.0,
) -> LatentField:
    """Draw one field from the constrained prior.

    Raises:
        ConfigurationError: If flow order cannot be established
    """
    transform = FieldTransform(FlowGraph(network), partition, omega, alpha)
    rng = np.random.default_rng(rng_seed)
    return transform.apply(rng.standard_normal(transform.n_innovations))


def log_prior_density(
    latent: LatentField,
    partition: PartitionedNetwork,
    omega: float,
    alpha: float = 1.0,
    lengthscale_factors: Optional[Mapping[str, float]] = None,
) -> Tuple[float, LatentField]:
    """Log density of a field under the constrained prior and its gradient.

    Returns:
        (log density, gradient arranged as a LatentField)

    Raises:
        DimensionMismatchError: If the field does not match the partition
        DegenerateConditioningError: If a junction has zero residual sd
    """
    flow = latent.flow
    for cells in partition:
        values = latent.segment_values.get(cells.segment_id)
        if values is None or np.shape(values) != (cells.n_cells,):
            raise DimensionMismatchError(
                f"segment '{cells.segment_id}' needs {cells.n_cells} values"
            )
    if set(latent.source_values) != set(flow.source_ids) or set(latent.junction_values) != set(
        flow.junction_ids
    ):
        raise DimensionMismatchError("field anchors do not match the network's flow graph")

    transform = FieldTransform(flow, partition, omega, alpha, lengthscale_factors)
    a = transform.alpha
    n_values = len(flow.order) + partition.n_cells

    eps: Dict[str, float] = {}
    sd_of: Dict[str, float] = {}
    logp = 0.0
    for anchor_id in flow.order:
        if anchor_id in latent.source_values:
            eps[anchor_id] = latent.source_values[anchor_id] / a
            sd_of[anchor_id] = 1.0
            logp += -0.5 * (LOG_2PI + eps[anchor_id] ** 2)
            continue
        sd = transform.junction_sd[anchor_id]
        if sd <= 0.0:
            raise DegenerateConditioningError(f"junction '{anchor_id}' has zero residual sd")
        parents = flow.parents[anchor_id]
        mean = float(
            transform.junction_coef[anchor_id] @ np.array([eps[p.anchor_id] for p in parents])
        )
        eps[anchor_id] = (latent.junction_values[anchor_id] / a - mean) / sd
        sd_of[anchor_id] = sd
        logp += -0.5 * (LOG_2PI + eps[anchor_id] ** 2) - math.log(sd)

    # partial derivatives with respect to each anchor residual
    partial = {anchor_id: -eps[anchor_id] for anchor_id in flow.order}
    grad_cells: Dict[str, np.ndarray] = {}
    for cells in partition:
        seg = transform.segments[cells.segment_id]
        unit = np.asarray(latent.segment_values[cells.segment_id], dtype=float) / a
        residual = unit.copy()
        if seg.anchor is not None:
            residual -= seg.cross * eps[seg.anchor]
        whitened = solve_triangular(seg.factor, residual, lower=True, check_finite=False)
        logp += -0.5 * float(whitened @ whitened) - float(np.sum(np.log(np.diag(seg.factor))))
        logp += -0.5 * cells.n_cells * LOG_2PI
        solved = cho_solve((seg.factor, True), residual, check_finite=False)
        grad_cells[cells.segment_id] = -solved / a
        if seg.anchor is not None:
            partial[seg.anchor] += float(seg.cross @ solved)

    total: Dict[str, float] = {}
    for anchor_id in reversed(flow.order):
        value = partial[anchor_id]
        for child_id, slot in flow.children[anchor_id]:
            coef = transform.junction_coef[child_id][slot]
            value -= total[child_id] * coef / sd_of[child_id]
        total[anchor_id] = value

    logp -= n_values * math.log(a)
    gradient = LatentField(
        grad_cells,
        {s: total[s] / a for s in flow.source_ids},
        {j: total[j] / (sd_of[j] * a) for j in flow.junction_ids},
        flow,
    )
    return logp, gradient
