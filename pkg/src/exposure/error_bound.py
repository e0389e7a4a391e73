"""Computable upper bound on the discretization error of theta_j.

Per cell the error splits into a field-variation term
K(d_centroid) * width * exp(z) * (exp(v) - 1) and a kernel term
(K(inf d) - K(sup d)) * width * exp(z + v), where v bounds |Z(c) - z| inside
the cell. The field is known only at centroids, so v is the largest
neighbouring centroid difference; this is an approximation, not a proof.
"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from src.exposure.kernels import DistanceKernel, kernel_eval
from src.geometry.partition import PartitionedNetwork
from src.gp_field.construction import LatentField
from src.utils.exceptions import DimensionMismatchError

DEFAULT_SUBSAMPLES = 10


@dataclass(frozen=True)
class ErrorBound:
    """Bound on |discretized - exact| exposure for one household."""

    total: float
    field_term: float
    kernel_term: float
    per_cell: np.ndarray


def local_variation(values: np.ndarray) -> np.ndarray:
    """Largest neighbouring centroid difference around each cell of a segment."""
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return np.zeros(values.size)
    diffs = np.abs(np.diff(values))
    left = np.concatenate([[diffs[1] if diffs.size > 1 else diffs[0]], diffs])
    right = np.concatenate([diffs, [diffs[-2] if diffs.size > 1 else diffs[-1]]])
    return np.maximum(left, right)


def discretization_error_bound(
    field: Union[LatentField, np.ndarray],
    kernel: DistanceKernel,
    partition: PartitionedNetwork,
    household,
    subsamples_per_cell: int = DEFAULT_SUBSAMPLES,
) -> ErrorBound:
    """Upper bound on the discretization error of one household's exposure.

    Cell distance extremes come from evenly spaced arc subsamples, the
    projection foot when it falls inside the cell, and interior polyline
    vertices.
    """
    if subsamples_per_cell < 2:
        raise ValueError("subsamples_per_cell must be at least 2")
    z = field.flat(partition) if isinstance(field, LatentField) else np.asarray(field, dtype=float)
    if z.shape != (partition.n_cells,):
        raise DimensionMismatchError(f"expected {partition.n_cells} cell values")
    household = np.asarray(household, dtype=float)

    field_parts, kernel_parts = [], []
    for cells in partition:
        segment = partition.network.segment(cells.segment_id)
        z_seg = z[partition.block(cells.segment_id)]
        variation = local_variation(z_seg)
        _, foot = segment.project(household)
        vertices = segment.cumulative_arclength[1:-1]

        k_inf = np.empty(cells.n_cells)
        k_sup = np.empty(cells.n_cells)
        for m in range(cells.n_cells):
            a, b = cells.lower[m], cells.upper[m]
            arcs = [np.linspace(a, b, subsamples_per_cell)]
            if a < foot < b:
                arcs.append([foot])
            inside = vertices[(vertices > a) & (vertices < b)]
            if inside.size:
                arcs.append(inside)
            points = segment.points_at(np.concatenate(arcs))
            d = np.hypot(*(points - household).T)
            k_inf[m] = kernel_eval(kernel, d.min())
            k_sup[m] = kernel_eval(kernel, d.max())

        k_centroid = kernel_eval(kernel, np.hypot(*(cells.centroid_xy - household).T))
        field_parts.append(k_centroid * cells.width * np.exp(z_seg) * np.expm1(variation))
        kernel_parts.append((k_inf - k_sup) * cells.width * np.exp(z_seg + variation))

    field_cells = np.concatenate(field_parts)
    kernel_cells = np.concatenate(kernel_parts)
    per_cell = field_cells + kernel_cells
    return ErrorBound(
        total=float(per_cell.sum()),
        field_term=float(field_cells.sum()),
        kernel_term=float(kernel_cells.sum()),
        per_cell=per_cell,
    )
