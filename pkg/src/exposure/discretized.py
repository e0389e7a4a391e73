"""Discretized cumulative exposure of households to the canal field."""

from dataclasses import dataclass
from typing import Dict, Union

import numpy as np

from src.exposure.kernels import DistanceKernel, kernel_eval
from src.geometry.partition import PartitionedNetwork
from src.gp_field.construction import LatentField
from src.utils.exceptions import DimensionMismatchError


@dataclass(frozen=True, eq=False)
class ExposureTables:
    """Household-to-centroid distances and cell widths for one partition.

    distances has one row per household and one column per flat cell.
    """

    partition: PartitionedNetwork
    locations: np.ndarray
    distances: np.ndarray

    @property
    def widths(self) -> np.ndarray:
        return self.partition.widths

    @property
    def n_households(self) -> int:
        return int(self.distances.shape[0])

    def segment_distances(self, household: int, segment_id: str) -> np.ndarray:
        return self.distances[household, self.partition.block(segment_id)]


def build_exposure_tables(partition: PartitionedNetwork, locations) -> ExposureTables:
    """Distances from every household to every cell centroid."""
    locations = np.atleast_2d(np.asarray(locations, dtype=float))
    if locations.shape[1] != 2:
        raise DimensionMismatchError("household locations must be an (n, 2) array")
    delta = locations[:, None, :] - partition.centroid_xy[None, :, :]
    distances = np.hypot(delta[..., 0], delta[..., 1])
    distances.setflags(write=False)
    return ExposureTables(partition, locations, distances)


def _flat_values(field: Union[LatentField, np.ndarray], partition: PartitionedNetwork) -> np.ndarray:
    if isinstance(field, LatentField):
        return field.flat(partition)
    values = np.asarray(field, dtype=float)
    if values.shape != (partition.n_cells,):
        raise DimensionMismatchError(
            f"expected {partition.n_cells} cell values, got shape {values.shape}"
        )
    return values


def segment_exposures(
    field: Union[LatentField, np.ndarray], kernel: DistanceKernel, tables: ExposureTables, household: int
) -> Dict[str, float]:
    """Exposure contributed by each segment to one household."""
    z = _flat_values(field, tables.partition)
    contributions = {}
    for cells in tables.partition:
        block = tables.partition.block(cells.segment_id)
        weights = kernel_eval(kernel, tables.distances[household, block])
        contributions[cells.segment_id] = float(
            np.sum(weights * np.exp(z[block]) * cells.width)
        )
    return contributions


def discretized_exposure(
    field: Union[LatentField, np.ndarray], kernel: DistanceKernel, tables: ExposureTables, household: int
) -> float:
    """theta_j: sum over cells of K(d / rho) exp(z) width."""
    return sum(segment_exposures(field, kernel, tables, household).values())


def discretized_exposure_all(
    field: Union[LatentField, np.ndarray], kernel: DistanceKernel, tables: ExposureTables
) -> np.ndarray:
    """theta for every household at once."""
    z = _flat_values(field, tables.partition)
    return kernel_eval(kernel, tables.distances) @ (np.exp(z) * tables.widths)
