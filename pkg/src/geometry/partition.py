"""Equi-width cell partitions of a canal network."""

from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Tuple, Union

import numpy as np

from src.geometry.network import CanalNetwork, CanalSegment
from src.utils.exceptions import ConfigurationError, DimensionMismatchError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class SegmentPartition:
    """Cells of one segment, in arc order."""

    segment_id: str
    lower: np.ndarray
    upper: np.ndarray
    centroid_arc: np.ndarray
    width: np.ndarray
    centroid_xy: np.ndarray

    @property
    def n_cells(self) -> int:
        return int(self.width.shape[0])

    @classmethod
    def equi_width(cls, segment: CanalSegment, n_cells: int) -> "SegmentPartition":
        if n_cells < 1:
            raise ConfigurationError(
                f"cell count for segment '{segment.segment_id}' must be at least 1"
            )
        edges = segment.length * np.arange(n_cells + 1) / n_cells
        edges[-1] = segment.length
        lower = edges[:-1].copy()
        upper = edges[1:].copy()
        centroid = 0.5 * (lower + upper)
        arrays = (lower, upper, centroid, upper - lower, segment.points_at(centroid))
        for array in arrays:
            array.setflags(write=False)
        return cls(segment.segment_id, *arrays)


class PartitionedNetwork:
    """A network together with one SegmentPartition per segment.

    Cells are flattened in network segment order; ``offsets`` gives the start
    of each segment's block in the flat layout.
    """

    def __init__(self, network: CanalNetwork, cells: Mapping[str, SegmentPartition]):
        missing = [sid for sid in network.segment_ids if sid not in cells]
        if missing:
            raise ConfigurationError(f"no partition for segments {missing}")
        self.network = network
        self.segments: Tuple[SegmentPartition, ...] = tuple(
            cells[sid] for sid in network.segment_ids
        )
        counts = [p.n_cells for p in self.segments]
        self.offsets: Dict[str, int] = {}
        start = 0
        for sid, count in zip(network.segment_ids, counts):
            self.offsets[sid] = start
            start += count
        self.n_cells = start

        self.widths = np.concatenate([p.width for p in self.segments])
        self.centroid_xy = np.concatenate([p.centroid_xy for p in self.segments])
        for array in (self.widths, self.centroid_xy):
            array.setflags(write=False)

    def __iter__(self) -> Iterator[SegmentPartition]:
        return iter(self.segments)

    def cells_for(self, segment_id: str) -> SegmentPartition:
        return self.segments[self.network.segment_ids.index(segment_id)]

    def cell_counts(self) -> Dict[str, int]:
        return {p.segment_id: p.n_cells for p in self.segments}

    def block(self, segment_id: str) -> slice:
        start = self.offsets[segment_id]
        return slice(start, start + self.cells_for(segment_id).n_cells)

    def split(self, flat: np.ndarray) -> Dict[str, np.ndarray]:
        """Per-segment views of a flat cell vector."""
        flat = np.asarray(flat)
        if flat.shape[-1] != self.n_cells:
            raise DimensionMismatchError(
                f"expected {self.n_cells} cell values, got {flat.shape[-1]}"
            )
        return {p.segment_id: flat[..., self.block(p.segment_id)] for p in self.segments}

    def join(self, per_segment: Mapping[str, np.ndarray]) -> np.ndarray:
        """Flatten per-segment cell vectors in network order."""
        parts: List[np.ndarray] = []
        for p in self.segments:
            values = np.asarray(per_segment[p.segment_id], dtype=float)
            if values.shape[-1] != p.n_cells:
                raise DimensionMismatchError(
                    f"segment '{p.segment_id}' expects {p.n_cells} values, "
                    f"got {values.shape[-1]}"
                )
            parts.append(values)
        return np.concatenate(parts, axis=-1)

    def cell_labels(self) -> List[Tuple[str, int]]:
        """(segment id, 1-based cell index) for every flat cell."""
        return [(p.segment_id, m + 1) for p in self.segments for m in range(p.n_cells)]


def build_partition(
    network: CanalNetwork, m_per_segment: Union[int, Mapping[str, int]]
) -> PartitionedNetwork:
    """Split every segment into equal-width cells.

    Args:
        network: Canal network to partition
        m_per_segment: Cell count for every segment, or a per-segment mapping

    Returns:
        PartitionedNetwork covering each segment exactly
    """
    if isinstance(m_per_segment, int):
        counts = {sid: m_per_segment for sid in network.segment_ids}
    else:
        counts = dict(m_per_segment)
    unknown = sorted(set(counts) - set(network.segment_ids))
    if unknown:
        raise ConfigurationError(f"cell counts given for unknown segments {unknown}")

    cells = {
        segment.segment_id: SegmentPartition.equi_width(segment, int(counts[segment.segment_id]))
        for segment in network.segments
        if segment.segment_id in counts
    }
    partition = PartitionedNetwork(network, cells)
    logger.debug(f"Built partition with {partition.n_cells} cells: {partition.cell_counts()}")
    return partition
