"""
Geometry module for hazardfield.

Canal segments as arc-length parameterized polylines, declared intersections,
cell partitions, and Euclidean / along-network distances.
"""

from .network import (
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
from .partition import PartitionedNetwork, SegmentPartition, build_partition
from .io import load_network, save_network

__all__ = [
    # Network types
    'CanalNetwork',
    'CanalSegment',
    'Intersection',
    'NetworkPoint',
    'UNREACHABLE',

    # Distances
    'point_at',
    'euclid_distance',
    'min_distance_to_network',
    'network_distance',
    'network_distances_from',

    # Partitions
    'PartitionedNetwork',
    'SegmentPartition',
    'build_partition',

    # File IO
    'load_network',
    'save_network',
]
