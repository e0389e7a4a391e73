"""Canal network geometry.

Segments are planar polylines parameterized by arc length in kilometres.
Intersections are declared, never detected, and join two segments at one
spatial point.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, NamedTuple, Sequence, Tuple

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from src.utils.exceptions import (
    GeometryConsistencyError,
    GeometryDomainError,
)
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

# Coincidence tolerance for intersection anchors (km)
ANCHOR_TOLERANCE_KM = 1e-9

# Slack allowed when an arc position sits a rounding error past a segment end
ARC_SLACK_KM = 1e-12

# Result of network_distance for points in different components
UNREACHABLE = math.inf


class NetworkPoint(NamedTuple):
    """A position on the network: segment id and arc length (km)."""
    segment_id: str
    arc: float


class Intersection(NamedTuple):
    """Declared crossing of two segments."""
    segment_a: str
    arc_a: float
    segment_b: str
    arc_b: float


@dataclass(frozen=True, eq=False)
class CanalSegment:
    """One polyline segment of the canal network."""

    segment_id: str
    vertices: np.ndarray
    cumulative_arclength: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float)
        if vertices.ndim != 2 or vertices.shape[1] != 2:
            raise GeometryConsistencyError(
                f"segment '{self.segment_id}' vertices must be an (n, 2) array"
            )
        if vertices.shape[0] < 2:
            raise GeometryConsistencyError(
                f"segment '{self.segment_id}' needs at least 2 vertices"
            )
        legs = np.hypot(*np.diff(vertices, axis=0).T)
        if np.any(legs <= 0.0):
            raise GeometryConsistencyError(
                f"segment '{self.segment_id}' has repeated consecutive vertices"
            )
        vertices.setflags(write=False)
        arclength = np.concatenate([[0.0], np.cumsum(legs)])
        arclength.setflags(write=False)
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "cumulative_arclength", arclength)

    @property
    def length(self) -> float:
        return float(self.cumulative_arclength[-1])

    def _check_arc(self, arc: np.ndarray) -> np.ndarray:
        if np.any(arc < -ARC_SLACK_KM) or np.any(arc > self.length + ARC_SLACK_KM):
            bad = arc[(arc < -ARC_SLACK_KM) | (arc > self.length + ARC_SLACK_KM)]
            raise GeometryDomainError(
                f"arc {float(bad.flat[0]):.12g} km outside segment "
                f"'{self.segment_id}' of length {self.length:.12g} km"
            )
        return np.clip(arc, 0.0, self.length)

    def points_at(self, arcs) -> np.ndarray:
        """Planar coordinates for an array of arc positions."""
        arcs = self._check_arc(np.asarray(arcs, dtype=float))
        flat = arcs.ravel()
        leg = np.searchsorted(self.cumulative_arclength, flat, side="right") - 1
        leg = np.clip(leg, 0, len(self.cumulative_arclength) - 2)
        start = self.cumulative_arclength[leg]
        span = self.cumulative_arclength[leg + 1] - start
        t = ((flat - start) / span)[:, None]
        points = (1.0 - t) * self.vertices[leg] + t * self.vertices[leg + 1]
        return points.reshape(arcs.shape + (2,))

    def project(self, point) -> Tuple[float, float]:
        """Nearest point on the polyline as (distance km, arc km)."""
        p = np.asarray(point, dtype=float)
        a = self.vertices[:-1]
        b = self.vertices[1:]
        ab = b - a
        t = np.clip(np.einsum("ij,ij->i", p - a, ab) / np.einsum("ij,ij->i", ab, ab), 0.0, 1.0)
        feet = a + t[:, None] * ab
        dists = np.hypot(*(feet - p).T)
        best = int(np.argmin(dists))
        arc = self.cumulative_arclength[best] + t[best] * (
            self.cumulative_arclength[best + 1] - self.cumulative_arclength[best]
        )
        return float(dists[best]), float(arc)

    def tangent_at(self, arcs) -> np.ndarray:
        """Unit direction of the leg carrying each arc position."""
        arcs = self._check_arc(np.asarray(arcs, dtype=float)).ravel()
        leg = np.searchsorted(self.cumulative_arclength, arcs, side="right") - 1
        leg = np.clip(leg, 0, len(self.cumulative_arclength) - 2)
        ab = self.vertices[leg + 1] - self.vertices[leg]
        return ab / np.hypot(*ab.T)[:, None]


@dataclass(frozen=True, eq=False)
class CanalNetwork:
    """Segments plus declared intersections, sources and sinks."""

    segments: Tuple[CanalSegment, ...]
    intersections: Tuple[Intersection, ...] = ()
    sources: Tuple[NetworkPoint, ...] = ()
    sinks: Tuple[NetworkPoint, ...] = ()
    _index: Dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        object.__setattr__(
            self, "intersections", tuple(Intersection(*i) for i in self.intersections)
        )
        object.__setattr__(self, "sources", tuple(NetworkPoint(*p) for p in self.sources))
        object.__setattr__(self, "sinks", tuple(NetworkPoint(*p) for p in self.sinks))

        index: Dict[str, int] = {}
        for i, segment in enumerate(self.segments):
            if segment.segment_id in index:
                raise GeometryConsistencyError(
                    f"duplicate segment id '{segment.segment_id}'"
                )
            index[segment.segment_id] = i
        object.__setattr__(self, "_index", index)

        for point in self.sources + self.sinks:
            self.locate(point)
        for crossing in self.intersections:
            pa = self.locate(NetworkPoint(crossing.segment_a, crossing.arc_a))
            pb = self.locate(NetworkPoint(crossing.segment_b, crossing.arc_b))
            gap = float(np.hypot(*(pa - pb)))
            if gap > ANCHOR_TOLERANCE_KM:
                raise GeometryConsistencyError(
                    f"intersection {crossing.segment_a}@{crossing.arc_a} / "
                    f"{crossing.segment_b}@{crossing.arc_b} anchors are {gap:.3e} km apart"
                )

    @property
    def segment_ids(self) -> List[str]:
        return [s.segment_id for s in self.segments]

    @property
    def total_length(self) -> float:
        return float(sum(s.length for s in self.segments))

    def segment(self, segment_id: str) -> CanalSegment:
        try:
            return self.segments[self._index[segment_id]]
        except KeyError:
            raise GeometryConsistencyError(f"unknown segment '{segment_id}'") from None

    def locate(self, point: NetworkPoint) -> np.ndarray:
        """Planar coordinates of a network point."""
        return point_at(self.segment(point.segment_id), point.arc)


def point_at(segment: CanalSegment, arc: float) -> np.ndarray:
    """Planar point at the given arc length along a segment.

    Raises:
        GeometryDomainError: If arc is outside [0, segment length]
    """
    return segment.points_at(float(arc))


def euclid_distance(point, other) -> float:
    """Euclidean distance between two planar points (km)."""
    delta = np.asarray(point, dtype=float) - np.asarray(other, dtype=float)
    return float(np.hypot(delta[..., 0], delta[..., 1]))


def min_distance_to_network(network: CanalNetwork, point) -> float:
    """Exact minimum distance from a planar point to any segment (km)."""
    return min(segment.project(point)[0] for segment in network.segments)


def network_distance(network: CanalNetwork, a: NetworkPoint, b: NetworkPoint) -> float:
    """Shortest along-canal path length between two network points.

    Paths run along segments and may change segment only at declared
    intersections. Returns UNREACHABLE when no such path exists.
    """
    a, b = NetworkPoint(*a), NetworkPoint(*b)
    network.locate(a)
    network.locate(b)
    graph, stations = _station_graph(network, extra=(a, b))
    distances = dijkstra(graph, directed=False, indices=stations[a])
    result = float(distances[stations[b]])
    return result if np.isfinite(result) else UNREACHABLE


def network_distances_from(
    network: CanalNetwork, origins: Sequence[NetworkPoint], targets: Sequence[NetworkPoint]
) -> np.ndarray:
    """Matrix of network distances, one row per origin."""
    origins = [NetworkPoint(*p) for p in origins]
    targets = [NetworkPoint(*p) for p in targets]
    graph, stations = _station_graph(network, extra=tuple(origins) + tuple(targets))
    rows = dijkstra(graph, directed=False, indices=[stations[p] for p in origins])
    rows = np.atleast_2d(rows)
    return rows[:, [stations[p] for p in targets]]


def _station_graph(network: CanalNetwork, extra: Sequence[NetworkPoint]):
    """Graph whose nodes are arc stations and whose edges follow segments.

    Stations on one segment are chained in arc order. Every intersection adds
    a zero-length transfer edge between its two anchors.
    """
    per_segment: Dict[str, List[float]] = {sid: [] for sid in network.segment_ids}
    for crossing in network.intersections:
        per_segment[crossing.segment_a].append(crossing.arc_a)
        per_segment[crossing.segment_b].append(crossing.arc_b)
    for point in extra:
        per_segment[point.segment_id].append(point.arc)

    stations: Dict[NetworkPoint, int] = {}
    rows: List[int] = []
    cols: List[int] = []
    weights: List[float] = []
    for sid, arcs in per_segment.items():
        ordered = sorted(set(arcs))
        ids = []
        for arc in ordered:
            node = stations.setdefault(NetworkPoint(sid, arc), len(stations))
            ids.append(node)
        for (arc0, n0), (arc1, n1) in zip(zip(ordered, ids), zip(ordered[1:], ids[1:])):
            rows.append(n0)
            cols.append(n1)
            weights.append(arc1 - arc0)

    transfer: List[Tuple[int, int]] = []
    for crossing in network.intersections:
        transfer.append((
            stations[NetworkPoint(crossing.segment_a, crossing.arc_a)],
            stations[NetworkPoint(crossing.segment_b, crossing.arc_b)],
        ))

    # csgraph treats explicit zeros as missing edges, so contract transfers first
    parent = list(range(len(stations)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in transfer:
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)

    roots = sorted({find(i) for i in range(len(stations))})
    compact = {root: k for k, root in enumerate(roots)}
    node_of = {point: compact[find(i)] for point, i in stations.items()}

    # parallel edges between the same pair of nodes keep the shortest length
    edges: Dict[Tuple[int, int], float] = {}
    for r, c, w in zip(rows, cols, weights):
        u, v = compact[find(r)], compact[find(c)]
        if u == v:
            continue
        key = (min(u, v), max(u, v))
        edges[key] = min(w, edges.get(key, math.inf))

    n = len(roots)
    pairs = sorted(edges)
    graph = coo_matrix(
        ([edges[p] for p in pairs], ([p[0] for p in pairs], [p[1] for p in pairs])),
        shape=(n, n),
    ).tocsr()
    return graph, node_of

