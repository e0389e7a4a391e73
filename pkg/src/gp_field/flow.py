"""Flow ordering of sources and junctions for the constrained field prior."""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.geometry.network import (
    ANCHOR_TOLERANCE_KM,
    CanalNetwork,
    NetworkPoint,
    network_distances_from,
)
from src.utils.exceptions import ConfigurationError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

SOURCE = "source"
JUNCTION = "junction"


@dataclass(frozen=True)
class Anchor:
    """A source or junction carrying one scalar field value."""

    anchor_id: str
    kind: str
    points: Tuple[NetworkPoint, ...]
    flow_distance: float


@dataclass(frozen=True)
class Upstream:
    """An upstream anchor of a junction and its along-canal distance."""

    anchor_id: str
    distance: float


class FlowGraph:
    """Anchors of a network in flow order.

    Declared intersections sharing a point merge into one junction. A
    junction's upstream anchors are the nearest anchors on each incident
    segment that lie closer to a source. Each segment is conditioned on its
    most downstream anchor, or on nothing when it carries none.
    """

    def __init__(self, network: CanalNetwork):
        self.network = network
        junction_points, self.intersection_junctions = self._merge_intersections(network)

        if junction_points and not network.sources:
            raise ConfigurationError(
                "network declares intersections but no sources; "
                "the constrained field needs source annotations"
            )

        anchors: List[Tuple[str, str, Tuple[NetworkPoint, ...]]] = []
        seen_sources: Dict[str, int] = {}
        for point in network.sources:
            count = seen_sources.get(point.segment_id, 0) + 1
            seen_sources[point.segment_id] = count
            source_id = point.segment_id if count == 1 else f"{point.segment_id}#{count}"
            for points in junction_points.values():
                if any(_same_point(point, q) for q in points):
                    raise ConfigurationError(
                        f"source {point.segment_id}@{point.arc} coincides with a junction"
                    )
            anchors.append((source_id, SOURCE, (point,)))
        for junction_id, points in junction_points.items():
            anchors.append((junction_id, JUNCTION, points))

        flow = self._flow_distances(network, anchors)
        self.anchors: Dict[str, Anchor] = {
            anchor_id: Anchor(anchor_id, kind, points, flow[anchor_id])
            for anchor_id, kind, points in anchors
        }
        self.parents: Dict[str, Tuple[Upstream, ...]] = {
            anchor_id: self._upstream(anchor) if anchor.kind == JUNCTION else ()
            for anchor_id, anchor in self.anchors.items()
        }
        self.order: Tuple[str, ...] = self._topological_order()
        self.children: Dict[str, List[Tuple[str, int]]] = {a: [] for a in self.order}
        for anchor_id in self.order:
            for i, parent in enumerate(self.parents[anchor_id]):
                self.children[parent.anchor_id].append((anchor_id, i))

        rank = {anchor_id: i for i, anchor_id in enumerate(self.order)}
        self.segment_anchor: Dict[str, Optional[Tuple[str, float]]] = {}
        for segment_id in network.segment_ids:
            on_segment = [
                (rank[a.anchor_id], a.anchor_id, p.arc)
                for a in self.anchors.values()
                for p in a.points
                if p.segment_id == segment_id
            ]
            if on_segment:
                _, anchor_id, arc = max(on_segment)
                self.segment_anchor[segment_id] = (anchor_id, arc)
            else:
                self.segment_anchor[segment_id] = None

        logger.debug(
            f"Flow order: {list(self.order)}; segment anchors: {self.segment_anchor}"
        )

    @property
    def source_ids(self) -> List[str]:
        return [a for a in self.order if self.anchors[a].kind == SOURCE]

    @property
    def junction_ids(self) -> List[str]:
        return [a for a in self.order if self.anchors[a].kind == JUNCTION]

    def anchor_at(self, point: NetworkPoint) -> Optional[str]:
        """Id of the anchor located at a network point, if any."""
        for anchor in self.anchors.values():
            if any(_same_point(point, q) for q in anchor.points):
                return anchor.anchor_id
        return None

    @staticmethod
    def _merge_intersections(network: CanalNetwork):
        points: List[NetworkPoint] = []
        for crossing in network.intersections:
            points.append(NetworkPoint(crossing.segment_a, crossing.arc_a))
            points.append(NetworkPoint(crossing.segment_b, crossing.arc_b))

        parent = list(range(len(points)))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        def union(i: int, j: int) -> None:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[max(ri, rj)] = min(ri, rj)

        for k in range(0, len(points), 2):
            union(k, k + 1)
        for i in range(len(points)):
            for j in range(i + 1, len(points)):
                if _same_point(points[i], points[j]):
                    union(i, j)

        groups: Dict[int, List[NetworkPoint]] = {}
        for i, point in enumerate(points):
            members = groups.setdefault(find(i), [])
            if not any(_same_point(point, q) for q in members):
                members.append(point)

        junctions: Dict[str, Tuple[NetworkPoint, ...]] = {}
        root_to_id: Dict[int, str] = {}
        for root in sorted(groups):
            members = tuple(sorted(groups[root]))
            base = "+".join(sorted({p.segment_id for p in members}))
            junction_id, k = base, 1
            while junction_id in junctions:
                k += 1
                junction_id = f"{base}#{k}"
            junctions[junction_id] = members
            root_to_id[root] = junction_id

        per_intersection = tuple(root_to_id[find(2 * k)] for k in range(len(network.intersections)))
        return junctions, per_intersection

    @staticmethod
    def _flow_distances(network: CanalNetwork, anchors) -> Dict[str, float]:
        if not network.sources:
            return {anchor_id: 0.0 for anchor_id, _, _ in anchors}
        targets = [points[0] for _, _, points in anchors]
        distances = network_distances_from(network, list(network.sources), targets)
        nearest = np.min(distances, axis=0)
        flow: Dict[str, float] = {}
        for (anchor_id, kind, _), value in zip(anchors, nearest):
            if not math.isfinite(value):
                raise ConfigurationError(f"junction '{anchor_id}' is not reachable from any source")
            flow[anchor_id] = 0.0 if kind == SOURCE else float(value)
        return flow

    def _upstream(self, junction: Anchor) -> Tuple[Upstream, ...]:
        best: Dict[str, float] = {}
        for point in junction.points:
            left: Optional[Tuple[float, str]] = None
            right: Optional[Tuple[float, str]] = None
            for other in self.anchors.values():
                if other.anchor_id == junction.anchor_id:
                    continue
                for q in other.points:
                    if q.segment_id != point.segment_id:
                        continue
                    gap = q.arc - point.arc
                    if gap < -ANCHOR_TOLERANCE_KM and (left is None or -gap < left[0]):
                        left = (-gap, other.anchor_id)
                    elif gap > ANCHOR_TOLERANCE_KM and (right is None or gap < right[0]):
                        right = (gap, other.anchor_id)
            for candidate in (left, right):
                if candidate is None:
                    continue
                distance, anchor_id = candidate
                if self.anchors[anchor_id].flow_distance < junction.flow_distance:
                    best[anchor_id] = min(distance, best.get(anchor_id, math.inf))
        if not best:
            raise ConfigurationError(f"junction '{junction.anchor_id}' has no upstream anchor")
        return tuple(Upstream(a, best[a]) for a in sorted(best))

    def _topological_order(self) -> Tuple[str, ...]:
        order = sorted(
            self.anchors,
            key=lambda a: (self.anchors[a].flow_distance, self.anchors[a].kind != SOURCE, a),
        )
        position = {anchor_id: i for i, anchor_id in enumerate(order)}
        for anchor_id in order:
            for parent in self.parents[anchor_id]:
                if position[parent.anchor_id] >= position[anchor_id]:
                    raise ConfigurationError(
                        f"cyclic flow order between '{parent.anchor_id}' and '{anchor_id}'"
                    )
        return tuple(order)


def _same_point(a: NetworkPoint, b: NetworkPoint) -> bool:
    return a.segment_id == b.segment_id and abs(a.arc - b.arc) <= ANCHOR_TOLERANCE_KM
