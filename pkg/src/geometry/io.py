"""CSV reading and writing for canal geometry.

Files in a geometry directory:
    geometry.csv       segment_id, vertex_index, x_km, y_km
    intersections.csv  segment_a, arc_a_km, segment_b, arc_b_km
    endpoints.csv      segment_id, arc_km, kind   (optional; kind is source or sink)
"""

from pathlib import Path
from typing import Union

import pandas as pd

from src.geometry.network import CanalNetwork, CanalSegment, Intersection, NetworkPoint
from src.utils.exceptions import GeometryConsistencyError, InputOutputError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

GEOMETRY_FILE = "geometry.csv"
INTERSECTIONS_FILE = "intersections.csv"
ENDPOINTS_FILE = "endpoints.csv"

GEOMETRY_COLUMNS = ["segment_id", "vertex_index", "x_km", "y_km"]
INTERSECTION_COLUMNS = ["segment_a", "arc_a_km", "segment_b", "arc_b_km"]
ENDPOINT_COLUMNS = ["segment_id", "arc_km", "kind"]
ENDPOINT_KINDS = ("source", "sink")


def _read_csv(path: Path, columns) -> pd.DataFrame:
    if not path.exists():
        raise InputOutputError(f"missing geometry file {path}")
    try:
        frame = pd.read_csv(path, dtype={"segment_id": str, "segment_a": str, "segment_b": str})
    except (OSError, pd.errors.ParserError) as e:
        raise InputOutputError(f"cannot read {path}: {e}") from e
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise GeometryConsistencyError(f"{path.name} lacks columns {missing}")
    return frame


def load_network(directory: Union[str, Path]) -> CanalNetwork:
    """Read a CanalNetwork from a geometry directory."""
    directory = Path(directory)
    vertices = _read_csv(directory / GEOMETRY_FILE, GEOMETRY_COLUMNS)

    segments = []
    # keep first-appearance order of segments
    for segment_id in pd.unique(vertices["segment_id"]):
        rows = vertices[vertices["segment_id"] == segment_id].sort_values("vertex_index")
        segments.append(CanalSegment(str(segment_id), rows[["x_km", "y_km"]].to_numpy(float)))

    intersections = []
    if (directory / INTERSECTIONS_FILE).exists():
        frame = _read_csv(directory / INTERSECTIONS_FILE, INTERSECTION_COLUMNS)
        intersections = [
            Intersection(str(r.segment_a), float(r.arc_a_km), str(r.segment_b), float(r.arc_b_km))
            for r in frame.itertuples(index=False)
        ]

    sources, sinks = [], []
    if (directory / ENDPOINTS_FILE).exists():
        frame = _read_csv(directory / ENDPOINTS_FILE, ENDPOINT_COLUMNS)
        for r in frame.itertuples(index=False):
            kind = str(r.kind).strip().lower()
            if kind not in ENDPOINT_KINDS:
                raise GeometryConsistencyError(
                    f"endpoint kind must be one of {ENDPOINT_KINDS}, got '{r.kind}'"
                )
            point = NetworkPoint(str(r.segment_id), float(r.arc_km))
            (sources if kind == "source" else sinks).append(point)

    network = CanalNetwork(tuple(segments), tuple(intersections), tuple(sources), tuple(sinks))
    logger.info(
        f"Loaded network from {directory}: {len(segments)} segments, "
        f"{len(intersections)} intersections, {len(sources)} sources"
    )
    return network


def save_network(network: CanalNetwork, directory: Union[str, Path]) -> None:
    """Write a CanalNetwork as a geometry directory."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    rows = [
        (segment.segment_id, i, float(x), float(y))
        for segment in network.segments
        for i, (x, y) in enumerate(segment.vertices)
    ]
    pd.DataFrame(rows, columns=GEOMETRY_COLUMNS).to_csv(
        directory / GEOMETRY_FILE, index=False, float_format="%.17g"
    )
    pd.DataFrame(
        [tuple(i) for i in network.intersections], columns=INTERSECTION_COLUMNS
    ).to_csv(directory / INTERSECTIONS_FILE, index=False, float_format="%.17g")
    endpoints = [(p.segment_id, p.arc, "source") for p in network.sources]
    endpoints += [(p.segment_id, p.arc, "sink") for p in network.sinks]
    pd.DataFrame(endpoints, columns=ENDPOINT_COLUMNS).to_csv(
        directory / ENDPOINTS_FILE, index=False, float_format="%.17g"
    )
