"""The simulation study's canal geometry and true intensities.

The region is 10 km by 4 km. x1 runs along the bottom edge, y runs up the
middle from (5, 0) to (5, 4), and x2 crosses y at height 8/3 km. Water enters
at the left ends of x1 and x2 and at the top of y, and leaves at the right
ends of x1 and x2.
"""

from typing import Callable, Dict

import numpy as np

from src.geometry.network import CanalNetwork, CanalSegment, Intersection, NetworkPoint

REGION_WIDTH_KM = 10.0
REGION_HEIGHT_KM = 4.0
CROSSING_HEIGHT_KM = 8.0 / 3.0

Intensity = Callable[[float], float]


def study_geometry(split_y: bool = False) -> CanalNetwork:
    """Three-canal study network.

    Args:
        split_y: Split y at the x2 crossing into y_lower and y_upper so each
            part can carry its own cell count

    Returns:
        CanalNetwork with declared intersections, sources and sinks
    """
    x1 = CanalSegment("x1", np.array([[0.0, 0.0], [REGION_WIDTH_KM, 0.0]]))
    x2 = CanalSegment(
        "x2", np.array([[0.0, CROSSING_HEIGHT_KM], [REGION_WIDTH_KM, CROSSING_HEIGHT_KM]])
    )
    mid = REGION_WIDTH_KM / 2.0

    if not split_y:
        y = CanalSegment("y", np.array([[mid, 0.0], [mid, REGION_HEIGHT_KM]]))
        return CanalNetwork(
            segments=(x1, x2, y),
            intersections=(
                Intersection("x1", mid, "y", 0.0),
                Intersection("x2", mid, "y", CROSSING_HEIGHT_KM),
            ),
            sources=(NetworkPoint("x1", 0.0), NetworkPoint("x2", 0.0), NetworkPoint("y", y.length)),
            sinks=(NetworkPoint("x1", x1.length), NetworkPoint("x2", x2.length)),
        )

    y_lower = CanalSegment("y_lower", np.array([[mid, 0.0], [mid, CROSSING_HEIGHT_KM]]))
    y_upper = CanalSegment(
        "y_upper", np.array([[mid, CROSSING_HEIGHT_KM], [mid, REGION_HEIGHT_KM]])
    )
    return CanalNetwork(
        segments=(x1, x2, y_lower, y_upper),
        intersections=(
            Intersection("x1", mid, "y_lower", 0.0),
            Intersection("x2", mid, "y_lower", y_lower.length),
            Intersection("y_lower", y_lower.length, "y_upper", 0.0),
        ),
        sources=(
            NetworkPoint("x1", 0.0),
            NetworkPoint("x2", 0.0),
            NetworkPoint("y_upper", y_upper.length),
        ),
        sinks=(NetworkPoint("x1", x1.length), NetworkPoint("x2", x2.length)),
    )


def lambda_x1(c: float) -> float:
    return 0.15 + c * c / 100.0


def lambda_y(c: float) -> float:
    return lambda_x1(5.0) + c * c / 16.0


def lambda_x2(c: float) -> float:
    return lambda_y(CROSSING_HEIGHT_KM) - 0.25 + c * c / 100.0


def true_intensities(split_y: bool = False) -> Dict[str, Intensity]:
    """True intensity per segment as a function of arc length (km)."""
    if not split_y:
        return {"x1": lambda_x1, "x2": lambda_x2, "y": lambda_y}
    return {
        "x1": lambda_x1,
        "x2": lambda_x2,
        "y_lower": lambda_y,
        "y_upper": lambda c: lambda_y(c + CROSSING_HEIGHT_KM),
    }


def study_cell_counts(m: int) -> Dict[str, int]:
    """Cell counts of the study grid at resolution M on the split network."""
    if m < 2 or m % 2:
        raise ValueError("grid resolution must be an even integer of at least 2")
    return {"x1": m, "x2": m, "y_lower": m // 2, "y_upper": m // 2}
