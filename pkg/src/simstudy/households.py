"""Household location and covariate sampling for simulated surveys."""

from typing import Tuple

import numpy as np

from src.geometry.network import CanalNetwork
from src.simstudy.landscape import REGION_HEIGHT_KM, REGION_WIDTH_KM
from src.simstudy.scenario import StudyScenario
from src.utils.exceptions import ConfigurationError

Region = Tuple[float, float, float, float]
STUDY_REGION: Region = (0.0, 0.0, REGION_WIDTH_KM, REGION_HEIGHT_KM)
MAX_REJECTION_ROUNDS = 1000


def _inside(points: np.ndarray, region: Region) -> np.ndarray:
    x0, y0, x1, y1 = region
    return (
        (points[:, 0] >= x0) & (points[:, 0] <= x1) & (points[:, 1] >= y0) & (points[:, 1] <= y1)
    )


def uniform_population(n: int, rng: np.random.Generator, region: Region = STUDY_REGION) -> np.ndarray:
    x0, y0, x1, y1 = region
    return np.column_stack([rng.uniform(x0, x1, n), rng.uniform(y0, y1, n)])


def clustered_population(
    n: int,
    network: CanalNetwork,
    lateral_sd: float,
    rng: np.random.Generator,
    region: Region = STUDY_REGION,
) -> np.ndarray:
    """Points near the canal: uniform arc position, normal perpendicular offset.

    Points falling outside the region are redrawn from scratch.
    """
    lengths = np.array([s.length for s in network.segments])
    probs = lengths / lengths.sum()
    out = np.empty((n, 2))
    pending = np.arange(n)
    for _ in range(MAX_REJECTION_ROUNDS):
        if pending.size == 0:
            return out
        k = pending.size
        which = rng.choice(len(network.segments), size=k, p=probs)
        arcs = rng.uniform(0.0, 1.0, size=k) * lengths[which]
        offsets = rng.normal(0.0, lateral_sd, size=k)
        points = np.empty((k, 2))
        for index, segment in enumerate(network.segments):
            rows = np.flatnonzero(which == index)
            if rows.size == 0:
                continue
            base = segment.points_at(arcs[rows])
            tangent = segment.tangent_at(arcs[rows])
            normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
            points[rows] = base + offsets[rows, None] * normal
        ok = _inside(points, region)
        out[pending[ok]] = points[ok]
        pending = pending[~ok]
    raise ConfigurationError("clustered sampling could not place every household inside the region")


def sample_households(
    scenario: StudyScenario,
    network: CanalNetwork,
    rng: np.random.Generator,
    region: Region = STUDY_REGION,
) -> Tuple[np.ndarray, np.ndarray]:
    """Locations (J x 2) and one standard-normal covariate per household.

    A population of ``population_size`` households is simulated first and the
    survey is a simple random sample of J of them.
    """
    if scenario.households > scenario.population_size:
        raise ValueError("households must not exceed population_size")
    if scenario.distribution == "uniform":
        population = uniform_population(scenario.population_size, rng, region)
    else:
        population = clustered_population(
            scenario.population_size, network, scenario.lateral_sd, rng, region
        )
    chosen = rng.choice(scenario.population_size, size=scenario.households, replace=False)
    locations = population[np.sort(chosen)]
    covariates = rng.standard_normal((scenario.households, 1))
    return locations, covariates
