"""Posterior functionals computed from draws."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from src.exposure.kernels import DistanceKernel, kernel_eval
from src.geometry.network import CanalNetwork, min_distance_to_network
from src.geometry.partition import PartitionedNetwork
from src.model.dataset import SurveyDataset
from src.utils.exceptions import DatasetError, DimensionMismatchError

LOWER_QUANTILE = 0.1
UPPER_QUANTILE = 0.9


@dataclass(frozen=True)
class OddsChangeSummary:
    """Mean and central 80% interval of a change in odds."""

    mean: float
    lower: float
    upper: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "q10": self.lower, "q90": self.upper}


def _cell_columns(partition: PartitionedNetwork):
    return [f"z.{sid}.{m}" for sid, m in partition.cell_labels()]


def exposure_at(
    draws: pd.DataFrame, partition: PartitionedNetwork, kernel_kind: str, location
) -> np.ndarray:
    """Per-draw discretized exposure at an arbitrary location."""
    columns = _cell_columns(partition)
    missing = [c for c in columns if c not in draws.columns]
    if missing or "rho" not in draws.columns:
        raise DimensionMismatchError(
            f"draws do not match the partition (missing {(missing or ['rho'])[:3]})"
        )
    location = np.asarray(location, dtype=float)
    distances = np.hypot(*(partition.centroid_xy - location).T)
    z = draws[columns].to_numpy(float)
    rho = draws["rho"].to_numpy(float)
    weights = np.stack(
        [kernel_eval(DistanceKernel(kernel_kind, r), distances) for r in rho]
    )
    return np.sum(weights * np.exp(z) * partition.widths, axis=1)


def _baseline_column(draws: pd.DataFrame, group: Optional[int]) -> np.ndarray:
    if "lambda_b" in draws.columns:
        return draws["lambda_b"].to_numpy(float)
    column = f"beta_local.{(group or 0) + 1}"
    if column not in draws.columns:
        raise DimensionMismatchError(f"draws carry neither lambda_b nor {column}")
    return np.exp(draws[column].to_numpy(float))


def change_in_odds(
    draws: pd.DataFrame,
    partition: PartitionedNetwork,
    kernel_kind: str,
    origin,
    target,
    group: Optional[int] = None,
) -> np.ndarray:
    """Per-draw relative change in infection odds moving from origin to target.

    (exp(-(lambda + theta_target)) - 1) / (exp(-(lambda + theta_origin)) - 1) - 1
    """
    baseline = _baseline_column(draws, group)
    theta_origin = exposure_at(draws, partition, kernel_kind, origin)
    theta_target = exposure_at(draws, partition, kernel_kind, target)
    return np.expm1(-(baseline + theta_target)) / np.expm1(-(baseline + theta_origin)) - 1.0


def summarize_odds_change(values: np.ndarray) -> OddsChangeSummary:
    values = np.asarray(values, dtype=float)
    return OddsChangeSummary(
        mean=float(values.mean()),
        lower=float(np.quantile(values, LOWER_QUANTILE)),
        upper=float(np.quantile(values, UPPER_QUANTILE)),
    )


def odds_change_curve(
    draws: pd.DataFrame,
    partition: PartitionedNetwork,
    kernel_kind: str,
    origin,
    direction,
    reference_km: float,
    max_km: float,
    n_points: int,
    group: Optional[int] = None,
) -> pd.DataFrame:
    """Change in odds along a ray, relative to the point reference_km from origin."""
    direction = np.asarray(direction, dtype=float)
    norm = float(np.hypot(*direction))
    if norm == 0.0:
        raise ValueError("direction must be non-zero")
    if not 0.0 <= reference_km < max_km:
        raise ValueError("reference_km must lie in [0, max_km)")
    unit = direction / norm
    origin = np.asarray(origin, dtype=float)
    reference = origin + reference_km * unit
    rows = []
    for distance in np.linspace(reference_km, max_km, n_points):
        summary = summarize_odds_change(
            change_in_odds(draws, partition, kernel_kind, reference, origin + distance * unit, group)
        )
        rows.append({"distance_km": float(distance), **summary.to_dict()})
    return pd.DataFrame(rows)


def min_distance_predictor(network: CanalNetwork, dataset: SurveyDataset) -> np.ndarray:
    """log of each household's minimum distance to the network.

    Raises:
        DatasetError: If a household lies on the network
    """
    distances = np.array(
        [min_distance_to_network(network, location) for location in dataset.locations]
    )
    on_network = np.flatnonzero(distances <= 0.0)
    if on_network.size:
        ids = [dataset.household_ids[i] for i in on_network[:5]]
        raise DatasetError(
            f"households {ids} lie on the canal; apply a distance floor before "
            "using the log minimum-distance predictor"
        )
    return np.log(distances)
