"""
Error estimators over replicated fits: bias, MSE, interval coverage and IMAE.

A replication contributes one error per item of an estimand (one for scalar
parameters, one per household for theta). Replication-level values are
averaged over items, and study-level values are averaged over replications
with standard errors taken across replications.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from src.diagnostics.summary import posterior_quantiles
from src.geometry.partition import PartitionedNetwork
from src.simstudy.landscape import Intensity
from src.simstudy.scenario import TruthRecord
from src.utils.exceptions import EstimatorError

COVERAGE_LEVELS = (0.8, 0.5)
ESTIMATE_COLUMNS = [
    "scenario", "estimand", "bias", "mse", "coverage", "se_bias", "se_mse", "se_coverage",
    "coverage50", "se_coverage50", "degenerate", "n_replications",
]


def interval_covers(samples: np.ndarray, truth: np.ndarray, level: float) -> np.ndarray:
    """1 where truth lies strictly inside the central interval, NaN for degenerate intervals.

    samples has one column per item.
    """
    samples = np.asarray(samples, dtype=float)
    if samples.ndim == 1:
        samples = samples[:, None]
    truth = np.asarray(truth, dtype=float).reshape(samples.shape[1])
    tail = (1.0 - level) / 2.0
    bounds = np.stack(
        [posterior_quantiles(samples[:, k], [tail, 1.0 - tail]) for k in range(samples.shape[1])],
        axis=1,
    )
    lower, upper = bounds
    covered = ((truth > lower) & (truth < upper)).astype(float)
    covered[lower == upper] = np.nan
    return covered


@dataclass
class ReplicationErrors:
    """Per-item errors and coverage indicators of one replication."""

    replication: int
    errors: Dict[str, np.ndarray] = field(default_factory=dict)
    coverage: Dict[float, Dict[str, np.ndarray]] = field(default_factory=dict)
    imae: Dict[str, float] = field(default_factory=dict)


def cell_imae(
    draws: pd.DataFrame, partition: PartitionedNetwork, intensities: Dict[str, Intensity]
) -> Dict[str, float]:
    """Sum over a segment's cells of width * |posterior mean exp(z) - true intensity|."""
    result = {}
    for cells in partition:
        columns = [f"z.{cells.segment_id}.{m + 1}" for m in range(cells.n_cells)]
        missing = [c for c in columns if c not in draws.columns]
        if missing:
            raise EstimatorError(f"draws lack field columns for segment '{cells.segment_id}'")
        if cells.segment_id not in intensities:
            raise EstimatorError(f"no true intensity for segment '{cells.segment_id}'")
        fitted = np.exp(draws[columns].to_numpy(float)).mean(axis=0)
        truth = np.array([intensities[cells.segment_id](c) for c in cells.centroid_arc])
        result[cells.segment_id] = float(np.sum(cells.width * np.abs(fitted - truth)))
    return result


def replication_errors(
    draws: pd.DataFrame,
    truth: TruthRecord,
    replication: int = 0,
    partition: Optional[PartitionedNetwork] = None,
    intensities: Optional[Dict[str, Intensity]] = None,
) -> ReplicationErrors:
    """Errors of one fit against its generating truth.

    Raises:
        EstimatorError: If the draws do not carry the truth's parameters or households
    """
    targets: Dict[str, tuple] = {}
    for name, value in truth.parameters().items():
        if name not in draws.columns:
            raise EstimatorError(f"draws lack column '{name}' required by the truth record")
        targets[name] = ([name], np.array([value]))
    theta_columns = [f"theta.{h}" for h in truth.household_ids]
    missing = [c for c in theta_columns if c not in draws.columns]
    if missing:
        raise EstimatorError(
            f"draws and truth disagree on households (e.g. {missing[0]} is missing)"
        )
    targets["theta"] = (theta_columns, truth.exposures)

    result = ReplicationErrors(replication)
    for level in COVERAGE_LEVELS:
        result.coverage[level] = {}
    for estimand, (columns, values) in targets.items():
        samples = draws[columns].to_numpy(float)
        result.errors[estimand] = samples.mean(axis=0) - values
        for level in COVERAGE_LEVELS:
            result.coverage[level][estimand] = interval_covers(samples, values, level)
    if partition is not None:
        result.imae = cell_imae(draws, partition, intensities or truth.intensities())
    return result


def _mean_se(values: Sequence[float]):
    values = np.asarray([v for v in values if not math.isnan(v)], dtype=float)
    if values.size == 0:
        return None, None
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else None
    return mean, se


def _nanmean_or_nan(x: np.ndarray) -> float:
    return float(np.nanmean(x)) if np.any(~np.isnan(x)) else math.nan


def estimate(replications: List[ReplicationErrors], scenario: str) -> pd.DataFrame:
    """One row per estimand with bias, MSE, coverage and their standard errors."""
    if not replications:
        raise EstimatorError(f"scenario {scenario} has no completed replications")
    estimands = list(replications[0].errors)
    rows = []
    for estimand in estimands:
        if any(estimand not in r.errors for r in replications):
            raise EstimatorError(f"estimand '{estimand}' is missing from some replications")
        bias_s = [float(np.mean(r.errors[estimand])) for r in replications]
        sq_s = [float(np.mean(r.errors[estimand] ** 2)) for r in replications]
        cov80 = [_nanmean_or_nan(r.coverage[0.8][estimand]) for r in replications]
        cov50 = [_nanmean_or_nan(r.coverage[0.5][estimand]) for r in replications]
        bias, se_bias = _mean_se(bias_s)
        mse, se_mse = _mean_se(sq_s)
        coverage, se_coverage = _mean_se(cov80)
        coverage50, se_coverage50 = _mean_se(cov50)
        rows.append({
            "scenario": scenario,
            "estimand": estimand,
            "bias": bias,
            "mse": mse,
            "coverage": coverage,
            "se_bias": se_bias,
            "se_mse": se_mse,
            "se_coverage": se_coverage,
            "coverage50": coverage50,
            "se_coverage50": se_coverage50,
            "degenerate": coverage is None,
            "n_replications": len(replications),
        })
    return pd.DataFrame(rows, columns=ESTIMATE_COLUMNS)


def estimate_imae(replications: List[ReplicationErrors], scenario: str) -> pd.DataFrame:
    """Per-segment IMAE averaged over replications."""
    segments = list(replications[0].imae) if replications else []
    rows = []
    for segment in segments:
        imae, se = _mean_se([r.imae[segment] for r in replications])
        rows.append({"scenario": scenario, "segment": segment, "imae": imae, "se_imae": se})
    return pd.DataFrame(rows, columns=["scenario", "segment", "imae", "se_imae"])
