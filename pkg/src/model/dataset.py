"""Household survey data: locations, covariates, groups and binary outcomes.

Files:
    households.csv    household_id, x_km, y_km, group, x1..xp
    observations.csv  household_id, y
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.utils.exceptions import DatasetError, InputOutputError
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

HOUSEHOLDS_FILE = "households.csv"
OBSERVATIONS_FILE = "observations.csv"


@dataclass(frozen=True, eq=False)
class SurveyDataset:
    """Households and their repeated binary observations."""

    household_ids: Tuple[str, ...]
    locations: np.ndarray
    covariates: np.ndarray
    groups: np.ndarray
    observation_households: np.ndarray
    outcomes: np.ndarray

    def __post_init__(self):
        ids = tuple(str(h) for h in self.household_ids)
        locations = np.asarray(self.locations, dtype=float).reshape(-1, 2)
        n = len(ids)
        covariates = np.asarray(self.covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates.reshape(n, -1) if n else covariates.reshape(0, 0)
        groups = np.asarray(self.groups, dtype=int).reshape(-1)
        obs_house = np.asarray(self.observation_households, dtype=int).reshape(-1)
        outcomes = np.asarray(self.outcomes).reshape(-1)

        if n == 0:
            raise DatasetError("dataset has no households")
        if len(set(ids)) != n:
            raise DatasetError("household ids must be unique")
        if locations.shape[0] != n or covariates.shape[0] != n or groups.shape[0] != n:
            raise DatasetError("household arrays disagree in length")
        if np.any(groups < 0):
            raise DatasetError("group indices must be non-negative")
        if obs_house.shape != outcomes.shape:
            raise DatasetError("observation arrays disagree in length")
        if np.any(obs_house < 0) or np.any(obs_house >= n):
            raise DatasetError("observation references an unknown household")
        if not np.all(np.isin(outcomes, (0, 1))):
            raise DatasetError("outcomes must be 0 or 1")

        for name, value in (
            ("household_ids", ids),
            ("locations", locations),
            ("covariates", covariates),
            ("groups", groups),
            ("observation_households", obs_house),
            ("outcomes", outcomes.astype(int)),
        ):
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
            object.__setattr__(self, name, value)

    @property
    def n_households(self) -> int:
        return len(self.household_ids)

    @property
    def n_observations(self) -> int:
        return int(self.outcomes.shape[0])

    @property
    def n_covariates(self) -> int:
        return int(self.covariates.shape[1])

    def positives(self) -> np.ndarray:
        """Positive outcome count per household."""
        return np.bincount(
            self.observation_households, weights=self.outcomes, minlength=self.n_households
        )

    def negatives(self) -> np.ndarray:
        """Negative outcome count per household."""
        return np.bincount(
            self.observation_households, weights=1 - self.outcomes, minlength=self.n_households
        )

    def subset_observations(self, order: Sequence[int]) -> "SurveyDataset":
        """Same households with observations reordered or subset."""
        order = np.asarray(order, dtype=int)
        return SurveyDataset(
            self.household_ids,
            self.locations,
            self.covariates,
            self.groups,
            self.observation_households[order],
            self.outcomes[order],
        )


def load_dataset(directory: Union[str, Path]) -> SurveyDataset:
    """Read households.csv and observations.csv from a directory."""
    directory = Path(directory)
    house_path = directory / HOUSEHOLDS_FILE
    obs_path = directory / OBSERVATIONS_FILE
    for path in (house_path, obs_path):
        if not path.exists():
            raise InputOutputError(f"missing dataset file {path}")
    try:
        households = pd.read_csv(house_path, dtype={"household_id": str})
        observations = pd.read_csv(obs_path, dtype={"household_id": str})
    except (OSError, pd.errors.ParserError) as e:
        raise InputOutputError(f"cannot read dataset in {directory}: {e}") from e

    for column in ("household_id", "x_km", "y_km", "group"):
        if column not in households.columns:
            raise DatasetError(f"{HOUSEHOLDS_FILE} lacks column '{column}'")
    for column in ("household_id", "y"):
        if column not in observations.columns:
            raise DatasetError(f"{OBSERVATIONS_FILE} lacks column '{column}'")

    covariate_columns = _covariate_columns(households.columns)
    ids = households["household_id"].tolist()
    position = {h: i for i, h in enumerate(ids)}
    unknown = set(observations["household_id"]) - set(position)
    if unknown:
        raise DatasetError(f"observations reference unknown households {sorted(unknown)[:5]}")

    dataset = SurveyDataset(
        household_ids=tuple(ids),
        locations=households[["x_km", "y_km"]].to_numpy(float),
        covariates=households[covariate_columns].to_numpy(float).reshape(len(ids), len(covariate_columns)),
        groups=households["group"].to_numpy(int),
        observation_households=observations["household_id"].map(position).to_numpy(int),
        outcomes=observations["y"].to_numpy(),
    )
    logger.info(
        f"Loaded dataset: {dataset.n_households} households, "
        f"{dataset.n_observations} observations, {dataset.n_covariates} covariates"
    )
    return dataset


def save_dataset(dataset: SurveyDataset, directory: Union[str, Path]) -> None:
    """Write a dataset as households.csv and observations.csv."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    households = pd.DataFrame({
        "household_id": list(dataset.household_ids),
        "x_km": dataset.locations[:, 0],
        "y_km": dataset.locations[:, 1],
        "group": dataset.groups,
    })
    for i in range(dataset.n_covariates):
        households[f"x{i + 1}"] = dataset.covariates[:, i]
    households.to_csv(directory / HOUSEHOLDS_FILE, index=False, float_format="%.17g")
    pd.DataFrame({
        "household_id": [dataset.household_ids[h] for h in dataset.observation_households],
        "y": dataset.outcomes,
    }).to_csv(directory / OBSERVATIONS_FILE, index=False)


def _covariate_columns(columns) -> list:
    found = []
    for column in columns:
        name = str(column)
        if name.startswith("x") and name[1:].isdigit():
            found.append((int(name[1:]), name))
    return [name for _, name in sorted(found)]
