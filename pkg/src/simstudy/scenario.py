"""
Simulation scenarios, study grids and truth records.
"""

import itertools
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Literal, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, Field, field_validator

from src.simstudy.landscape import Intensity, true_intensities
from src.utils.exceptions import InputOutputError

TRUTH_FILE = "truth.csv"
TRUTH_PARAMETERS_FILE = "truth_parameters.csv"


def derive_seed(*entropy: int) -> int:
    """Independent 63-bit seed from a tuple of integers."""
    return int(np.random.SeedSequence(list(entropy)).generate_state(1, dtype=np.uint64)[0]) >> 1


class StudyScenario(BaseModel):
    """One cell of the simulation grid."""

    households: int = Field(
        default=100,
        description="Households per dataset (J)"
    )

    observations: int = Field(
        default=10,
        description="Observations per household (I)"
    )

    distribution: Literal["uniform", "clustered"] = Field(
        default="clustered",
        description="Household location law"
    )

    cells: int = Field(
        default=40,
        description="Grid resolution M of the fitted model"
    )

    replications: int = Field(
        default=5,
        description="Replicated datasets (S)"
    )

    seed: int = Field(
        default=0,
        description="Study seed; replication r uses streams derived from (seed, r)"
    )

    lateral_sd: float = Field(
        default=0.25,
        description="Perpendicular offset sd (km) of clustered households"
    )

    population_size: int = Field(
        default=200_000,
        description="Simulated household population before sampling"
    )

    # Truth
    true_lambda: float = Field(
        default=0.05,
        description="Background rate used to generate outcomes"
    )

    true_rho: float = Field(
        default=0.1,
        description="Kernel bandwidth (km) used to generate outcomes"
    )

    true_gamma: float = Field(
        default=-0.15,
        description="Covariate coefficient used to generate outcomes"
    )

    kernel: Literal["exponential", "gaussian"] = Field(
        default="exponential",
        description="Distance kernel used to generate outcomes"
    )

    @field_validator('households', 'observations', 'replications', 'cells', 'population_size')
    @classmethod
    def validate_at_least_one(cls, v, info):
        if v < 1:
            raise ValueError(f"{info.field_name} must be at least 1")
        return v

    @field_validator('lateral_sd', 'true_rho')
    @classmethod
    def validate_positive(cls, v, info):
        if not v > 0:
            raise ValueError(f"{info.field_name} must be positive")
        return v

    @field_validator('true_lambda')
    @classmethod
    def validate_lambda(cls, v):
        if v < 0:
            raise ValueError("true_lambda must be non-negative")
        return v

    @field_validator('seed')
    @classmethod
    def validate_seed(cls, v):
        if v < 0:
            raise ValueError("seed must be non-negative")
        return v

    @property
    def label(self) -> str:
        return f"J{self.households}_I{self.observations}_{self.distribution}_M{self.cells}"


class StudyConfig(BaseModel):
    """Grid of scenarios sharing everything but J, I, distribution and M."""

    households: List[int] = Field(
        default_factory=lambda: [100],
        description="Values of J"
    )

    observations: List[int] = Field(
        default_factory=lambda: [10],
        description="Values of I"
    )

    distributions: List[Literal["uniform", "clustered"]] = Field(
        default_factory=lambda: ["clustered"],
        description="Household location laws"
    )

    cells: List[int] = Field(
        default_factory=lambda: [20, 40],
        description="Grid resolutions M"
    )

    base: StudyScenario = Field(
        default_factory=StudyScenario,
        description="Settings shared by every scenario"
    )

    @field_validator('households', 'observations', 'distributions', 'cells')
    @classmethod
    def validate_non_empty(cls, v, info):
        if not v:
            raise ValueError(f"{info.field_name} must not be empty")
        return v

    def scenarios(self) -> List[StudyScenario]:
        grid = itertools.product(self.distributions, self.households, self.observations, self.cells)
        return [
            self.base.model_copy(update={
                "distribution": d, "households": j, "observations": i, "cells": m,
            })
            for d, j, i, m in grid
        ]


@dataclass(eq=False)
class TruthRecord:
    """Generating parameters and the exact exposure of every household."""

    household_ids: Tuple[str, ...]
    exposures: np.ndarray
    lambda_b: float
    rho: float
    gamma: np.ndarray
    kernel: str = "exponential"

    def __post_init__(self):
        self.exposures = np.asarray(self.exposures, dtype=float)
        self.gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        if self.exposures.shape != (len(self.household_ids),):
            raise ValueError("one exposure per household is required")
        if np.any(self.exposures < 0):
            raise ValueError("exposures must be non-negative")

    def intensities(self, split_y: bool = True) -> Dict[str, Intensity]:
        return true_intensities(split_y)

    def parameters(self) -> Dict[str, float]:
        values = {"lambda_b": self.lambda_b, "rho": self.rho}
        values.update({f"gamma.{i + 1}": float(g) for i, g in enumerate(self.gamma)})
        return values

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"household_id": list(self.household_ids), "exposure": self.exposures})

    def save(self, directory: Union[str, Path]) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(directory / TRUTH_FILE, index=False, float_format="%.17g")
        params = self.parameters()
        pd.DataFrame({
            "name": list(params) + ["kernel"],
            "value": [repr(float(v)) for v in params.values()] + [self.kernel],
        }).to_csv(directory / TRUTH_PARAMETERS_FILE, index=False)

    @classmethod
    def load(cls, directory: Union[str, Path]) -> "TruthRecord":
        directory = Path(directory)
        for name in (TRUTH_FILE, TRUTH_PARAMETERS_FILE):
            if not (directory / name).exists():
                raise InputOutputError(f"missing truth file {directory / name}")
        frame = pd.read_csv(directory / TRUTH_FILE, dtype={"household_id": str})
        params = dict(pd.read_csv(directory / TRUTH_PARAMETERS_FILE, dtype=str).values)
        gammas = sorted(
            (int(k.split(".")[1]), float(v)) for k, v in params.items() if k.startswith("gamma.")
        )
        return cls(
            household_ids=tuple(frame["household_id"]),
            exposures=frame["exposure"].to_numpy(float),
            lambda_b=float(params["lambda_b"]),
            rho=float(params["rho"]),
            gamma=np.array([g for _, g in gammas]),
            kernel=params.get("kernel", "exponential"),
        )
