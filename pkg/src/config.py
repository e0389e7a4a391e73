"""
Run configuration for hazardfield.

Settings resolve from built-in defaults, then a flat ``key = value`` file,
then HAZARDFIELD_* environment variables, then command-line flags. The
resolved RunConfig projects onto the per-module settings objects.
"""

import os
from pathlib import Path
from typing import Any, Dict, List, Literal, Mapping, Optional, Tuple, Union

from pydantic import BaseModel, Field, field_validator

from src.geometry.io import load_network
from src.geometry.network import CanalNetwork
from src.model.spec import ModelSpec
from src.sampler.config import SamplerConfig
from src.simstudy.landscape import study_cell_counts, study_geometry
from src.simstudy.refinement import ValidationConfig
from src.simstudy.scenario import StudyConfig, StudyScenario
from src.utils.exceptions import ConfigurationError, InputOutputError

ENV_PREFIX = "HAZARDFIELD_"
CELL_OVERRIDE_PREFIX = "cells."

# Keys whose file values are comma-separated lists
LIST_KEYS = {
    "study_households", "study_observations", "study_distributions", "study_cells",
    "validation_cells", "functional_origin", "functional_direction",
}


class RunConfig(BaseModel):
    """Every documented setting with its default."""

    # Run
    seed: int = Field(default=0, description="Master seed")
    threads: int = Field(default=1, description="Worker threads")
    log_level: str = Field(default="INFO", description="Logging level name")

    # Geometry
    geometry_dir: Optional[str] = Field(
        default=None,
        description="Directory with geometry.csv, intersections.csv, endpoints.csv; "
                    "the built-in study geometry when unset"
    )

    # Model
    kernel: Literal["exponential", "gaussian"] = Field(default="exponential", description="Distance kernel")
    cells: int = Field(default=40, description="Cells per segment (M)")
    cell_overrides: Dict[str, int] = Field(default_factory=dict, description="Per-segment cell counts")
    lambda_scale: float = Field(default=0.3, description="Half-normal scale of lambda_b")
    gamma_scale: float = Field(default=0.3, description="Normal scale of gamma")
    rho_scale: float = Field(default=0.5, description="Half-normal scale of rho")
    omega_shape: float = Field(default=4.0, description="Gamma shape of omega")
    omega_rate: float = Field(default=1.0, description="Gamma rate of omega")
    omega: Optional[float] = Field(default=None, description="Fixed lengthscale; sampled when unset")
    marginal_sd: float = Field(default=1.0, description="Marginal sd of the field")
    group_baselines: bool = Field(default=False, description="One baseline per household group")
    n_groups: int = Field(default=1, description="Number of household groups")
    baseline_scale: float = Field(default=1.0, description="Normal scale of log group baselines")
    lengthscale_mode: Literal["km", "grid_relative"] = Field(default="km", description="Lengthscale units")

    # Sampler
    chains: int = Field(default=4, description="Chains")
    warmup: int = Field(default=1000, description="Warmup iterations per chain")
    samples: int = Field(default=1000, description="Kept draws per chain")
    target_accept: float = Field(default=0.95, description="Target acceptance statistic")
    max_tree_depth: int = Field(default=10, description="Maximum tree depth")
    divergence_threshold: float = Field(default=1000.0, description="Energy error marking a divergence")

    # Scenario
    households: int = Field(default=100, description="Households per simulated dataset")
    observations: int = Field(default=10, description="Observations per household")
    distribution: Literal["uniform", "clustered"] = Field(default="clustered", description="Household law")
    replications: int = Field(default=5, description="Replications per scenario")
    lateral_sd: float = Field(default=0.25, description="Clustered offset sd (km)")
    population_size: int = Field(default=200_000, description="Simulated household population")
    true_lambda: float = Field(default=0.05, description="Generating background rate")
    true_rho: float = Field(default=0.1, description="Generating kernel bandwidth")
    true_gamma: float = Field(default=-0.15, description="Generating covariate coefficient")

    # Study grid
    study_households: List[int] = Field(default_factory=lambda: [100], description="Grid of J")
    study_observations: List[int] = Field(default_factory=lambda: [10], description="Grid of I")
    study_distributions: List[Literal["uniform", "clustered"]] = Field(
        default_factory=lambda: ["clustered"], description="Grid of household laws"
    )
    study_cells: List[int] = Field(default_factory=lambda: [20, 40], description="Grid of M")

    # Refinement check
    validation_cells: List[int] = Field(
        default_factory=lambda: [20, 40, 80, 160, 320], description="Ladder of M"
    )
    validation_rho: float = Field(default=0.5, description="Kernel bandwidth (km)")
    validation_kernel: Literal["exponential", "gaussian"] = Field(default="exponential", description="Kernel")
    validation_households: List[Tuple[float, float]] = Field(
        default_factory=lambda: [(2.5, 1.0), (7.5, 2.0), (6.0, 3.5), (1.0, 3.0)],
        description="Household locations as x:y pairs"
    )
    validation_random_households: int = Field(default=0, description="Extra random households")

    # Change in odds
    functional_origin: Tuple[float, float] = Field(default=(5.0, 1.0), description="Reference location (km)")
    functional_direction: Tuple[float, float] = Field(default=(1.0, 0.0), description="Ray direction")
    functional_reference_km: float = Field(default=0.01, description="Distance of the reference point")
    functional_max_km: float = Field(default=1.0, description="Largest distance on the ray")
    functional_points: int = Field(default=100, description="Points on the distance grid")
    functional_group: Optional[int] = Field(default=None, description="Baseline group for the odds")

    # Prior predictive
    prior_predictive_draws: int = Field(default=200, description="Prior predictive draws")

    @field_validator('threads', 'chains', 'prior_predictive_draws', 'functional_points')
    @classmethod
    def validate_at_least_one(cls, v, info):
        if v < 1:
            raise ValueError(f"{info.field_name} must be at least 1")
        return v

    @field_validator('seed')
    @classmethod
    def validate_seed(cls, v):
        if v < 0 or v >= 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return v

    @field_validator('log_level')
    @classmethod
    def validate_log_level(cls, v):
        if v.upper() not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
            raise ValueError("log_level must be one of DEBUG, INFO, WARNING, ERROR, CRITICAL")
        return v.upper()

    def network(self) -> CanalNetwork:
        if self.geometry_dir:
            return load_network(self.geometry_dir)
        return study_geometry(split_y=True)

    def model_spec(self) -> ModelSpec:
        """Model settings; the built-in geometry gets the study's split-y cell counts."""
        overrides = dict(self.cell_overrides)
        if not self.geometry_dir and not overrides and self.cells >= 2 and self.cells % 2 == 0:
            overrides = study_cell_counts(self.cells)
        return ModelSpec(
            kernel=self.kernel,
            cells=self.cells,
            cell_overrides=overrides,
            lambda_scale=self.lambda_scale,
            gamma_scale=self.gamma_scale,
            rho_scale=self.rho_scale,
            omega_shape=self.omega_shape,
            omega_rate=self.omega_rate,
            omega=self.omega,
            marginal_sd=self.marginal_sd,
            group_baselines=self.group_baselines,
            n_groups=self.n_groups,
            baseline_scale=self.baseline_scale,
            lengthscale_mode=self.lengthscale_mode,
        )

    def sampler_config(self) -> SamplerConfig:
        return SamplerConfig(
            chains=self.chains,
            warmup=self.warmup,
            samples=self.samples,
            seed=self.seed,
            target_accept=self.target_accept,
            max_tree_depth=self.max_tree_depth,
            divergence_threshold=self.divergence_threshold,
        )

    def scenario(self) -> StudyScenario:
        return StudyScenario(
            households=self.households,
            observations=self.observations,
            distribution=self.distribution,
            cells=self.cells,
            replications=self.replications,
            seed=self.seed,
            lateral_sd=self.lateral_sd,
            population_size=self.population_size,
            true_lambda=self.true_lambda,
            true_rho=self.true_rho,
            true_gamma=self.true_gamma,
            kernel=self.kernel,
        )

    def study_config(self) -> StudyConfig:
        return StudyConfig(
            households=self.study_households,
            observations=self.study_observations,
            distributions=self.study_distributions,
            cells=self.study_cells,
            base=self.scenario(),
        )

    def validation_config(self) -> ValidationConfig:
        return ValidationConfig(
            cells=self.validation_cells,
            rho=self.validation_rho,
            kernel=self.validation_kernel,
            households=self.validation_households,
            random_households=self.validation_random_households,
            seed=self.seed,
        )


def _parse_value(key: str, raw: str) -> Any:
    raw = raw.strip()
    if key == "validation_households":
        pairs = []
        for item in raw.split(","):
            x, _, y = item.strip().partition(":")
            if not y:
                raise ConfigurationError(f"validation_households entry '{item}' is not x:y")
            pairs.append((x.strip(), y.strip()))
        return pairs
    if key in LIST_KEYS:
        return [item.strip() for item in raw.split(",") if item.strip()]
    if raw.lower() in ("", "none") and key in ("omega", "geometry_dir", "functional_group"):
        return None
    return raw


def parse_config_file(path: Union[str, Path]) -> Dict[str, Any]:
    """
    Read a flat key = value file

    Blank lines and lines starting with # are ignored. ``cells.<segment>``
    keys collect into ``cell_overrides``.

    Raises:
        InputOutputError: If the file cannot be read
        ConfigurationError: If a line is malformed or names an unknown key
    """
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except OSError as e:
        raise InputOutputError(f"cannot read config file {path}: {e}") from e

    values: Dict[str, Any] = {}
    overrides: Dict[str, str] = {}
    for number, line in enumerate(lines, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, raw = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigurationError(f"{path}:{number}: expected 'key = value'")
        if key.startswith(CELL_OVERRIDE_PREFIX):
            overrides[key[len(CELL_OVERRIDE_PREFIX):]] = raw.strip()
            continue
        if key not in RunConfig.model_fields or key == "cell_overrides":
            raise ConfigurationError(f"{path}:{number}: unknown key '{key}'")
        values[key] = _parse_value(key, raw)
    if overrides:
        values["cell_overrides"] = overrides
    return values


def _environment() -> Dict[str, Any]:
    values = {}
    if threads := os.getenv(f"{ENV_PREFIX}THREADS"):
        values["threads"] = threads
    if seed := os.getenv(f"{ENV_PREFIX}SEED"):
        values["seed"] = seed
    if log_level := os.getenv(f"{ENV_PREFIX}LOG_LEVEL"):
        values["log_level"] = log_level
    return values


def load_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    """
    Resolve a RunConfig from defaults, file, environment and flags

    Args:
        path: Optional flat config file
        overrides: Command-line values; None entries are ignored

    Returns:
        RunConfig: Validated settings

    Raises:
        ConfigurationError: On unknown keys
        pydantic.ValidationError: On invalid values
    """
    data: Dict[str, Any] = {}
    if path is not None:
        data.update(parse_config_file(path))
    data.update(_environment())
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in RunConfig.model_fields:
            raise ConfigurationError(f"unknown setting '{key}'")
        data[key] = value
    return RunConfig(**data)
