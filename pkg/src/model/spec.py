"""
Model specification: kernel, grid resolution and prior hyperparameters.
"""

from typing import Dict, Literal, Optional

from pydantic import BaseModel, Field, field_validator

from src.exposure.kernels import DistanceKernel
from src.geometry.network import CanalNetwork
from src.geometry.partition import PartitionedNetwork
from src.gp_field.kernels import scaled_lengthscale
from src.utils.exceptions import ConfigurationError


class ModelSpec(BaseModel):
    """Configuration model for the exposure model and its priors."""

    # Exposure
    kernel: Literal["exponential", "gaussian"] = Field(
        default="exponential",
        description="Distance kernel family"
    )

    # Grid
    cells: int = Field(
        default=40,
        description="Cells per segment unless overridden"
    )

    cell_overrides: Dict[str, int] = Field(
        default_factory=dict,
        description="Per-segment cell counts"
    )

    # Priors
    lambda_scale: float = Field(
        default=0.3,
        description="Half-normal scale of the background rate"
    )

    gamma_scale: float = Field(
        default=0.3,
        description="Normal scale of each covariate coefficient"
    )

    rho_scale: float = Field(
        default=0.5,
        description="Half-normal scale of the kernel bandwidth (km)"
    )

    omega_shape: float = Field(
        default=4.0,
        description="Gamma shape of the field lengthscale"
    )

    omega_rate: float = Field(
        default=1.0,
        description="Gamma rate of the field lengthscale"
    )

    omega: Optional[float] = Field(
        default=None,
        description="Fixed field lengthscale (km); sampled when unset"
    )

    marginal_sd: float = Field(
        default=1.0,
        description="Marginal standard deviation of the latent field"
    )

    # Regression structure
    n_covariates: int = Field(
        default=1,
        description="Number of household covariates (no intercept)"
    )

    group_baselines: bool = Field(
        default=False,
        description="Use one log baseline per household group"
    )

    n_groups: int = Field(
        default=1,
        description="Number of household groups"
    )

    baseline_scale: float = Field(
        default=1.0,
        description="Normal scale of per-group log baselines"
    )

    lengthscale_mode: Literal["km", "grid_relative"] = Field(
        default="km",
        description="Measure the lengthscale in km or relative to each segment's cell width"
    )

    @field_validator('cells')
    @classmethod
    def validate_cells(cls, v):
        if v < 1:
            raise ValueError("cells must be at least 1")
        return v

    @field_validator('cell_overrides')
    @classmethod
    def validate_cell_overrides(cls, v):
        for segment_id, count in v.items():
            if count < 1:
                raise ValueError(f"cells.{segment_id} must be at least 1")
        return v

    @field_validator(
        'lambda_scale', 'gamma_scale', 'rho_scale', 'omega_shape', 'omega_rate',
        'marginal_sd', 'baseline_scale'
    )
    @classmethod
    def validate_positive(cls, v, info):
        if not v > 0:
            raise ValueError(f"{info.field_name} must be positive")
        return v

    @field_validator('omega')
    @classmethod
    def validate_omega(cls, v):
        if v is not None and not v > 0:
            raise ValueError("omega must be positive")
        return v

    @field_validator('n_covariates')
    @classmethod
    def validate_n_covariates(cls, v):
        if v < 0:
            raise ValueError("n_covariates must be non-negative")
        return v

    @field_validator('n_groups')
    @classmethod
    def validate_n_groups(cls, v):
        if v < 1:
            raise ValueError("n_groups must be at least 1")
        return v

    @property
    def samples_omega(self) -> bool:
        return self.omega is None

    @property
    def n_baselines(self) -> int:
        return self.n_groups if self.group_baselines else 1

    def distance_kernel(self, bandwidth: float = 0.1) -> DistanceKernel:
        return DistanceKernel(self.kernel, bandwidth)

    def cell_counts(self, network: CanalNetwork) -> Dict[str, int]:
        """Cells per segment of a network after applying overrides."""
        unknown = set(self.cell_overrides) - set(network.segment_ids)
        if unknown:
            raise ConfigurationError(f"cell overrides name unknown segments {sorted(unknown)}")
        return {sid: self.cell_overrides.get(sid, self.cells) for sid in network.segment_ids}

    def lengthscale_factors(self, partition: PartitionedNetwork) -> Optional[Dict[str, float]]:
        """Per-segment lengthscale factors; the widest cell width across segments is the reference."""
        if self.lengthscale_mode == "km":
            return None
        cells = list(partition)
        reference = max(float(c.width[0]) for c in cells)
        return {c.segment_id: scaled_lengthscale(1.0, float(c.width[0]), reference) for c in cells}
