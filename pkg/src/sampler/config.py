"""
Configuration for the no-U-turn sampler and its warmup.
"""

from pydantic import BaseModel, Field, field_validator


class SamplerConfig(BaseModel):
    """Configuration model for chains, warmup and trajectory limits."""

    # Chains
    chains: int = Field(
        default=4,
        description="Number of independent chains"
    )

    warmup: int = Field(
        default=1000,
        description="Warmup iterations per chain"
    )

    samples: int = Field(
        default=1000,
        description="Post-warmup iterations per chain"
    )

    seed: int = Field(
        default=0,
        description="Base seed; chain k uses the stream (seed, k)"
    )

    # Adaptation
    target_accept: float = Field(
        default=0.95,
        description="Target mean acceptance statistic for step-size adaptation"
    )

    # Trajectories
    max_tree_depth: int = Field(
        default=10,
        description="Maximum tree depth of one transition"
    )

    divergence_threshold: float = Field(
        default=1000.0,
        description="Energy error (nats) that marks a transition divergent"
    )

    # Initialization
    init_radius: float = Field(
        default=2.0,
        description="Initial coordinates are uniform on (-init_radius, init_radius)"
    )

    max_init_attempts: int = Field(
        default=100,
        description="Initialization retries before giving up"
    )

    @field_validator('chains', 'max_tree_depth', 'max_init_attempts')
    @classmethod
    def validate_at_least_one(cls, v, info):
        if v < 1:
            raise ValueError(f"{info.field_name} must be at least 1")
        return v

    @field_validator('warmup')
    @classmethod
    def validate_warmup(cls, v):
        if v < 0:
            raise ValueError("warmup must be non-negative")
        return v

    @field_validator('samples')
    @classmethod
    def validate_samples(cls, v):
        if v < 1:
            raise ValueError("samples must be at least 1")
        return v

    @field_validator('seed')
    @classmethod
    def validate_seed(cls, v):
        if v < 0 or v >= 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        return v

    @field_validator('target_accept')
    @classmethod
    def validate_target_accept(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError("target_accept must be in (0, 1)")
        return v

    @field_validator('divergence_threshold', 'init_radius')
    @classmethod
    def validate_positive(cls, v, info):
        if not v > 0:
            raise ValueError(f"{info.field_name} must be positive")
        return v
