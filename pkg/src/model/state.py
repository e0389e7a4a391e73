"""Unconstrained parameter vector and its transforms.

Layout: baseline block (log lambda_b, or one beta_local per group), log rho,
gamma (one per covariate), log omega when the lengthscale is sampled, then
the field innovations.
"""

import math
from dataclasses import dataclass
from typing import List

import numpy as np

from src.model.spec import ModelSpec
from src.utils.exceptions import DimensionMismatchError


class ParameterLayout:
    """Slices of the unconstrained vector."""

    def __init__(self, spec: ModelSpec, n_innovations: int):
        self.group_baselines = spec.group_baselines
        self.samples_omega = spec.samples_omega
        self.fixed_omega = spec.omega
        self.n_innovations = int(n_innovations)

        start = 0
        self.baseline = slice(start, start + spec.n_baselines)
        start = self.baseline.stop
        self.log_rho = start
        start += 1
        self.gamma = slice(start, start + spec.n_covariates)
        start = self.gamma.stop
        self.log_omega = start if self.samples_omega else None
        if self.samples_omega:
            start += 1
        self.innovations = slice(start, start + self.n_innovations)
        self.dim = self.innovations.stop

    @property
    def n_baselines(self) -> int:
        return self.baseline.stop - self.baseline.start

    @property
    def n_covariates(self) -> int:
        return self.gamma.stop - self.gamma.start

    def unconstrained_names(self) -> List[str]:
        if self.group_baselines:
            names = [f"beta_local.{k + 1}" for k in range(self.n_baselines)]
        else:
            names = ["log_lambda_b"]
        names.append("log_rho")
        names.extend(f"gamma.{i + 1}" for i in range(self.n_covariates))
        if self.samples_omega:
            names.append("log_omega")
        names.extend(f"innovation.{i + 1}" for i in range(self.n_innovations))
        return names


@dataclass(frozen=True, eq=False)
class LatentState:
    """A point in unconstrained space with its constrained views."""

    layout: ParameterLayout
    vector: np.ndarray

    def __post_init__(self):
        vector = np.asarray(self.vector, dtype=float)
        if vector.shape != (self.layout.dim,):
            raise DimensionMismatchError(
                f"state has shape {vector.shape}, layout expects ({self.layout.dim},)"
            )
        object.__setattr__(self, "vector", vector)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.vector)))

    @property
    def baselines(self) -> np.ndarray:
        """lambda_b as a length-1 array, or exp(beta_local) per group."""
        return np.exp(self.vector[self.layout.baseline])

    @property
    def lambda_b(self) -> float:
        return float(self.baselines[0])

    @property
    def rho(self) -> float:
        return math.exp(self.vector[self.layout.log_rho])

    @property
    def gamma(self) -> np.ndarray:
        return self.vector[self.layout.gamma]

    @property
    def omega(self) -> float:
        if self.layout.log_omega is None:
            return float(self.layout.fixed_omega)
        return math.exp(self.vector[self.layout.log_omega])

    @property
    def innovations(self) -> np.ndarray:
        return self.vector[self.layout.innovations]

    def log_jacobian(self) -> float:
        """log |d constrained / d unconstrained| of the exp transforms."""
        total = float(self.vector[self.layout.log_rho])
        if not self.layout.group_baselines:
            total += float(self.vector[self.layout.baseline][0])
        if self.layout.log_omega is not None:
            total += float(self.vector[self.layout.log_omega])
        return total

    @classmethod
    def from_constrained(
        cls,
        layout: ParameterLayout,
        baselines,
        rho: float,
        gamma,
        innovations,
        omega: float = None,
    ) -> "LatentState":
        """Assemble an unconstrained vector from constrained values.

        With group baselines the baseline values are exp(beta_local).
        """
        vector = np.empty(layout.dim)
        vector[layout.baseline] = np.log(np.broadcast_to(np.asarray(baselines, float), (layout.n_baselines,)))
        vector[layout.log_rho] = math.log(rho)
        vector[layout.gamma] = np.asarray(gamma, dtype=float).reshape(layout.n_covariates)
        if layout.log_omega is not None:
            if omega is None:
                raise ValueError("omega is sampled and must be given")
            vector[layout.log_omega] = math.log(omega)
        vector[layout.innovations] = np.asarray(innovations, dtype=float).reshape(layout.n_innovations)
        return cls(layout, vector)
