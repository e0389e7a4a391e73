"""
Joint log posterior of the canal exposure model.

HazardPosterior binds a ModelSpec, a network and a survey dataset, and exposes
the target protocol the sampler needs: ``dim``, ``log_density_gradient(q)``,
``parameter_names`` and ``constrain(q)``.

The likelihood is evaluated over fixed-size household chunks and the chunk
results are combined by a pairwise tree, so the value and gradient are
bitwise identical for any thread count.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from src.exposure.discretized import build_exposure_tables
from src.exposure.kernels import kernel_eval, kernel_log_bandwidth_derivative
from src.geometry.network import CanalNetwork
from src.geometry.partition import PartitionedNetwork, build_partition
from src.gp_field.construction import FieldTransform, LatentField
from src.gp_field.flow import FlowGraph
from src.model.dataset import SurveyDataset
from src.model.likelihood import bernoulli_terms, per_obs_rate
from src.model.prior import log_prior
from src.model.spec import ModelSpec
from src.model.state import LatentState, ParameterLayout
from src.utils.exceptions import DatasetError, DimensionMismatchError, NonFiniteStateError
from src.utils.reduction import chunk_bounds, pairwise_sum

DEFAULT_CHUNK_SIZE = 64


class HazardPosterior:
    """Log posterior with analytic gradient over the unconstrained state."""

    def __init__(
        self,
        spec: ModelSpec,
        network: CanalNetwork,
        dataset: SurveyDataset,
        threads: int = 1,
        chunk_size: int = DEFAULT_CHUNK_SIZE,
        partition: Optional[PartitionedNetwork] = None,
    ):
        self.logger = logging.getLogger(__name__)
        if dataset.n_covariates != spec.n_covariates:
            raise DimensionMismatchError(
                f"dataset has {dataset.n_covariates} covariates, model expects {spec.n_covariates}"
            )
        if spec.group_baselines and int(dataset.groups.max()) >= spec.n_groups:
            raise DatasetError(
                f"dataset uses group {int(dataset.groups.max())} but n_groups is {spec.n_groups}"
            )
        if threads < 1:
            raise ValueError("threads must be at least 1")

        self.spec = spec
        self.network = network
        self.dataset = dataset
        self.partition = partition or build_partition(network, spec.cell_counts(network))
        self.flow = FlowGraph(network)
        self.tables = build_exposure_tables(self.partition, dataset.locations)
        self.lengthscale_factors = spec.lengthscale_factors(self.partition)

        self._fixed_transform = None
        if not spec.samples_omega:
            self._fixed_transform = self._build_transform(spec.omega)
        n_innovations = len(self.flow.order) + self.partition.n_cells
        self.layout = ParameterLayout(spec, n_innovations)

        self.positives = dataset.positives()
        self.negatives = dataset.negatives()
        self._baseline_index = dataset.groups if spec.group_baselines else np.zeros(
            dataset.n_households, dtype=int
        )
        self._chunks = chunk_bounds(dataset.n_households, chunk_size)
        self.threads = threads
        self._executor = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

        self.logger.info(
            f"Posterior ready: {dataset.n_households} households, "
            f"{self.partition.n_cells} cells, dimension {self.layout.dim}, "
            f"{len(self._chunks)} likelihood chunks on {threads} thread(s)"
        )

    # Target protocol

    @property
    def dim(self) -> int:
        return self.layout.dim

    @property
    def parameter_names(self) -> List[str]:
        """Names of the constrained outputs written to draws files."""
        if self.spec.group_baselines:
            names = [f"beta_local.{k + 1}" for k in range(self.layout.n_baselines)]
        else:
            names = ["lambda_b"]
        names.append("rho")
        names.extend(f"gamma.{i + 1}" for i in range(self.layout.n_covariates))
        if self.spec.samples_omega:
            names.append("omega")
        names.extend(f"source.{a}" for a in self.flow.source_ids)
        names.extend(f"junction.{a}" for a in self.flow.junction_ids)
        names.extend(f"z.{sid}.{m}" for sid, m in self.partition.cell_labels())
        names.extend(f"theta.{h}" for h in self.dataset.household_ids)
        return names

    def log_density_gradient(self, q: np.ndarray) -> Tuple[float, np.ndarray]:
        """Log posterior (up to a constant) and its gradient."""
        state = self.state(q)
        ll, ll_grad = self.log_likelihood(state)
        lp, lp_grad = log_prior(state, self.spec)
        return ll + lp, ll_grad + lp_grad

    log_posterior = log_density_gradient

    def constrain(self, q: np.ndarray) -> np.ndarray:
        """Constrained outputs in ``parameter_names`` order."""
        state = self.state(q)
        transform = self.transform_for(state)
        latent = transform.apply(state.innovations)
        z = latent.flat(self.partition)
        theta = self._exposures(z, state.rho)
        if self.spec.group_baselines:
            head = list(np.asarray(state.vector[self.layout.baseline]))
        else:
            head = [state.lambda_b]
        head.append(state.rho)
        head.extend(state.gamma)
        if self.spec.samples_omega:
            head.append(state.omega)
        head.extend(latent.source_values[a] for a in self.flow.source_ids)
        head.extend(latent.junction_values[a] for a in self.flow.junction_ids)
        return np.concatenate([np.asarray(head, dtype=float), z, theta])

    # Pieces

    def state(self, q) -> LatentState:
        return q if isinstance(q, LatentState) else LatentState(self.layout, q)

    def transform_for(self, state: LatentState) -> FieldTransform:
        if self._fixed_transform is not None:
            return self._fixed_transform
        return self._build_transform(state.omega)

    def latent_field(self, q) -> LatentField:
        state = self.state(q)
        return self.transform_for(state).apply(state.innovations)

    def exposures(self, q) -> np.ndarray:
        """Discretized exposure theta of every household."""
        state = self.state(q)
        z = self.transform_for(state).cell_values(state.innovations)
        return self._exposures(z, state.rho)

    def per_obs_rate(self, q, household: int) -> float:
        """Rate eta of one household."""
        state = self.state(q)
        theta = self.exposures(state)[household]
        baseline = state.baselines[self._baseline_index[household]]
        return float(per_obs_rate(
            baseline, theta, self.dataset.covariates[household], state.gamma
        ))

    def log_likelihood(self, q) -> Tuple[float, np.ndarray]:
        """Bernoulli log-likelihood of all observations and its gradient.

        Raises:
            NonFiniteStateError: If the state has non-finite coordinates
        """
        state = self.state(q)
        if not state.is_finite():
            raise NonFiniteStateError("log_likelihood called at a non-finite state")
        transform = self.transform_for(state)
        u = state.innovations
        z = transform.cell_values(u)
        ez_w = np.exp(z) * self.partition.widths
        kernel = self.spec.distance_kernel(state.rho)
        baselines = state.baselines
        gamma = state.gamma

        def run(bounds):
            return self._chunk_terms(bounds[0], bounds[1], kernel, ez_w, baselines, gamma)

        if self._executor is not None and len(self._chunks) > 1:
            parts = list(self._executor.map(run, self._chunks))
        else:
            parts = [run(bounds) for bounds in self._chunks]
        terms = pairwise_sum(parts)

        layout = self.layout
        k = layout.n_baselines
        p = layout.n_covariates
        value = float(terms[0])
        grad = np.zeros(layout.dim)
        grad[layout.baseline] = terms[1: 1 + k]
        grad[layout.log_rho] = terms[1 + k]
        grad[layout.gamma] = terms[2 + k: 2 + k + p]
        grad_z = terms[2 + k + p:]
        grad[layout.innovations] = transform.pullback(grad_z)
        if layout.log_omega is not None:
            grad[layout.log_omega] = state.omega * transform.lengthscale_gradient(u, grad_z)
        return value, grad

    def log_prior(self, q) -> Tuple[float, np.ndarray]:
        return log_prior(self.state(q), self.spec)

    def prior_mean_state(self) -> LatentState:
        """State at the prior means of the constrained parameters, field at zero."""
        spec = self.spec
        if spec.group_baselines:
            baselines = np.ones(self.layout.n_baselines)
        else:
            baselines = spec.lambda_scale * math.sqrt(2.0 / math.pi)
        return LatentState.from_constrained(
            self.layout,
            baselines=baselines,
            rho=spec.rho_scale * math.sqrt(2.0 / math.pi),
            gamma=np.zeros(self.layout.n_covariates),
            innovations=np.zeros(self.layout.n_innovations),
            omega=spec.omega_shape / spec.omega_rate if spec.samples_omega else None,
        )

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
        return False

    # Internals

    def _build_transform(self, omega: float) -> FieldTransform:
        return FieldTransform(
            self.flow, self.partition, omega, self.spec.marginal_sd, self.lengthscale_factors
        )

    def _exposures(self, z: np.ndarray, rho: float) -> np.ndarray:
        kernel = self.spec.distance_kernel(rho)
        return kernel_eval(kernel, self.tables.distances) @ (np.exp(z) * self.partition.widths)

    def _chunk_terms(self, start, stop, kernel, ez_w, baselines, gamma) -> np.ndarray:
        # [value, d/dbaseline (k), d/dlog rho, d/dgamma (p), d/dz (cells)]
        distances = self.tables.distances[start:stop]
        weights = kernel_eval(kernel, distances)
        theta = weights @ ez_w
        covariates = self.dataset.covariates[start:stop]
        susceptibility = np.exp(covariates @ gamma) if gamma.size else np.ones(stop - start)
        group = self._baseline_index[start:stop]
        base = baselines[group]
        eta = susceptibility * (base + theta)
        value, slope = bernoulli_terms(eta, self.positives[start:stop], self.negatives[start:stop])

        d_theta = slope * susceptibility
        grad_base = np.bincount(group, weights=d_theta * base, minlength=baselines.size)
        rho_weights = kernel_log_bandwidth_derivative(kernel, distances, weights)
        grad_log_rho = float(d_theta @ (rho_weights @ ez_w))
        grad_gamma = (slope * eta) @ covariates if gamma.size else np.zeros(0)
        grad_z = (d_theta @ weights) * ez_w
        return np.concatenate([
            [float(np.sum(value))], grad_base, [grad_log_rho], grad_gamma, grad_z
        ])
