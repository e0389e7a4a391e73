"""
Chain orchestration: initialization, warmup, sampling and draws files.

Each chain draws from its own generator seeded with (seed, chain index), so
running chains concurrently gives the same draws as running them one after
another.
"""

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from typing_extensions import Protocol

from src.sampler.adaptation import (
    DualAveraging,
    adaptation_windows,
    find_reasonable_step_size,
    regularized_variance,
)
from src.sampler.config import SamplerConfig
from src.sampler.integrator import PhasePoint, evaluate
from src.sampler.nuts import nuts_transition
from src.utils.exceptions import InitializationError, InputOutputError, SamplerAbortError
from src.utils.reduction import WelfordAccumulator

logger = logging.getLogger(__name__)

META_COLUMNS = (
    "chain", "iter", "divergent", "treedepth", "accept_stat", "stepsize", "n_leapfrog", "energy"
)


class PosteriorTarget(Protocol):
    """What the sampler needs from a model."""

    dim: int
    parameter_names: List[str]

    def log_density_gradient(self, q: np.ndarray) -> Tuple[float, np.ndarray]: ...

    def constrain(self, q: np.ndarray) -> np.ndarray: ...


class FunctionTarget:
    """Target built from a bare log-density-and-gradient function."""

    def __init__(
        self,
        log_density_gradient: Callable[[np.ndarray], Tuple[float, np.ndarray]],
        dim: int,
        parameter_names: Optional[Sequence[str]] = None,
    ):
        self._fn = log_density_gradient
        self.dim = dim
        self.parameter_names = list(parameter_names or [f"q.{i + 1}" for i in range(dim)])

    def log_density_gradient(self, q: np.ndarray) -> Tuple[float, np.ndarray]:
        return self._fn(q)

    def constrain(self, q: np.ndarray) -> np.ndarray:
        return np.array(q, dtype=float)


@dataclass(eq=False)
class ChainOutput:
    """Constrained draws and per-iteration diagnostics of one chain."""

    chain: int
    names: List[str]
    draws: np.ndarray
    divergent: np.ndarray
    tree_depth: np.ndarray
    step_size: np.ndarray
    accept_stat: np.ndarray
    n_leapfrog: np.ndarray
    energy: np.ndarray
    inv_mass: Optional[np.ndarray] = None
    warmup_divergences: int = 0
    runtime_seconds: float = 0.0

    @property
    def n_draws(self) -> int:
        return int(self.draws.shape[0])

    @property
    def n_divergent(self) -> int:
        return int(np.sum(self.divergent))

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.draws, columns=self.names)
        frame.insert(0, "chain", self.chain)
        frame.insert(1, "iter", np.arange(1, self.n_draws + 1))
        frame.insert(2, "divergent", self.divergent.astype(int))
        frame.insert(3, "treedepth", self.tree_depth)
        frame.insert(4, "accept_stat", self.accept_stat)
        frame.insert(5, "stepsize", self.step_size)
        frame.insert(6, "n_leapfrog", self.n_leapfrog)
        frame.insert(7, "energy", self.energy)
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame) -> "ChainOutput":
        missing = [c for c in META_COLUMNS if c not in frame.columns]
        if missing:
            raise InputOutputError(f"draws file lacks columns {missing}")
        chains = frame["chain"].unique()
        if len(chains) != 1:
            raise InputOutputError("a chain frame must hold exactly one chain")
        frame = frame.sort_values("iter")
        names = [c for c in frame.columns if c not in META_COLUMNS]
        return cls(
            chain=int(chains[0]),
            names=names,
            draws=frame[names].to_numpy(float),
            divergent=frame["divergent"].to_numpy(int).astype(bool),
            tree_depth=frame["treedepth"].to_numpy(int),
            step_size=frame["stepsize"].to_numpy(float),
            accept_stat=frame["accept_stat"].to_numpy(float),
            n_leapfrog=frame["n_leapfrog"].to_numpy(int),
            energy=frame["energy"].to_numpy(float),
        )


@dataclass(eq=False)
class PosteriorDraws:
    """All chains of one fit."""

    chains: List[ChainOutput] = field(default_factory=list)

    def __iter__(self) -> Iterator[ChainOutput]:
        return iter(self.chains)

    def __len__(self) -> int:
        return len(self.chains)

    def __getitem__(self, index: int) -> ChainOutput:
        return self.chains[index]

    @property
    def names(self) -> List[str]:
        return list(self.chains[0].names) if self.chains else []

    @property
    def n_divergent(self) -> int:
        return sum(c.n_divergent for c in self.chains)

    def treedepth_saturation(self, max_tree_depth: int) -> int:
        return int(sum(np.sum(c.tree_depth >= max_tree_depth) for c in self.chains))

    def array(self, name: str) -> np.ndarray:
        """Draws of one parameter as (chains, draws)."""
        if name not in self.names:
            raise KeyError(name)
        index = self.names.index(name)
        return np.stack([c.draws[:, index] for c in self.chains])

    def to_frame(self) -> pd.DataFrame:
        return pd.concat([c.to_frame() for c in self.chains], ignore_index=True)


def initialize(
    target: PosteriorTarget, config: SamplerConfig, rng: np.random.Generator, chain: int = 0
) -> PhasePoint:
    """Uniform initial point with a finite log density and gradient.

    Raises:
        InitializationError: If no finite point is found within the retry limit
    """
    for attempt in range(config.max_init_attempts):
        q = rng.uniform(-config.init_radius, config.init_radius, size=target.dim)
        logp, grad = evaluate(target.log_density_gradient, q)
        if math.isfinite(logp):
            if attempt:
                logger.debug(f"chain {chain}: initialized after {attempt + 1} attempts")
            return PhasePoint(q, np.zeros(target.dim), logp, grad)
    raise InitializationError(
        f"chain {chain}: no finite initial point after {config.max_init_attempts} attempts"
    )


def run_chain(target: PosteriorTarget, config: SamplerConfig, chain: int) -> ChainOutput:
    """Warm up and sample one chain."""
    started = time.perf_counter()
    rng = np.random.default_rng([config.seed, chain])
    fn = target.log_density_gradient
    point = initialize(target, config, rng, chain)

    inv_mass = np.ones(target.dim)
    step_size = find_reasonable_step_size(point, fn, 1.0, inv_mass, rng)
    averaging = DualAveraging(config.target_accept)
    averaging.restart(step_size)
    schedule = adaptation_windows(config.warmup)
    window = WelfordAccumulator(target.dim)

    def transition(current, eps):
        return nuts_transition(
            current, fn, eps, inv_mass, rng, config.max_tree_depth, config.divergence_threshold
        )

    warmup_divergences = 0
    for iteration in range(config.warmup):
        point, stats = transition(point, step_size)
        warmup_divergences += int(stats.divergent)
        step_size = averaging.update(stats.accept_stat)
        if schedule.in_window(iteration):
            window.add(point.q)
        if schedule.window_ending_at(iteration):
            inv_mass = regularized_variance(window.variance(), window.count)
            logger.debug(
                f"chain {chain}: mass window closed at iteration {iteration + 1} "
                f"with {window.count} draws"
            )
            window.reset()
            step_size = find_reasonable_step_size(point, fn, step_size, inv_mass, rng)
            averaging.restart(step_size)

    if config.warmup:
        if warmup_divergences == config.warmup:
            raise SamplerAbortError(
                f"chain {chain}: every warmup transition diverged; "
                "check the model for non-finite regions or poor scaling"
            )
        step_size = averaging.final()
    logger.debug(f"chain {chain}: warmup done, step size {step_size:.4g}")

    n = config.samples
    names = list(target.parameter_names)
    draws = np.empty((n, len(names)))
    divergent = np.zeros(n, dtype=bool)
    tree_depth = np.zeros(n, dtype=int)
    accept = np.zeros(n)
    n_leapfrog = np.zeros(n, dtype=int)
    energy = np.zeros(n)
    for i in range(n):
        point, stats = transition(point, step_size)
        draws[i] = target.constrain(point.q)
        divergent[i] = stats.divergent
        tree_depth[i] = stats.tree_depth
        accept[i] = stats.accept_stat
        n_leapfrog[i] = stats.n_leapfrog
        energy[i] = stats.energy

    output = ChainOutput(
        chain=chain,
        names=names,
        draws=draws,
        divergent=divergent,
        tree_depth=tree_depth,
        step_size=np.full(n, step_size),
        accept_stat=accept,
        n_leapfrog=n_leapfrog,
        energy=energy,
        inv_mass=inv_mass,
        warmup_divergences=warmup_divergences,
        runtime_seconds=time.perf_counter() - started,
    )
    logger.info(
        f"chain {chain} finished: {n} draws, {output.n_divergent} divergent, "
        f"step size {step_size:.4g}, mean accept {accept.mean():.3f}, "
        f"{output.runtime_seconds:.1f}s"
    )
    return output


def run_chains(
    target: PosteriorTarget, config: SamplerConfig, threads: int = 1
) -> PosteriorDraws:
    """Run all chains, concurrently when threads > 1."""
    indices = list(range(config.chains))
    workers = max(1, min(threads, config.chains))
    if workers == 1:
        chains = [run_chain(target, config, k) for k in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chains = list(pool.map(lambda k: run_chain(target, config, k), indices))
    draws = PosteriorDraws(chains)
    logger.info(f"{config.chains} chain(s) done, {draws.n_divergent} divergent transitions")
    return draws


def draws_filename(chain: int) -> str:
    return f"draws_chain{chain}.csv"


def write_draws(draws: PosteriorDraws, directory: Union[str, Path]) -> List[Path]:
    """One CSV per chain."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for chain in draws:
        path = directory / draws_filename(chain.chain)
        chain.to_frame().to_csv(path, index=False, float_format="%.17g")
        paths.append(path)
    return paths


def read_draws(paths: Sequence[Union[str, Path]]) -> PosteriorDraws:
    """Read draws CSVs; a file may hold one or several chains."""
    chains: List[ChainOutput] = []
    for path in paths:
        path = Path(path)
        if not path.exists():
            raise InputOutputError(f"missing draws file {path}")
        try:
            frame = pd.read_csv(path)
        except (OSError, pd.errors.ParserError) as e:
            raise InputOutputError(f"cannot read draws file {path}: {e}") from e
        if "chain" not in frame.columns:
            raise InputOutputError(f"draws file {path} lacks a chain column")
        for _, part in frame.groupby("chain", sort=True):
            chains.append(ChainOutput.from_frame(part))
    if not chains:
        raise InputOutputError("no draws were read")
    names = chains[0].names
    if any(c.names != names for c in chains):
        raise InputOutputError("draws files disagree on parameter names")
    return PosteriorDraws(sorted(chains, key=lambda c: c.chain))
