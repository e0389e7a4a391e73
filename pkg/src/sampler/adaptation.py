"""Warmup: dual-averaging step size and windowed diagonal mass estimation."""

import math
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from src.sampler.integrator import DensityGradient, PhasePoint, leapfrog
from src.utils.logger_config import get_logger

logger = get_logger(__name__)

INIT_BUFFER = 75
TERM_BUFFER = 50
BASE_WINDOW = 25
MIN_ADAPTED_WARMUP = 20

MAX_STEP_SIZE = 1e7
STEP_SEARCH_LIMIT = 100


class DualAveraging:
    """Step-size adaptation towards a target acceptance statistic."""

    def __init__(
        self,
        target_accept: float,
        gamma: float = 0.05,
        t0: float = 10.0,
        kappa: float = 0.75,
    ):
        self.target_accept = target_accept
        self.gamma = gamma
        self.t0 = t0
        self.kappa = kappa
        self.restart(1.0)

    def restart(self, step_size: float) -> None:
        self.mu = math.log(10.0 * step_size)
        self.counter = 0
        self.s_bar = 0.0
        self.x_bar = 0.0

    def update(self, accept_stat: float) -> float:
        """Record one acceptance statistic; returns the next step size."""
        self.counter += 1
        accept_stat = min(1.0, accept_stat)
        eta = 1.0 / (self.counter + self.t0)
        self.s_bar = (1.0 - eta) * self.s_bar + eta * (self.target_accept - accept_stat)
        x = self.mu - self.s_bar * math.sqrt(self.counter) / self.gamma
        x_eta = self.counter ** (-self.kappa)
        self.x_bar = (1.0 - x_eta) * self.x_bar + x_eta * x
        return math.exp(x)

    def final(self) -> float:
        return math.exp(self.x_bar)


@dataclass(frozen=True)
class AdaptationSchedule:
    """Warmup layout: fast initial buffer, slow mass windows, fast final buffer."""

    n_warmup: int
    init_buffer: int
    term_buffer: int
    windows: Tuple[Tuple[int, int], ...]

    def window_ending_at(self, iteration: int) -> bool:
        return any(end - 1 == iteration for _, end in self.windows)

    def in_window(self, iteration: int) -> bool:
        return any(start <= iteration < end for start, end in self.windows)


def adaptation_windows(
    n_warmup: int,
    init_buffer: int = INIT_BUFFER,
    term_buffer: int = TERM_BUFFER,
    base_window: int = BASE_WINDOW,
) -> AdaptationSchedule:
    """Doubling mass-adaptation windows; the last window absorbs any remainder.

    Short warmups fall back to 15% / 75% / 10% of the iterations; below 20
    iterations only the step size is adapted.
    """
    if n_warmup < MIN_ADAPTED_WARMUP:
        if n_warmup:
            logger.warning(f"warmup of {n_warmup} iterations is too short for mass adaptation")
        return AdaptationSchedule(n_warmup, n_warmup, 0, ())
    if init_buffer + base_window + term_buffer > n_warmup:
        logger.warning(
            f"warmup of {n_warmup} iterations is shorter than {init_buffer + base_window + term_buffer}; "
            "using 15%/75%/10% buffers"
        )
        init_buffer = int(0.15 * n_warmup)
        term_buffer = int(0.1 * n_warmup)
        base_window = n_warmup - (init_buffer + term_buffer)

    windows: List[Tuple[int, int]] = []
    start = init_buffer
    slow_end = n_warmup - term_buffer
    size = base_window
    while start < slow_end:
        end = start + size
        if end + 2 * size > slow_end:
            end = slow_end
        windows.append((start, end))
        start = end
        size *= 2
    return AdaptationSchedule(n_warmup, init_buffer, term_buffer, tuple(windows))


def regularized_variance(variance: np.ndarray, n: int) -> np.ndarray:
    """Shrink a window's sample variance towards 1e-3."""
    return (n / (n + 5.0)) * variance + 1e-3 * (5.0 / (n + 5.0))


def find_reasonable_step_size(
    point: PhasePoint,
    target: DensityGradient,
    step_size: float,
    inv_mass: np.ndarray,
    rng: np.random.Generator,
) -> float:
    """Double or halve the step until one leapfrog step crosses acceptance 0.8."""
    if not (0.0 < step_size <= MAX_STEP_SIZE) or math.isnan(step_size):
        return step_size
    log_threshold = math.log(0.8)

    def energy_change(eps: float) -> float:
        momentum = rng.standard_normal(point.q.shape) / np.sqrt(inv_mass)
        start = point.with_momentum(momentum)
        moved = leapfrog(start, eps, inv_mass, target)
        return start.hamiltonian(inv_mass) - moved.hamiltonian(inv_mass)

    direction = 1 if energy_change(step_size) > log_threshold else -1
    for _ in range(STEP_SEARCH_LIMIT):
        delta_h = energy_change(step_size)
        if direction == 1 and not delta_h > log_threshold:
            break
        if direction == -1 and not delta_h < log_threshold:
            break
        step_size = step_size * 2.0 if direction == 1 else step_size * 0.5
        if step_size > MAX_STEP_SIZE or step_size == 0.0:
            logger.warning(f"step-size search left the usable range at {step_size:g}")
            step_size = min(max(step_size, 1e-10), MAX_STEP_SIZE)
            break
    return step_size
