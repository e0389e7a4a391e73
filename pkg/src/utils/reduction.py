"""Deterministic reductions and streaming statistics."""

from typing import List, Sequence, TypeVar

import numpy as np

T = TypeVar("T")


def pairwise_sum(parts: Sequence[T]) -> T:
    """Sum parts by a fixed binary tree.

    The tree depends only on ``len(parts)``, so the result is bitwise
    identical however the parts were computed.
    """
    if not parts:
        raise ValueError("pairwise_sum needs at least one part")
    if len(parts) == 1:
        return parts[0]
    mid = len(parts) // 2
    return pairwise_sum(parts[:mid]) + pairwise_sum(parts[mid:])


def chunk_bounds(n: int, chunk_size: int) -> List[tuple]:
    """Half-open index ranges covering range(n) in fixed-size chunks."""
    if chunk_size <= 0:
        raise ValueError("chunk_size must be positive")
    return [(start, min(start + chunk_size, n)) for start in range(0, n, chunk_size)]


class WelfordAccumulator:
    """Running mean and variance of vectors (Welford's update)."""

    def __init__(self, dim: int):
        self.dim = dim
        self.count = 0
        self.mean = np.zeros(dim)
        self._m2 = np.zeros(dim)

    def add(self, x: np.ndarray) -> None:
        self.count += 1
        delta = x - self.mean
        self.mean = self.mean + delta / self.count
        self._m2 = self._m2 + delta * (x - self.mean)

    def variance(self) -> np.ndarray:
        """Sample variance (ddof=1); zeros until two points were added."""
        if self.count < 2:
            return np.zeros(self.dim)
        return self._m2 / (self.count - 1)

    def reset(self) -> None:
        self.count = 0
        self.mean = np.zeros(self.dim)
        self._m2 = np.zeros(self.dim)
