"""Seeded random streams built on numpy's Philox counter-based generator."""

from typing import Sequence

import numpy as np


class Rng:
    """Reproducible random stream.

    The stream is fully determined by ``seed`` and the spawn ``path`` that
    led to it, so ``Rng(7).spawn(3)`` yields the same numbers on every run
    and every platform numpy supports.
    """

    def __init__(self, seed: int, path: Sequence[int] = ()):
        if seed < 0:
            raise ValueError(f"seed must be non-negative, got {seed}")
        self.seed = int(seed)
        self.path = tuple(int(p) for p in path)
        sequence = np.random.SeedSequence(self.seed, spawn_key=self.path)
        self._generator = np.random.Generator(np.random.Philox(sequence))

    def spawn(self, index: int) -> "Rng":
        """Independent child stream keyed by ``index``"""
        return Rng(self.seed, (*self.path, index))

    def uniform(self, low: float, high: float, shape) -> np.ndarray:
        return self._generator.uniform(low, high, size=shape)

    def normal(self, loc: float, scale: float, shape) -> np.ndarray:
        return self._generator.normal(loc, scale, size=shape)

    def permutation(self, n: int) -> np.ndarray:
        return self._generator.permutation(n)

    def integers(self, low: int, high: int, size) -> np.ndarray:
        return self._generator.integers(low, high, size=size)

    def choice(self, n: int, size: int, replace: bool = False) -> np.ndarray:
        return self._generator.choice(n, size=size, replace=replace)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, path={self.path})"
