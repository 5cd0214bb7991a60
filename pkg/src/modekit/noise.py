"""Seeded white Gaussian noise for the ensemble decomposers.

Realization ``i`` of a plan is drawn from a PCG64 stream whose seed is
``SeedSequence(master_seed, spawn_key=(i,))``, so each realization depends
only on ``(master_seed, i)`` and can be generated in any order or thread.
Samples come from numpy's ziggurat normal sampler. Changing either choice
changes every golden output, hence ``NOISE_SCHEME``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, IndexOutOfRange

NOISE_SCHEME = "pcg64-seedsequence-spawnkey-v1"
MAX_SEED = 2**64 - 1


def check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not 0 <= seed <= MAX_SEED:
        raise ConfigError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


def derive_seed(master_seed: int, *path: int) -> int:
    """A 64-bit child seed that is a pure function of the seed and path."""
    ss = np.random.SeedSequence(check_seed(master_seed), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


@dataclass(frozen=True)
class NoisePlan:
    """Parameters shared by all realizations of one ensemble.

    ``nstd`` is a fraction of the target signal's standard deviation.
    """

    master_seed: int = 0
    nr: int = 500
    nstd: float = 0.2

    def __post_init__(self):
        check_seed(self.master_seed)
        if int(self.nr) != self.nr or self.nr < 1:
            raise ConfigError(f"nr must be a positive integer, got {self.nr!r}")
        if not (np.isfinite(self.nstd) and self.nstd >= 0):
            raise ConfigError(f"nstd must be non-negative, got {self.nstd!r}")

    def generator(self, i: int) -> np.random.Generator:
        if not 0 <= i < self.nr:
            raise IndexOutOfRange(f"realization {i} outside 0..{self.nr - 1}")
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(int(i),))
        return np.random.Generator(np.random.PCG64(ss))


def standard_realization(plan: NoisePlan, i: int, length: int) -> np.ndarray:
    """Unit-variance noise for realization ``i``, before any scaling."""
    return plan.generator(i).standard_normal(int(length))


def realization(plan: NoisePlan, i: int, length: int, target_std: float = 1.0) -> np.ndarray:
    """Zero-mean Gaussian noise with standard deviation ``nstd * target_std``."""
    z = standard_realization(plan, i, length)
    return (plan.nstd * target_std) * z


def noise_scale_reference(x: np.ndarray) -> float:
    """Standard deviation that ``nstd`` is relative to.

    Constant inputs have zero spread; they fall back to unit scale so an
    ensemble still perturbs them.
    """
    s = float(np.std(x))
    return s if s > 0 else 1.0
