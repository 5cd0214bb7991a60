"""Signals, extrema detection and cubic-spline envelopes."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import InvalidSignal, LengthMismatch, SignalTooShort, TooFewExtrema

MIN_DECOMPOSE_LENGTH = 4


def _as_samples(values) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidSignal(f"expected a 1-d sequence, got shape {arr.shape}")
    if arr.size < 1:
        raise InvalidSignal("a signal needs at least one sample")
    if not np.all(np.isfinite(arr)):
        raise InvalidSignal("signal contains NaN or infinite samples")
    return arr


@dataclass(frozen=True, eq=False)
class Signal:
    """A uniformly sampled real-valued time series.

    The sample buffer is copied on construction and marked read-only.
    """

    samples: np.ndarray
    sample_rate: float = 1.0

    def __post_init__(self):
        arr = _as_samples(self.samples).copy()
        arr.flags.writeable = False
        rate = float(self.sample_rate)
        if not (np.isfinite(rate) and rate > 0):
            raise InvalidSignal(f"sample_rate must be positive, got {self.sample_rate!r}")
        object.__setattr__(self, "samples", arr)
        object.__setattr__(self, "sample_rate", rate)

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def time(self) -> np.ndarray:
        return np.arange(self.samples.size) / self.sample_rate


def as_signal(signal, sample_rate: float = 1.0) -> Signal:
    if isinstance(signal, Signal):
        return signal
    return Signal(signal, sample_rate)


def samples_of(signal) -> np.ndarray:
    """Contiguous float64 view of a Signal or array-like, validated."""
    if isinstance(signal, Signal):
        return signal.samples
    return _as_samples(signal)


def require_decomposable(x: np.ndarray):
    if x.size < MIN_DECOMPOSE_LENGTH:
        raise SignalTooShort(
            f"decomposition needs at least {MIN_DECOMPOSE_LENGTH} samples, got {x.size}"
        )


class BoundaryPolicy(enum.Enum):
    """How envelope knots are extended past the signal ends."""

    MIRROR = _kernels.MIRROR
    NONE = _kernels.NO_EXTENSION


@dataclass(frozen=True)
class ExtremaSet:
    maxima: tuple[tuple[int, float], ...]
    minima: tuple[tuple[int, float], ...]

    @property
    def max_indices(self) -> np.ndarray:
        return np.array([i for i, _ in self.maxima], dtype=np.int64)

    @property
    def min_indices(self) -> np.ndarray:
        return np.array([i for i, _ in self.minima], dtype=np.int64)

    @property
    def count(self) -> int:
        return len(self.maxima) + len(self.minima)


@dataclass(frozen=True, eq=False)
class EnvelopePair:
    upper: np.ndarray
    lower: np.ndarray
    mean: np.ndarray
    amplitude: np.ndarray

    @classmethod
    def from_bounds(cls, upper: np.ndarray, lower: np.ndarray) -> "EnvelopePair":
        return cls(upper, lower, (upper + lower) / 2.0, (upper - lower) / 2.0)


def extrema_indices(signal) -> tuple[np.ndarray, np.ndarray]:
    """Fast path of :func:`find_extrema` returning two index arrays."""
    return _kernels.extrema(samples_of(signal))


def find_extrema(signal) -> ExtremaSet:
    """Locate the strict interior local maxima and minima of a signal.

    A flat run of equal samples that rises on one side and falls on the other
    counts once, at the run's midpoint (rounded down). Runs touching either
    endpoint are never extrema.
    """
    x = samples_of(signal)
    imax, imin = _kernels.extrema(x)
    return ExtremaSet(
        tuple((int(i), float(x[i])) for i in imax),
        tuple((int(i), float(x[i])) for i in imin),
    )


def count_extrema(signal) -> int:
    imax, imin = _kernels.extrema(samples_of(signal))
    return imax.size + imin.size


def count_zero_crossings(signal) -> int:
    """Count sign changes, skipping exact zeros.

    A run of zeros between opposite signs is one crossing; between equal signs
    it is none.
    """
    return int(_kernels.zero_crossings(samples_of(signal)))


def interpolate_envelope(
    knots: Sequence[tuple[int, float]],
    length: int,
    boundary: BoundaryPolicy = BoundaryPolicy.MIRROR,
) -> np.ndarray:
    """Natural cubic spline through ``knots``, sampled at ``0..length-1``.

    With ``BoundaryPolicy.MIRROR`` the two knots nearest each end are
    reflected across that end before fitting.
    """
    knots = list(knots)
    idx = np.array([int(i) for i, _ in knots], dtype=np.int64)
    vals = np.array([float(v) for _, v in knots], dtype=np.float64)
    if idx.size and np.any(np.diff(idx) <= 0):
        raise ValueError("knot indices must be strictly increasing")
    xs, ys = _kernels.extend_knots(idx, vals, int(length), boundary.value)
    if xs.size < 2:
        raise TooFewExtrema(f"need at least 2 knots after extension, got {xs.size}")
    return _kernels.natural_spline_eval(xs, ys, int(length))


def local_mean(signal) -> EnvelopePair:
    """Upper/lower extrema envelopes with their mean and half-difference.

    Raises TooFewExtrema when the signal lacks a maximum or a minimum, since
    mirroring cannot then produce the two knots a spline needs.
    """
    x = samples_of(signal)
    upper, lower, nmax, nmin = _kernels.envelopes(x)
    if upper.size == 0:
        raise TooFewExtrema(f"{nmax} maxima and {nmin} minima; cannot build envelopes")
    return EnvelopePair.from_bounds(upper, lower)


def check_same_length(a: np.ndarray, b: np.ndarray):
    if a.shape != b.shape:
        raise LengthMismatch(f"length {a.size} != {b.size}")
