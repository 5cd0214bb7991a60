"""The sifting loop that pulls one intrinsic mode function out of a signal.

Four stopping rules are available:

``FixedWithImfCheck`` (emd1)
    sift at least ``n`` times, then stop once the IMF conditions hold.
``FixedExact`` (emd2)
    sift exactly ``n`` times.
``StandardDeviation`` (emd3)
    stop when the normalized change between consecutive iterates drops
    below ``sd_threshold``.
``DualThreshold`` (emd4)
    stop when the envelope mean is small relative to the mode amplitude,
    globally (``theta1`` on a ``1 - alpha`` fraction) and locally
    (``theta2`` everywhere).

Every rule is also capped by ``max_iter`` sifting passes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import ClassVar, Union

import numpy as np

from . import _kernels
from .errors import ConfigError, LengthMismatch, TooFewExtrema
from .signal import EnvelopePair, local_mean, samples_of

DEFAULT_MAX_ITER = 5000
DEFAULT_MEAN_TOLERANCE = 0.05
SD_DELTA = 1e-12
SD_FLOOR = 1e-8
AMPLITUDE_FLOOR = 1e-12

CRITERION_SATISFIED = "criterion-satisfied"
IMF_CHECK_SATISFIED = "imf-check-satisfied"
MAX_ITER_REACHED = "max-iter-reached"
EXTREMA_EXHAUSTED = "too-few-extrema"


def _check_positive_int(name, value):
    if int(value) != value or value < 1:
        raise ConfigError(f"{name} must be a positive integer, got {value!r}")


@dataclass(frozen=True)
class _Criterion:
    tag: ClassVar[str] = ""
    label: ClassVar[str] = ""

    def __post_init__(self):
        _check_positive_int("max_iter", self.max_iter)

    def params(self) -> dict:
        return asdict(self)

    def describe(self) -> str:
        """Compact text form without max_iter, used in report tables."""
        inner = ",".join(f"{k}={v}" for k, v in self.params().items() if k != "max_iter")
        return f"{self.label}({inner})"

    def to_dict(self) -> dict:
        return {"kind": self.label, **self.params()}

    def with_max_iter(self, max_iter: int):
        return type(self)(**{**self.params(), "max_iter": max_iter})


@dataclass(frozen=True)
class FixedWithImfCheck(_Criterion):
    """Sift at least ``n`` times, then until the IMF conditions hold.

    ``consecutive`` > 1 switches to the stricter reading where the
    conditions must hold on that many successive passes before stopping.
    """

    n: int = 10
    consecutive: int = 1
    mean_tolerance: float = DEFAULT_MEAN_TOLERANCE
    max_iter: int = DEFAULT_MAX_ITER

    tag: ClassVar[str] = "emd1"
    label: ClassVar[str] = "fixed-check"

    def __post_init__(self):
        super().__post_init__()
        _check_positive_int("n", self.n)
        _check_positive_int("consecutive", self.consecutive)
        if not self.mean_tolerance > 0:
            raise ConfigError("mean_tolerance must be positive")


@dataclass(frozen=True)
class FixedExact(_Criterion):
    n: int = 10
    max_iter: int = DEFAULT_MAX_ITER

    tag: ClassVar[str] = "emd2"
    label: ClassVar[str] = "fixed"

    def __post_init__(self):
        super().__post_init__()
        _check_positive_int("n", self.n)
        if self.n > self.max_iter:
            raise ConfigError(f"n={self.n} exceeds max_iter={self.max_iter}")


@dataclass(frozen=True)
class StandardDeviation(_Criterion):
    sd_threshold: float = 0.2
    max_iter: int = DEFAULT_MAX_ITER
    check_shape: bool = True

    tag: ClassVar[str] = "emd3"
    label: ClassVar[str] = "sd"

    def __post_init__(self):
        super().__post_init__()
        if not self.sd_threshold > 0:
            raise ConfigError("sd_threshold must be positive")


@dataclass(frozen=True)
class DualThreshold(_Criterion):
    theta1: float = 0.05
    theta2: float = 0.5
    alpha: float = 0.05
    max_iter: int = DEFAULT_MAX_ITER
    check_shape: bool = True

    tag: ClassVar[str] = "emd4"
    label: ClassVar[str] = "dual"

    def __post_init__(self):
        super().__post_init__()
        if not (0 < self.theta1 < self.theta2):
            raise ConfigError("thresholds must satisfy 0 < theta1 < theta2")
        if not (0 < self.alpha < 1):
            raise ConfigError("alpha must lie in (0, 1)")


StopCriterion = Union[FixedWithImfCheck, FixedExact, StandardDeviation, DualThreshold]

_BY_NAME = {}
for _cls in (FixedWithImfCheck, FixedExact, StandardDeviation, DualThreshold):
    _BY_NAME[_cls.tag] = _cls
    _BY_NAME[_cls.label] = _cls


def criterion_from_dict(data: dict) -> StopCriterion:
    """Build a criterion from ``{"kind": "dual", "theta1": ...}``.

    ``kind`` accepts either the short label (fixed-check, fixed, sd, dual)
    or the variant tag (emd1 .. emd4).
    """
    data = dict(data)
    kind = data.pop("kind", None)
    if kind not in _BY_NAME:
        raise ConfigError(f"unknown criterion kind {kind!r}")
    try:
        return _BY_NAME[kind](**data)
    except TypeError as exc:
        raise ConfigError(f"bad parameters for criterion {kind!r}: {exc}") from None


def criterion_class(kind: str):
    if kind not in _BY_NAME:
        raise ConfigError(f"unknown criterion kind {kind!r}")
    return _BY_NAME[kind]


@dataclass(frozen=True, eq=False)
class SiftResult:
    imf: np.ndarray
    iterations: int
    stop_reason: str
    mean_energy: tuple = field(default=(), repr=False)


def sift_once(h) -> tuple[np.ndarray, EnvelopePair]:
    """One sifting pass: subtract the envelope mean from ``h``."""
    h = samples_of(h)
    env = local_mean(h)
    return h - env.mean, env


def shape_condition_holds(d) -> bool:
    """Extrema and zero-crossing counts differ by at most one."""
    d = samples_of(d)
    imax, imin = _kernels.extrema(d)
    return abs(_kernels.zero_crossings(d) - (imax.size + imin.size)) <= 1


def imf_condition_holds(d, mean_tolerance: float = DEFAULT_MEAN_TOLERANCE,
                        envelope: EnvelopePair | None = None) -> bool:
    """Check both IMF conditions on ``d``.

    The zero-mean condition is taken as ``max|m| <= mean_tolerance * max|d|``.
    Returns False when envelopes cannot be built.
    """
    d = samples_of(d)
    if not shape_condition_holds(d):
        return False
    if envelope is None:
        try:
            envelope = local_mean(d)
        except TooFewExtrema:
            return False
    peak = np.max(np.abs(d))
    return bool(np.max(np.abs(envelope.mean)) <= mean_tolerance * peak)


def sd_value(d_prev, d_cur, delta: float = SD_DELTA) -> float:
    """Sum over samples of (d_prev - d_cur)^2 / (d_prev^2 + delta).

    Samples where ``|d_prev|`` is below ``1e-8 * max|d_prev|`` are skipped so
    zero crossings do not dominate the sum.
    """
    a = np.asarray(d_prev, dtype=np.float64)
    b = np.asarray(d_cur, dtype=np.float64)
    if a.shape != b.shape:
        raise LengthMismatch(f"length {a.size} != {b.size}")
    if a.size == 0:
        return 0.0
    mag = np.abs(a)
    keep = mag >= SD_FLOOR * mag.max()
    if not keep.any():
        return 0.0
    diff = a[keep] - b[keep]
    return float(np.sum(diff * diff / (a[keep] * a[keep] + delta)))


def dual_threshold_satisfied(env: EnvelopePair, theta1: float = 0.05, theta2: float = 0.5,
                             alpha: float = 0.05, scale: float | None = None) -> bool:
    """Evaluate ``sigma = |m/a|`` against both thresholds.

    Samples whose amplitude is below ``1e-12 * scale`` are left out of both
    tests. ``scale`` defaults to the largest envelope magnitude.
    """
    amp = np.asarray(env.amplitude)
    if scale is None:
        scale = max(np.max(np.abs(env.upper)), np.max(np.abs(env.lower)))
    usable = amp >= AMPLITUDE_FLOOR * scale
    if scale == 0 or not usable.any():
        return True
    sigma = np.abs(np.asarray(env.mean)[usable] / amp[usable])
    if np.any(sigma >= theta2):
        return False
    return bool(np.count_nonzero(sigma < theta1) >= (1.0 - alpha) * sigma.size)


def extract_imf(h0, criterion: StopCriterion | None = None, track_energy: bool = False) -> SiftResult:
    """Sift ``h0`` until ``criterion`` declares the detail an IMF.

    Raises TooFewExtrema when ``h0`` itself cannot be enveloped; callers
    read that as "h0 is a residue". If a later detail loses its extrema the
    loop stops early with reason ``too-few-extrema``.
    """
    if criterion is None:
        criterion = DualThreshold()
    h = samples_of(h0)
    env = local_mean(h)
    max_iter = criterion.max_iter
    energy = []
    streak = 0
    it = 0
    while True:
        d = h - env.mean
        it += 1
        if track_energy:
            energy.append(float(np.dot(env.mean, env.mean)))
        if isinstance(criterion, FixedExact) and it >= criterion.n:
            return SiftResult(d, it, CRITERION_SATISFIED, tuple(energy))
        try:
            env_d = local_mean(d)
        except TooFewExtrema:
            return SiftResult(d, it, EXTREMA_EXHAUSTED, tuple(energy))

        if isinstance(criterion, DualThreshold):
            done = dual_threshold_satisfied(env_d, criterion.theta1, criterion.theta2,
                                            criterion.alpha, scale=np.max(np.abs(d)))
            if done and criterion.check_shape:
                done = shape_condition_holds(d)
            if done:
                return SiftResult(d, it, CRITERION_SATISFIED, tuple(energy))
        elif isinstance(criterion, StandardDeviation):
            done = sd_value(h, d) < criterion.sd_threshold
            if done and criterion.check_shape:
                done = shape_condition_holds(d)
            if done:
                return SiftResult(d, it, CRITERION_SATISFIED, tuple(energy))
        elif isinstance(criterion, FixedWithImfCheck):
            if imf_condition_holds(d, criterion.mean_tolerance, env_d):
                streak += 1
            else:
                streak = 0
            if it >= criterion.n and streak >= criterion.consecutive:
                return SiftResult(d, it, IMF_CHECK_SATISFIED, tuple(energy))

        if it >= max_iter:
            return SiftResult(d, it, MAX_ITER_REACHED, tuple(energy))
        h, env = d, env_d
