"""Full decompositions: plain EMD and the two noise-assisted ensembles.

All three return a :class:`Decomposition` whose modes are ordered from the
finest scale (``imfs[0]``) to the coarsest.
"""

from __future__ import annotations

import os
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import ConfigError, TooFewExtrema
from .noise import NOISE_SCHEME, NoisePlan, noise_scale_reference, realization, standard_realization
from .sifting import DualThreshold, StopCriterion, extract_imf
from .signal import Signal, require_decomposable, samples_of

DEFAULT_MAX_MODES = 16
# swings below this fraction of the input's peak are treated as round-off
RESIDUE_FLOOR = 1e-10


@dataclass(frozen=True)
class ModeDiagnostics:
    """Sifting work spent on one mode.

    ``stop_reasons`` counts how each contributing sift ended; for plain EMD
    there is exactly one entry.
    """

    iterations: int
    stop_reasons: dict = field(default_factory=dict)

    @property
    def stop_reason(self) -> str:
        if not self.stop_reasons:
            return ""
        return Counter(self.stop_reasons).most_common(1)[0][0]


@dataclass(frozen=True, eq=False)
class Decomposition:
    imfs: np.ndarray
    residue: np.ndarray
    diagnostics: tuple
    method: str
    config: dict
    elapsed_seconds: float = 0.0
    sample_rate: float = 1.0
    extra_iterations: int = 0

    @property
    def imf_count(self) -> int:
        return self.imfs.shape[0]

    @property
    def total_iterations(self) -> int:
        return sum(d.iterations for d in self.diagnostics) + self.extra_iterations

    def reconstruction(self) -> np.ndarray:
        return self.imfs.sum(axis=0) + self.residue

    def components(self) -> np.ndarray:
        """Modes followed by the residue as one (K+1, n) array."""
        return np.vstack([self.imfs, self.residue[None, :]])


@dataclass(frozen=True)
class EnsembleConfig:
    noise: NoisePlan = field(default_factory=NoisePlan)
    criterion: StopCriterion = field(default_factory=DualThreshold)
    max_modes: int | None = DEFAULT_MAX_MODES

    def __post_init__(self):
        _check_max_modes(self.max_modes)

    @classmethod
    def create(cls, nstd=0.2, nr=500, seed=0, criterion=None, max_modes=DEFAULT_MAX_MODES):
        return cls(NoisePlan(seed, nr, nstd), criterion or DualThreshold(), max_modes)


def _check_max_modes(max_modes):
    if max_modes is not None and (int(max_modes) != max_modes or max_modes < 1):
        raise ConfigError(f"max_modes must be a positive integer or None, got {max_modes!r}")


def _worker_count(threads: int) -> int:
    if threads < 0:
        raise ConfigError("threads must be >= 0")
    return threads or os.cpu_count() or 1


def ordered_map(fn, items, threads: int = 1):
    """``map`` that may run on a thread pool but always yields in input order."""
    workers = _worker_count(threads)
    if workers == 1:
        return map(fn, items)
    pool = ThreadPoolExecutor(max_workers=workers)
    try:
        return list(pool.map(fn, items))
    finally:
        pool.shutdown()


def interior_extrema(x: np.ndarray, tolerance: float = 0.0) -> int:
    """Interior extrema count, ignoring swings no larger than ``tolerance``."""
    if tolerance > 0:
        return int(_kernels.significant_extrema(x, tolerance))
    imax, imin = _kernels.extrema(x)
    return imax.size + imin.size


def round_off_level(x: np.ndarray) -> float:
    return RESIDUE_FLOOR * float(np.max(np.abs(x)))


def is_exhausted(residue: np.ndarray, floor: float) -> bool:
    """True once the residue has at most one extremum above round-off."""
    return interior_extrema(residue, floor) <= 1


def _sift_all(x: np.ndarray, criterion: StopCriterion, max_modes: int | None):
    """Plain EMD core: returns (imfs list, residue, diagnostics list)."""
    imfs, diags = [], []
    residue = x.copy()
    floor = round_off_level(x)
    while max_modes is None or len(imfs) < max_modes:
        if is_exhausted(residue, floor):
            break
        try:
            res = extract_imf(residue, criterion)
        except TooFewExtrema:
            break
        if np.max(np.abs(res.imf)) <= floor:
            break
        imfs.append(res.imf)
        diags.append(ModeDiagnostics(res.iterations, {res.stop_reason: 1}))
        residue = residue - res.imf
    return imfs, residue, diags


def _stack(imfs, n):
    return np.array(imfs) if imfs else np.empty((0, n))


def _rate(signal) -> float:
    return signal.sample_rate if isinstance(signal, Signal) else 1.0


def emd(signal, criterion: StopCriterion | None = None,
        max_modes: int | None = DEFAULT_MAX_MODES) -> Decomposition:
    """Empirical mode decomposition.

    Modes are extracted one at a time and subtracted from a running residue
    until it has at most one interior extremum, cannot be enveloped, or
    ``max_modes`` modes exist.
    """
    x = samples_of(signal)
    require_decomposable(x)
    _check_max_modes(max_modes)
    criterion = criterion or DualThreshold()
    t0 = time.perf_counter()
    imfs, residue, diags = _sift_all(x, criterion, max_modes)
    return Decomposition(
        imfs=_stack(imfs, x.size),
        residue=residue,
        diagnostics=tuple(diags),
        method="emd",
        config={"criterion": criterion.to_dict(), "max_modes": max_modes},
        elapsed_seconds=time.perf_counter() - t0,
        sample_rate=_rate(signal),
    )


def _ensemble_snapshot(config: EnsembleConfig) -> dict:
    return {
        "criterion": config.criterion.to_dict(),
        "max_modes": config.max_modes,
        "nstd": config.noise.nstd,
        "nr": config.noise.nr,
        "seed": config.noise.master_seed,
        "noise_scheme": NOISE_SCHEME,
    }


def eemd(signal, config: EnsembleConfig | None = None, threads: int = 1) -> Decomposition:
    """Ensemble EMD: average the modes of ``nr`` noise-perturbed copies.

    Realizations with fewer modes than the largest count contribute zeros
    to the missing modes. The residue is the mean of the per-realization
    residues, so the reconstruction carries the leftover ensemble noise.
    """
    config = config or EnsembleConfig()
    x = samples_of(signal)
    require_decomposable(x)
    plan, criterion = config.noise, config.criterion
    n = x.size
    t0 = time.perf_counter()

    if plan.nstd == 0:
        # every realization is the bare signal
        imfs, residue, diags = _sift_all(x, criterion, config.max_modes)
        diags = [ModeDiagnostics(d.iterations * plan.nr,
                                 {k: v * plan.nr for k, v in d.stop_reasons.items()})
                 for d in diags]
        return Decomposition(_stack(imfs, n), residue, tuple(diags), "eemd",
                             _ensemble_snapshot(config), time.perf_counter() - t0, _rate(signal))

    scale = noise_scale_reference(x)

    def job(i):
        return _sift_all(x + realization(plan, i, n, scale), criterion, config.max_modes)

    sums: list[np.ndarray] = []
    iters: list[int] = []
    reasons: list[Counter] = []
    residue_sum = np.zeros(n)
    for imfs, residue, diags in ordered_map(job, range(plan.nr), threads):
        for k, (imf, diag) in enumerate(zip(imfs, diags)):
            if k == len(sums):
                sums.append(np.zeros(n))
                iters.append(0)
                reasons.append(Counter())
            sums[k] += imf
            iters[k] += diag.iterations
            reasons[k].update(diag.stop_reasons)
        residue_sum += residue

    modes = [s / plan.nr for s in sums]
    diags = tuple(ModeDiagnostics(it, dict(r)) for it, r in zip(iters, reasons))
    return Decomposition(_stack(modes, n), residue_sum / plan.nr, diags, "eemd",
                         _ensemble_snapshot(config), time.perf_counter() - t0, _rate(signal))


def emd_first_mode(x, criterion: StopCriterion | None = None) -> np.ndarray:
    """First EMD mode of ``x``; raises TooFewExtrema for non-oscillating input."""
    return extract_imf(x, criterion or DualThreshold()).imf


class _NoiseModes:
    """Successive EMD modes of one unit-variance noise realization.

    Mode k is produced on demand by sifting what is left after removing
    modes 1..k-1, which matches a full EMD of the noise without holding all
    its modes in memory.
    """

    __slots__ = ("rest", "current", "exhausted", "count", "iterations", "floor")

    def __init__(self, w: np.ndarray):
        self.rest = w
        self.floor = round_off_level(w)
        self.current = None
        self.exhausted = False
        self.count = 0
        self.iterations = 0

    def advance(self, criterion, max_modes):
        if self.exhausted:
            return None
        if (max_modes is not None and self.count >= max_modes) or is_exhausted(self.rest, self.floor):
            self.exhausted = True
            self.current = None
            return None
        try:
            res = extract_imf(self.rest, criterion)
        except TooFewExtrema:
            self.exhausted = True
            self.current = None
            return None
        if np.max(np.abs(res.imf)) <= self.floor:
            self.exhausted = True
            self.current = None
            return None
        self.iterations += res.iterations
        self.count += 1
        self.current = res.imf
        self.rest = self.rest - res.imf
        return self.current


def ceemdan(signal, config: EnsembleConfig | None = None, threads: int = 1) -> Decomposition:
    """Complete ensemble EMD with adaptive noise.

    Mode 1 is the ensemble mean of the first EMD modes of
    ``x + eps0 * w_i`` with ``eps0 = nstd * std(x)``. Each later mode is the
    ensemble mean of the first mode of ``r_k + eps_k * E_k(w_i)``, where
    ``E_k`` is the k-th EMD mode of the noise and ``eps_k = nstd * std(r_k)``.
    Residues are formed by subtraction so the decomposition is complete.

    A realization whose noised residue cannot be sifted contributes zero to
    that mode; one whose noise has run out of modes sifts the bare residue.
    ``extra_iterations`` on the result counts the sifting spent on noise modes.
    """
    config = config or EnsembleConfig()
    x = samples_of(signal)
    require_decomposable(x)
    plan, criterion, max_modes = config.noise, config.criterion, config.max_modes
    n = x.size
    t0 = time.perf_counter()

    noisy = plan.nstd > 0
    nr = plan.nr if noisy else 1
    noise = [None] * nr

    modes, diags = [], []
    residue = x.copy()
    floor = round_off_level(x)
    while max_modes is None or len(modes) < max_modes:
        k = len(modes)
        if is_exhausted(residue, floor):
            break
        if noisy:
            eps = plan.nstd * noise_scale_reference(residue if k else x)

        def job(i, k=k, residue=residue):
            if not noisy:
                target = residue
            elif k == 0:
                w = standard_realization(plan, i, n)
                noise[i] = _NoiseModes(w)
                target = residue + eps * w
            else:
                e_k = noise[i].advance(criterion, max_modes)
                target = residue if e_k is None else residue + eps * e_k
            try:
                res = extract_imf(target, criterion)
            except TooFewExtrema:
                return None
            return res

        total = np.zeros(n)
        iters = 0
        reasons = Counter()
        contributed = 0
        for res in ordered_map(job, range(nr), threads):
            if res is None:
                continue
            total += res.imf
            iters += res.iterations
            reasons[res.stop_reason] += 1
            contributed += 1
        mode = total / nr
        if contributed == 0 or np.max(np.abs(mode)) <= floor:
            break
        modes.append(mode)
        diags.append(ModeDiagnostics(iters, dict(reasons)))
        residue = residue - mode

    noise_iters = sum(m.iterations for m in noise if m is not None)
    snapshot = _ensemble_snapshot(config)
    return Decomposition(_stack(modes, n), residue, tuple(diags), "ceemdan", snapshot,
                         time.perf_counter() - t0, _rate(signal), extra_iterations=noise_iters)


METHODS = {"emd": emd, "eemd": eemd, "ceemdan": ceemdan}


def decompose(signal, method: str = "ceemdan", config: EnsembleConfig | None = None,
              threads: int = 1) -> Decomposition:
    """Dispatch on method name; plain EMD uses only the config's criterion and mode cap."""
    config = config or EnsembleConfig()
    if method == "emd":
        return emd(signal, config.criterion, config.max_modes)
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}")
    return METHODS[method](signal, config, threads=threads)
