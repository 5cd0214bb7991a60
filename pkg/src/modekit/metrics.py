"""Quality measures for decompositions."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import _kernels
from .decomposers import Decomposition
from .errors import EmptyDecomposition, LengthMismatch, TooFewExtrema, ZeroVariance
from .signal import samples_of

DEFAULT_INTERIOR = 0.8


@dataclass(frozen=True)
class ModeReport:
    iterations: int
    mean_period_samples: float | None
    energy: float


@dataclass(frozen=True)
class DecompositionReport:
    imf_count: int
    total_iterations: int
    elapsed_seconds: float
    ecm: float
    ecm_relative: float
    orthogonality_index: float | None
    per_mode: tuple

    def to_dict(self) -> dict:
        return asdict(self)


def ecm(decomp: Decomposition, original) -> float:
    """Mean squared reconstruction error, (1/T) * sum (x - sum(imfs) - r)^2."""
    x = samples_of(original)
    recon = decomp.reconstruction()
    if recon.shape != x.shape:
        raise LengthMismatch(f"decomposition length {recon.size} != signal length {x.size}")
    err = x - recon
    return float(np.mean(err * err))


def relative_ecm(decomp: Decomposition, original) -> float:
    """ECM divided by the mean power of the original; 0 for a zero signal."""
    x = samples_of(original)
    power = float(np.mean(x * x))
    value = ecm(decomp, original)
    return value / power if power > 0 else value


def corpus_ecm(decomps, originals) -> float:
    """Average ECM over a set of signals."""
    values = [ecm(d, x) for d, x in zip(decomps, originals, strict=True)]
    return float(np.mean(values))


def orthogonality_index(decomp: Decomposition) -> float:
    """Normalized cross-energy between distinct components.

    The residue takes part as the last component. Equals 0 when all
    components are mutually orthogonal.
    """
    if decomp.imf_count < 1:
        raise EmptyDecomposition("orthogonality needs at least one mode")
    comps = decomp.components()
    total = comps.sum(axis=0)
    denom = float(np.dot(total, total))
    gram = comps @ comps.T
    cross = float(gram.sum() - np.trace(gram))
    if denom == 0:
        raise ZeroVariance("reconstruction has zero energy")
    return cross / denom


def mean_period(mode, sample_rate: float = 1.0) -> float:
    """Mean oscillation period in seconds, estimated as 2*T / #extrema."""
    x = samples_of(mode)
    imax, imin = _kernels.extrema(x)
    count = imax.size + imin.size
    if count < 2:
        raise TooFewExtrema(f"mean period needs 2 extrema, found {count}")
    return 2.0 * x.size / count / sample_rate


def interior_slice(n: int, fraction: float = DEFAULT_INTERIOR) -> slice:
    """Central ``fraction`` of ``n`` samples."""
    if not 0 < fraction <= 1:
        raise ValueError("interior fraction must lie in (0, 1]")
    keep = max(1, int(round(n * fraction)))
    start = (n - keep) // 2
    return slice(start, start + keep)


def mode_correlation(mode, reference, interior_fraction: float = DEFAULT_INTERIOR) -> float:
    a = samples_of(mode)
    b = samples_of(reference)
    if a.shape != b.shape:
        raise LengthMismatch(f"length {a.size} != {b.size}")
    sl = interior_slice(a.size, interior_fraction)
    a = a[sl] - a[sl].mean()
    b = b[sl] - b[sl].mean()
    na = np.sqrt(np.dot(a, a))
    nb = np.sqrt(np.dot(b, b))
    if na == 0 or nb == 0:
        raise ZeroVariance("correlation undefined for a constant window")
    return float(np.clip(np.dot(a, b) / (na * nb), -1.0, 1.0))


def best_match(decomp: Decomposition, reference, interior_fraction: float = DEFAULT_INTERIOR):
    """(index, correlation) of the mode most correlated with ``reference``."""
    best = (-1, -np.inf)
    for k, mode in enumerate(decomp.imfs):
        try:
            c = mode_correlation(mode, reference, interior_fraction)
        except ZeroVariance:
            continue
        if c > best[1]:
            best = (k, c)
    return best


def summarize(decomp: Decomposition, original) -> DecompositionReport:
    per_mode = []
    for mode, diag in zip(decomp.imfs, decomp.diagnostics):
        try:
            period = mean_period(mode)
        except TooFewExtrema:
            period = None
        per_mode.append(ModeReport(diag.iterations, period, float(np.dot(mode, mode))))
    try:
        io = orthogonality_index(decomp)
    except (EmptyDecomposition, ZeroVariance):
        io = None
    return DecompositionReport(
        imf_count=decomp.imf_count,
        total_iterations=decomp.total_iterations,
        elapsed_seconds=decomp.elapsed_seconds,
        ecm=ecm(decomp, original),
        ecm_relative=relative_ecm(decomp, original),
        orthogonality_index=io,
        per_mode=tuple(per_mode),
    )
