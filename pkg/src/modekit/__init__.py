"""Empirical mode decomposition with ensemble variants and sweep tooling."""

from .decomposers import (
    Decomposition,
    EnsembleConfig,
    ModeDiagnostics,
    ceemdan,
    decompose,
    eemd,
    emd,
    emd_first_mode,
)
from .errors import ModekitError, TooFewExtrema
from .noise import NoisePlan, realization
from .sifting import (
    DualThreshold,
    FixedExact,
    FixedWithImfCheck,
    SiftResult,
    StandardDeviation,
    extract_imf,
)
from .signal import Signal, count_zero_crossings, find_extrema, local_mean

__version__ = "0.1.0"

__all__ = [
    "Decomposition",
    "DualThreshold",
    "EnsembleConfig",
    "FixedExact",
    "FixedWithImfCheck",
    "ModeDiagnostics",
    "ModekitError",
    "NoisePlan",
    "SiftResult",
    "Signal",
    "StandardDeviation",
    "TooFewExtrema",
    "ceemdan",
    "count_zero_crossings",
    "decompose",
    "eemd",
    "emd",
    "emd_first_mode",
    "extract_imf",
    "find_extrema",
    "local_mean",
    "realization",
]
