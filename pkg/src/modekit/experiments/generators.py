"""Synthetic test signals and the default ten-signal corpus."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import AliasingViolation, ConfigError
from ..signal import Signal

DEFAULT_LENGTH = 2048


def _n_samples(fs, duration):
    if not fs > 0:
        raise ConfigError("sample rate must be positive")
    if not duration > 0:
        raise ConfigError("duration must be positive")
    n = int(round(duration * fs))
    if n < 1:
        raise ConfigError("duration too short for the sample rate")
    return n


def gen_two_tone(f1: float, f2: float, fs: float, duration: float,
                 amplitudes: tuple[float, float] = (1.0, 1.0)) -> Signal:
    if f2 >= fs / 2:
        raise AliasingViolation(f"f2={f2} Hz is not below Nyquist ({fs / 2} Hz)")
    if not 0 < f1 < f2:
        raise ConfigError("need 0 < f1 < f2")
    t = np.arange(_n_samples(fs, duration)) / fs
    a1, a2 = amplitudes
    return Signal(a1 * np.sin(2 * np.pi * f1 * t) + a2 * np.sin(2 * np.pi * f2 * t), fs)


def gen_amfm(carrier: float, am_rate: float, fm_depth: float, fs: float, duration: float) -> Signal:
    """``(1 + 0.5 sin(2 pi am t)) * sin(2 pi fc t + fm_depth sin(2 pi am t))``."""
    peak_freq = carrier + abs(fm_depth) * am_rate
    if peak_freq >= fs / 2:
        raise AliasingViolation(f"peak instantaneous frequency {peak_freq} Hz reaches Nyquist")
    t = np.arange(_n_samples(fs, duration)) / fs
    mod = np.sin(2 * np.pi * am_rate * t)
    return Signal((1 + 0.5 * mod) * np.sin(2 * np.pi * carrier * t + fm_depth * mod), fs)


def gen_white_noise(fs: float, duration: float, seed: int) -> Signal:
    rng = np.random.default_rng(seed)
    return Signal(rng.standard_normal(_n_samples(fs, duration)), fs)


@dataclass(frozen=True)
class CorpusEntry:
    signal_id: str
    signal: Signal


def two_tone_reference(length: int = DEFAULT_LENGTH):
    """The 5 Hz + 40 Hz test signal at 400 Hz with its two components."""
    fs = 400.0
    t = np.arange(length) / fs
    low = np.sin(2 * np.pi * 5 * t)
    high = np.sin(2 * np.pi * 40 * t)
    return Signal(low + high, fs), low, high


def default_corpus(length: int = DEFAULT_LENGTH) -> list[CorpusEntry]:
    """Ten deterministic signals mixing slow and fast content.

    Stands in for a recorded corpus: tone pairs, AM/FM carriers, and
    noise-contaminated variants at 400-700 Hz sampling.
    """
    if length < 16:
        raise ConfigError("corpus signals need at least 16 samples")

    def dur(fs):
        return length / fs

    def noisy(sig, level, seed):
        noise = np.random.default_rng(seed).standard_normal(len(sig))
        return Signal(sig.samples + level * noise, sig.sample_rate)

    def plus(a, b):
        return Signal(a.samples + b.samples, a.sample_rate)

    trend_t = np.linspace(-1.0, 1.0, length)
    entries = [
        ("two_tone_5_40", two_tone_reference(length)[0]),
        ("two_tone_8_60", gen_two_tone(8, 60, 650, dur(650), (1.0, 0.5))),
        ("amfm_50", gen_amfm(50, 2, 3, 650, dur(650))),
        ("amfm_120", gen_amfm(120, 5, 5, 600, dur(600))),
        ("two_tone_3_25_noise", noisy(gen_two_tone(3, 25, 620, dur(620)), 0.1, 101)),
        ("amfm_30_noise", noisy(gen_amfm(30, 1.5, 2, 680, dur(680)), 0.2, 102)),
        ("two_tone_2_90_trend",
         Signal(gen_two_tone(2, 90, 700, dur(700)).samples + 0.8 * trend_t, 700)),
        ("amfm_80_plus_4", plus(gen_amfm(80, 3, 4, 640, dur(640)),
                                gen_two_tone(4, 11, 640, dur(640), (0.7, 0.0)))),
        ("two_tone_10_150_noise", noisy(gen_two_tone(10, 150, 660, dur(660)), 0.05, 103)),
        ("amfm_200_noise", noisy(gen_amfm(200, 1, 10, 690, dur(690)), 0.1, 104)),
    ]
    return [CorpusEntry(name, sig) for name, sig in entries]


def corpus_entry(signal_id: str, length: int = DEFAULT_LENGTH) -> CorpusEntry:
    for entry in default_corpus(length):
        if entry.signal_id == signal_id:
            return entry
    raise ConfigError(f"unknown corpus signal {signal_id!r}")
