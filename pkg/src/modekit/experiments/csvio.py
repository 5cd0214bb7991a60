"""Reading and writing the plain-text signal format.

Line 1 is ``sample_rate=<float>``; every following line holds one sample per
signal, comma separated. Values are written with ``repr`` so they round-trip
exactly (at most 17 significant digits).
"""

from __future__ import annotations

import math
import os
from pathlib import Path

import numpy as np

from .._io import atomic_write_text
from ..errors import EmptyFile, LengthMismatch, ParseError
from ..signal import Signal

HEADER_KEY = "sample_rate"


def _parse_header(line: str) -> float:
    key, sep, value = line.strip().partition("=")
    if not sep or key.strip() != HEADER_KEY:
        raise ParseError(f"expected '{HEADER_KEY}=<float>' header", line=1)
    try:
        rate = float(value)
    except ValueError:
        raise ParseError(f"bad sample rate {value.strip()!r}", line=1) from None
    if not (math.isfinite(rate) and rate > 0):
        raise ParseError(f"sample rate must be positive, got {value.strip()!r}", line=1)
    return rate


def load_csv(path) -> list[Signal]:
    """One Signal per column of ``path``."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or not text.strip():
        raise EmptyFile(f"{path} is empty")
    rate = _parse_header(lines[0])
    rows = []
    width = None
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        cells = raw.split(",")
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise ParseError(f"non-numeric value in {raw.strip()!r}", line=lineno) from None
        if not all(math.isfinite(v) for v in values):
            raise ParseError("non-finite value", line=lineno)
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise ParseError(f"expected {width} columns, got {len(values)}", line=lineno)
        rows.append(values)
    if not rows:
        raise EmptyFile(f"{path} has a header but no samples")
    data = np.array(rows, dtype=np.float64)
    return [Signal(data[:, j], rate) for j in range(width)]


def format_rows(columns, sample_rate: float) -> str:
    cols = [np.asarray(c, dtype=np.float64) for c in columns]
    if not cols:
        raise ValueError("nothing to write")
    n = cols[0].size
    for c in cols:
        if c.size != n:
            raise LengthMismatch("all columns must have the same length")
    out = [f"{HEADER_KEY}={float(sample_rate)!r}"]
    for row in zip(*(c.tolist() for c in cols)):
        out.append(",".join(repr(v) for v in row))
    return "\n".join(out) + "\n"


def save_csv(path, signals, sample_rate: float | None = None) -> None:
    """Write signals (Signal objects or arrays) as columns of one file."""
    signals = list(signals)
    if sample_rate is None:
        rates = {s.sample_rate for s in signals if isinstance(s, Signal)}
        if len(rates) != 1:
            raise ValueError("pass sample_rate explicitly for mixed or raw inputs")
        sample_rate = rates.pop()
    cols = [s.samples if isinstance(s, Signal) else s for s in signals]
    atomic_write_text(os.fspath(path), format_rows(cols, sample_rate))
