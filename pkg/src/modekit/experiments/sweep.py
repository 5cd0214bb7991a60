"""Parameter sweeps over decomposition settings, with tabular reports.

A sweep is one or more Cartesian grids of (criterion, max_iter, nstd, nr).
Every grid point is run on every signal; each run gets its own noise seed
derived from ``(master_seed, grid index, signal index)``, so appending grid
points or signals never changes rows that already exist.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .. import metrics
from .._io import atomic_write_text
from ..decomposers import METHODS, DEFAULT_MAX_MODES, EnsembleConfig, decompose, ordered_map
from ..errors import ConfigError, EmptyDecomposition, ZeroVariance
from ..noise import NOISE_SCHEME, NoisePlan, check_seed, derive_seed
from ..sifting import StopCriterion, criterion_from_dict
from .csvio import load_csv
from .generators import DEFAULT_LENGTH, CorpusEntry, default_corpus

COLUMNS = ("method", "criterion", "nstd", "nr", "max_iter", "signal_id", "imf_count",
           "iterations", "time_s", "ecm", "io")
EXTRA_COLUMNS = ("status", "n_ok", "ecm_relative", "error")
TIME_COLUMNS = ("time_s",)
AGGREGATE_ID = "mean"


@dataclass(frozen=True)
class SweepSpec:
    method: str
    criteria: tuple
    signals: tuple
    nstd: tuple = ()
    nr: tuple = ()
    max_iter: tuple = ()
    master_seed: int = 0
    max_modes: int | None = DEFAULT_MAX_MODES

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown method {self.method!r}")
        check_seed(self.master_seed)
        if not self.criteria:
            raise ConfigError("empty sweep grid: no criteria")
        if not self.signals:
            raise ConfigError("empty sweep grid: no signals")
        if self.method == "emd":
            for axis in ("nstd", "nr"):
                if len(getattr(self, axis)) > 1:
                    raise ConfigError(f"{axis} is not applicable to emd")
        else:
            for axis in ("nstd", "nr"):
                if not getattr(self, axis):
                    raise ConfigError(f"empty sweep grid: no {axis} values for {self.method}")
            for v in self.nstd:
                NoisePlan(0, 1, v)
            for v in self.nr:
                NoisePlan(0, v, 0.0)

    def points(self) -> list[tuple[StopCriterion, float | None, int | None]]:
        criteria = self.criteria
        if self.max_iter:
            criteria = [c.with_max_iter(m) for c in criteria for m in self.max_iter]
        if self.method == "emd":
            return [(c, None, None) for c in criteria]
        return [(c, s, r) for c, s, r in itertools.product(criteria, self.nstd, self.nr)]


@dataclass(frozen=True)
class SweepRow:
    method: str
    criterion: str
    nstd: float | None
    nr: int | None
    max_iter: int
    signal_id: str
    imf_count: float | None
    iterations: float | None
    time_s: float | None
    ecm: float | None
    io: float | None
    status: str = "ok"
    n_ok: int = 1
    ecm_relative: float | None = None
    error: str = ""

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _run_one(method, criterion, nstd, nr, max_modes, entry: CorpusEntry, seed) -> SweepRow:
    echo = dict(method=method, criterion=criterion.describe(), nstd=nstd, nr=nr,
                max_iter=criterion.max_iter, signal_id=entry.signal_id)
    try:
        plan = NoisePlan(seed, nr or 1, nstd or 0.0)
        decomp = decompose(entry.signal, method, EnsembleConfig(plan, criterion, max_modes))
        try:
            io = metrics.orthogonality_index(decomp)
        except (EmptyDecomposition, ZeroVariance):
            io = None
        return SweepRow(**echo, imf_count=decomp.imf_count, iterations=decomp.total_iterations,
                        time_s=decomp.elapsed_seconds, ecm=metrics.ecm(decomp, entry.signal), io=io,
                        ecm_relative=metrics.relative_ecm(decomp, entry.signal))
    except Exception as exc:  # a failed run is recorded, never fatal to the sweep
        return SweepRow(**echo, imf_count=None, iterations=None, time_s=None, ecm=None, io=None,
                        status="failed", n_ok=0, error=f"{type(exc).__name__}: {exc}")


def _mean(values):
    values = [v for v in values if v is not None]
    return float(np.mean(values)) if values else None


def _aggregate(rows: list[SweepRow]) -> SweepRow:
    ok = [r for r in rows if r.status == "ok"]
    first = rows[0]
    return SweepRow(
        method=first.method, criterion=first.criterion, nstd=first.nstd, nr=first.nr,
        max_iter=first.max_iter, signal_id=AGGREGATE_ID,
        imf_count=_mean(r.imf_count for r in ok),
        iterations=_mean(r.iterations for r in ok),
        time_s=_mean(r.time_s for r in ok),
        ecm=_mean(r.ecm for r in ok),
        io=_mean(r.io for r in ok),
        status="aggregate", n_ok=len(ok),
        ecm_relative=_mean(r.ecm_relative for r in ok),
    )


def run_sweep(specs, threads: int = 1) -> list[SweepRow]:
    """Run every grid point of ``specs`` on every signal.

    Rows come back in grid order: the per-signal rows of a grid point
    followed by its aggregate row (means over successful runs).
    """
    if isinstance(specs, SweepSpec):
        specs = [specs]
    jobs = []
    spans = []
    g = 0
    for spec in specs:
        for criterion, nstd, nr in spec.points():
            start = len(jobs)
            for s, entry in enumerate(spec.signals):
                seed = derive_seed(spec.master_seed, g, s)
                jobs.append((spec.method, criterion, nstd, nr, spec.max_modes, entry, seed))
            spans.append((start, len(jobs)))
            g += 1
    if not jobs:
        raise ConfigError("empty sweep grid")
    results = list(ordered_map(lambda job: _run_one(*job), jobs, threads))
    rows = []
    for start, stop in spans:
        rows.extend(results[start:stop])
        rows.append(_aggregate(results[start:stop]))
    return rows


def aggregate_rows(rows) -> list[SweepRow]:
    return [r for r in rows if r.status == "aggregate"]


# ---------------------------------------------------------------- spec files

def _as_list(value, name):
    if value is None:
        return []
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [value]
    raise ConfigError(f"{name} must be a number or a list of numbers")


def _load_signals(value, base: Path, length: int) -> tuple:
    if value is None or value == "default":
        return tuple(default_corpus(length))
    if isinstance(value, dict) and "csv" in value:
        path = (base / value["csv"]).resolve()
        if not path.exists():
            raise ConfigError(f"input not found: {value['csv']}")
        stem = path.stem
        return tuple(CorpusEntry(f"{stem}_{j}", s) for j, s in enumerate(load_csv(path)))
    if isinstance(value, list):
        corpus = {e.signal_id: e for e in default_corpus(length)}
        missing = [v for v in value if v not in corpus]
        if missing:
            raise ConfigError(f"unknown corpus signals: {', '.join(map(str, missing))}")
        return tuple(corpus[v] for v in value)
    raise ConfigError("signals must be 'default', a list of corpus ids, or {'csv': path}")


def spec_from_dict(data: dict, base: Path | str = ".", seed: int | None = None) -> list[SweepSpec]:
    """Build sweep specs from parsed JSON.

    A top-level ``grids`` list yields one spec per entry, each entry
    overriding the shared top-level keys.
    """
    if not isinstance(data, dict):
        raise ConfigError("sweep spec must be a JSON object")
    base = Path(base)
    shared = {k: v for k, v in data.items() if k != "grids"}
    grids = data.get("grids", [{}])
    if not isinstance(grids, list) or not grids:
        raise ConfigError("empty sweep grid")
    specs = []
    for grid in grids:
        merged = {**shared, **grid}
        method = merged.get("method", "ceemdan")
        raw_criteria = merged.get("criteria", [{"kind": "dual"}])
        if not isinstance(raw_criteria, list):
            raw_criteria = [raw_criteria]
        criteria = tuple(criterion_from_dict(c) for c in raw_criteria)
        length = int(merged.get("length", DEFAULT_LENGTH))
        master = merged.get("seed", 0) if seed is None else seed
        specs.append(SweepSpec(
            method=method,
            criteria=criteria,
            signals=_load_signals(merged.get("signals"), base, length),
            nstd=tuple(float(v) for v in _as_list(merged.get("nstd"), "nstd")),
            nr=tuple(int(v) for v in _as_list(merged.get("nr"), "nr")),
            max_iter=tuple(int(v) for v in _as_list(merged.get("max_iter"), "max_iter")),
            master_seed=master,
            max_modes=merged.get("max_modes", DEFAULT_MAX_MODES),
        ))
    return specs


def load_sweep_spec(path, seed: int | None = None) -> list[SweepSpec]:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"sweep spec is not valid JSON: {exc}") from None
    return spec_from_dict(data, path.parent, seed)


# ---------------------------------------------------------------- reports

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value) if math.isfinite(value) else ""
    return str(value)


def rows_to_csv(rows, exclude: tuple = ()) -> str:
    cols = [c for c in COLUMNS + EXTRA_COLUMNS if c not in exclude]
    lines = [",".join(cols)]
    for row in rows:
        d = row.as_dict()
        cells = []
        for c in cols:
            text = _cell(d[c])
            if "," in text or '"' in text:
                text = '"' + text.replace('"', '""') + '"'
            cells.append(text)
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def rows_to_json(rows, meta: dict | None = None) -> str:
    doc = {
        "columns": list(COLUMNS + EXTRA_COLUMNS),
        "noise_scheme": NOISE_SCHEME,
        "meta": meta or {},
        "rows": [r.as_dict() for r in rows],
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def write_report(rows, out_dir, stem: str = "sweep", meta: dict | None = None):
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}.json"
    atomic_write_text(csv_path, rows_to_csv(rows))
    atomic_write_text(json_path, rows_to_json(rows, meta))
    return csv_path, json_path


def rows_from_json(path) -> list[SweepRow]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return [SweepRow(**r) for r in doc["rows"]]


def spec_summary(specs) -> list[dict]:
    return [
        {
            "method": s.method,
            "criteria": [c.to_dict() for c in s.criteria],
            "nstd": list(s.nstd), "nr": list(s.nr), "max_iter": list(s.max_iter),
            "signals": [e.signal_id for e in s.signals],
            "seed": s.master_seed, "max_modes": s.max_modes,
        }
        for s in specs
    ]
