"""Command-line entry point: ``modekit decompose | sweep | report``.

Exit status is 0 when everything succeeded, 1 when some signals or sweep
rows failed (they are still written, tagged), and 2 for configuration or
input errors detected before any computation. Errors go to stderr as one
JSON object per line.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import metrics
from ._io import atomic_write_text
from .decomposers import DEFAULT_MAX_MODES, EnsembleConfig, decompose
from .errors import ConfigError, ModekitError, ParseError
from .experiments.csvio import format_rows, load_csv
from .experiments.sweep import (
    COLUMNS,
    load_sweep_spec,
    rows_from_json,
    run_sweep,
    spec_summary,
    write_report,
)
from .noise import NoisePlan, check_seed
from .sifting import DEFAULT_MAX_ITER, criterion_class

SEED_ENV = "MODEKIT_SEED"
EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2

# recommended ensemble settings
DEFAULTS = {
    "method": "ceemdan",
    "criterion": "dual",
    "nstd": 0.2,
    "nr": 500,
    "max_iter": DEFAULT_MAX_ITER,
    "max_modes": DEFAULT_MAX_MODES,
    "threads": 1,
    "plot": False,
}

CRITERION_PARAMS = {
    "fixed-check": ("n", "consecutive"),
    "fixed": ("n",),
    "sd": ("sd",),
    "dual": ("theta1", "theta2", "alpha"),
}
ALL_CRITERION_PARAMS = ("n", "consecutive", "sd", "theta1", "theta2", "alpha")
PARAM_FIELDS = {"sd": "sd_threshold"}


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fail(message: str, kind: str = "config") -> int:
    print(json.dumps({"error": message, "kind": kind}), file=sys.stderr)
    return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="modekit", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    dec = sub.add_parser("decompose", help="decompose every column of a signal CSV")
    dec.add_argument("input")
    dec.add_argument("output")
    dec.add_argument("--config", help="JSON file with default option values")
    dec.add_argument("--method", choices=("emd", "eemd", "ceemdan"))
    dec.add_argument("--criterion",
                     choices=("fixed-check", "fixed", "sd", "dual", "emd1", "emd2", "emd3", "emd4"))
    dec.add_argument("--n", type=int, help="sift count for fixed / fixed-check")
    dec.add_argument("--consecutive", type=int, help="required consecutive IMF checks (fixed-check)")
    dec.add_argument("--sd", type=float, help="SD threshold")
    dec.add_argument("--theta1", type=float)
    dec.add_argument("--theta2", type=float)
    dec.add_argument("--alpha", type=float)
    dec.add_argument("--max-iter", dest="max_iter", type=int)
    dec.add_argument("--max-modes", dest="max_modes", type=int)
    dec.add_argument("--nstd", type=float, help="noise std as a fraction of the signal std")
    dec.add_argument("--nr", type=int, help="number of noise realizations")
    dec.add_argument("--seed", type=int)
    dec.add_argument("--threads", type=int, help="worker threads, 0 = all cores")
    dec.add_argument("--plot", action="store_true", default=None, help="write SVG figures")

    sw = sub.add_parser("sweep", help="run a parameter sweep from a JSON spec")
    sw.add_argument("spec")
    sw.add_argument("output")
    sw.add_argument("--seed", type=int, help="override the spec's master seed")
    sw.add_argument("--threads", type=int, default=1)
    sw.add_argument("--plot", action="store_true")

    rep = sub.add_parser("report", help="print a saved report as a table")
    rep.add_argument("report")
    rep.add_argument("--plot", action="store_true", help="write an SVG next to the report")
    return parser


def resolve_seed(cli_value, config_value=None) -> int:
    if cli_value is not None:
        return check_seed(cli_value)
    if config_value is not None:
        return check_seed(config_value)
    env = os.environ.get(SEED_ENV)
    if env not in (None, ""):
        try:
            return check_seed(int(env))
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0


def _canonical_criterion(name: str) -> str:
    return criterion_class(name).label


def resolve_decompose_options(args) -> dict:
    """Merge CLI flags over the config file over defaults, then validate."""
    file_opts = {}
    if args.config:
        path = Path(args.config)
        if not path.exists():
            raise ConfigError(f"config not found: {args.config}")
        try:
            file_opts = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        if not isinstance(file_opts, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(file_opts) - set(DEFAULTS) - set(ALL_CRITERION_PARAMS) - {"seed"}
        if unknown:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")

    given = {k: v for k, v in vars(args).items() if v is not None}
    explicit = {**file_opts, **{k: given[k] for k in given if k in DEFAULTS or k in ALL_CRITERION_PARAMS}}
    opts = {**DEFAULTS, **explicit}

    method = opts["method"]
    if method == "emd":
        for key in ("nr", "nstd"):
            if key in explicit:
                raise ConfigError(f"{key} is not applicable to emd")
    kind = _canonical_criterion(opts["criterion"])
    for key in ALL_CRITERION_PARAMS:
        if key in explicit and key not in CRITERION_PARAMS[kind]:
            raise ConfigError(f"{key} is not applicable to criterion {kind}")

    params = {PARAM_FIELDS.get(k, k): explicit[k] for k in CRITERION_PARAMS[kind] if k in explicit}
    criterion = criterion_class(kind)(max_iter=opts["max_iter"], **params)
    seed = resolve_seed(args.seed, file_opts.get("seed"))
    plan = NoisePlan(seed, opts["nr"], opts["nstd"])
    if opts["threads"] < 0:
        raise ConfigError("threads must be >= 0")
    return {
        "method": method,
        "config": EnsembleConfig(plan, criterion, opts["max_modes"]),
        "threads": opts["threads"],
        "plot": bool(opts["plot"]),
    }


def cmd_decompose(args) -> int:
    try:
        opts = resolve_decompose_options(args)
    except ModekitError as exc:
        return _fail(str(exc))
    in_path = Path(args.input)
    if not in_path.is_file():
        return _fail("input not found", "io")
    try:
        signals = load_csv(in_path)
    except ParseError as exc:
        return _fail(str(exc), "parse")

    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    method, config = opts["method"], opts["config"]
    entries = []
    failed = False
    for j, sig in enumerate(signals):
        entry = {"signal_index": j, "length": len(sig), "sample_rate": sig.sample_rate}
        try:
            decomp = decompose(sig, method, config, threads=opts["threads"])
        except ModekitError as exc:
            failed = True
            entry.update(status="failed", error=f"{type(exc).__name__}: {exc}")
            print(json.dumps({"error": str(exc), "kind": "decomposition", "signal_index": j}),
                  file=sys.stderr)
            entries.append(entry)
            continue
        columns = list(decomp.imfs) + [decomp.residue]
        atomic_write_text(out / f"imfs_{j}.csv", format_rows(columns, sig.sample_rate))
        summary = metrics.summarize(decomp, sig)
        entry.update(
            status="ok",
            columns=[f"imf_{k + 1}" for k in range(decomp.imf_count)] + ["residue"],
            report=summary.to_dict(),
            stop_reasons=[d.stop_reasons for d in decomp.diagnostics],
        )
        if opts["plot"]:
            from .plots import plot_decomposition
            plot_decomposition(sig, decomp, out / f"signal_{j}.svg",
                               title=f"{method} - signal {j}")
        entries.append(entry)

    doc = {
        "input": str(in_path),
        "method": method,
        "config": {
            "criterion": config.criterion.to_dict(),
            "nstd": config.noise.nstd if method != "emd" else None,
            "nr": config.noise.nr if method != "emd" else None,
            "seed": config.noise.master_seed,
            "max_modes": config.max_modes,
        },
        "signals": entries,
    }
    atomic_write_text(out / "report.json", json.dumps(doc, indent=2) + "\n")
    return EXIT_PARTIAL if failed else EXIT_OK


def cmd_sweep(args) -> int:
    spec_path = Path(args.spec)
    if not spec_path.is_file():
        return _fail("input not found", "io")
    try:
        seed = None if args.seed is None else check_seed(args.seed)
        if args.threads < 0:
            raise ConfigError("threads must be >= 0")
        specs = load_sweep_spec(spec_path, seed)
    except ModekitError as exc:
        return _fail(str(exc))
    rows = run_sweep(specs, threads=args.threads)
    write_report(rows, args.output, meta={"spec": spec_summary(specs)})
    if args.plot:
        from .plots import plot_sweep
        plot_sweep(rows, Path(args.output) / "sweep.svg")
    return EXIT_PARTIAL if any(r.status == "failed" for r in rows) else EXIT_OK


def _fmt(value) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return f"{value:.4g}"
    return str(value)


def format_table(header, rows) -> str:
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in cells]
    return "\n".join(lines)


def cmd_report(args) -> int:
    path = Path(args.report)
    if not path.is_file():
        return _fail("input not found", "io")
    try:
        doc = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        return _fail(f"report is not valid JSON: {exc}", "parse")
    if "rows" in doc:
        rows = rows_from_json(path)
        header = list(COLUMNS) + ["status"]
        print(format_table(header, [[getattr(r, c) for c in header] for r in rows]))
        if args.plot:
            from .plots import plot_sweep
            plot_sweep(rows, path.with_suffix(".svg"))
        return EXIT_OK
    if "signals" in doc:
        header = ["signal", "imf_count", "iterations", "time_s", "ecm", "io"]
        table = []
        for e in doc["signals"]:
            r = e.get("report")
            if r is None:
                table.append([e["signal_index"], None, None, None, None, None])
                continue
            table.append([e["signal_index"], r["imf_count"], r["total_iterations"],
                          r["elapsed_seconds"], r["ecm"], r["orthogonality_index"]])
        print(format_table(header, table))
        return EXIT_OK
    return _fail("unrecognised report format", "parse")


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        return _fail(str(exc), "usage")
    handler = {"decompose": cmd_decompose, "sweep": cmd_sweep, "report": cmd_report}[args.command]
    return handler(args)


if __name__ == "__main__":
    sys.exit(main())
