from .csvio import load_csv, save_csv
from .generators import (
    CorpusEntry,
    default_corpus,
    gen_amfm,
    gen_two_tone,
    gen_white_noise,
    two_tone_reference,
)
from .sweep import SweepRow, SweepSpec, load_sweep_spec, run_sweep, spec_from_dict, write_report

__all__ = [
    "CorpusEntry",
    "SweepRow",
    "SweepSpec",
    "default_corpus",
    "gen_amfm",
    "gen_two_tone",
    "gen_white_noise",
    "load_csv",
    "load_sweep_spec",
    "run_sweep",
    "save_csv",
    "spec_from_dict",
    "two_tone_reference",
    "write_report",
]
