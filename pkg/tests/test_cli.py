import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from modekit.cli import main
from modekit.experiments import load_csv, save_csv, two_tone_reference

NR_NSTD_GRID = {
    "method": "eemd",
    "criteria": [{"kind": "dual"}],
    "max_iter": 10,
    "length": 128,
    "signals": ["two_tone_5_40"],
    "grids": [
        {"nstd": 0.02, "nr": [500, 2000, 10000]},
        {"nstd": [0.05, 0.1, 0.5], "nr": 1000},
    ],
}


@pytest.fixture
def signal_csv(tmp_path):
    sig = two_tone_reference(512)[0]
    path = tmp_path / "in.csv"
    save_csv(path, [sig, sig.samples[::-1].copy()], sample_rate=sig.sample_rate)
    return path


def _err(capsys):
    lines = [ln for ln in capsys.readouterr().err.splitlines() if ln.strip()]
    return json.loads(lines[-1])


def test_decompose_ceemdan(signal_csv, tmp_path):
    out = tmp_path / "out"
    code = main(["decompose", "--method", "ceemdan", "--nstd", "0.2", "--nr", "20",
                 "--criterion", "dual", "--max-iter", "5000", "--seed", "42",
                 str(signal_csv), str(out)])
    assert code == 0
    assert (out / "imfs_0.csv").is_file() and (out / "imfs_1.csv").is_file()
    report = json.loads((out / "report.json").read_text())
    assert report["config"]["seed"] == 42 and report["config"]["nr"] == 20
    entry = report["signals"][0]
    cols = load_csv(out / "imfs_0.csv")
    assert len(cols) == entry["report"]["imf_count"] + 1
    x = load_csv(signal_csv)[0].samples
    recon = np.sum([c.samples for c in cols], axis=0)
    assert np.max(np.abs(recon - x)) <= 1e-9 * np.max(np.abs(x))


def test_decompose_missing_input(tmp_path, capsys):
    code = main(["decompose", str(tmp_path / "nope.csv"), str(tmp_path / "out")])
    assert code == 2
    assert _err(capsys)["error"] == "input not found"


def test_decompose_rejects_nr_for_emd(signal_csv, tmp_path, capsys):
    assert main(["decompose", "--method", "emd", "--nr", "100", str(signal_csv), str(tmp_path)]) == 2
    assert "nr is not applicable to emd" in _err(capsys)["error"]


def test_decompose_rejects_foreign_criterion_param(signal_csv, tmp_path, capsys):
    assert main(["decompose", "--criterion", "sd", "--theta1", "0.1",
                 str(signal_csv), str(tmp_path)]) == 2
    assert "theta1 is not applicable to criterion sd" in _err(capsys)["error"]


def test_decompose_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("sample_rate=10\n1\ninf\n")
    assert main(["decompose", str(bad), str(tmp_path / "o")]) == 2
    err = _err(capsys)
    assert err["kind"] == "parse" and "line 3" in err["error"]


def test_unknown_flag_is_usage_error(capsys):
    assert main(["decompose", "--bogus"]) == 2
    assert _err(capsys)["kind"] == "usage"


def test_config_file_and_env_seed(signal_csv, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"method": "eemd", "nr": 3, "max_iter": 10}))
    monkeypatch.setenv("MODEKIT_SEED", "1234")
    assert main(["decompose", "--config", str(cfg), str(signal_csv), str(tmp_path / "a")]) == 0
    report = json.loads((tmp_path / "a" / "report.json").read_text())
    assert report["method"] == "eemd" and report["config"]["seed"] == 1234
    assert main(["decompose", "--config", str(cfg), "--seed", "7",
                 str(signal_csv), str(tmp_path / "b")]) == 0
    assert json.loads((tmp_path / "b" / "report.json").read_text())["config"]["seed"] == 7


def test_decompose_plot(signal_csv, tmp_path):
    out = tmp_path / "p"
    assert main(["decompose", "--method", "emd", "--plot", str(signal_csv), str(out)]) == 0
    first = (out / "signal_0.svg").read_bytes()
    assert first.lstrip().startswith(b"<?xml")
    assert main(["decompose", "--method", "emd", "--plot", str(signal_csv), str(out)]) == 0
    assert (out / "signal_0.svg").read_bytes() == first


def test_sweep_nr_nstd_grid(tmp_path):
    spec = tmp_path / "grid.json"
    spec.write_text(json.dumps(NR_NSTD_GRID))
    assert main(["sweep", str(spec), str(tmp_path / "out"), "--plot"]) == 0
    doc = json.loads((tmp_path / "out" / "sweep.json").read_text())
    agg = [r for r in doc["rows"] if r["status"] == "aggregate"]
    assert len(agg) == 6
    assert [(r["nr"], r["nstd"]) for r in agg] == [
        (500, 0.02), (2000, 0.02), (10000, 0.02), (1000, 0.05), (1000, 0.1), (1000, 0.5)]
    assert (tmp_path / "out" / "sweep.svg").is_file()


def test_sweep_empty_grid(tmp_path, capsys):
    spec = tmp_path / "empty.json"
    spec.write_text(json.dumps({"method": "eemd", "nstd": [], "nr": [10]}))
    assert main(["sweep", str(spec), str(tmp_path / "out")]) == 2
    assert "empty sweep grid" in _err(capsys)["error"]


def _strip_time(csv_text):
    rows = list(csv.reader(io.StringIO(csv_text)))
    idx = rows[0].index("time_s")
    return [r[:idx] + r[idx + 1:] for r in rows]


@pytest.mark.parametrize("threads", ["1", "8"])
def test_sweep_repeatable(tmp_path, threads):
    spec = tmp_path / "s.json"
    spec.write_text(json.dumps({"method": "ceemdan", "nstd": 0.2, "nr": [4, 6], "length": 128,
                                "criteria": [{"kind": "dual", "max_iter": 10}],
                                "signals": ["two_tone_5_40", "amfm_50"]}))
    texts = []
    for run in ("a", "b"):
        assert main(["sweep", str(spec), str(tmp_path / run), "--seed", "3",
                     "--threads", threads]) == 0
        texts.append(_strip_time((tmp_path / run / "sweep.csv").read_text()))
    assert texts[0] == texts[1]


def test_report_subcommand(tmp_path, signal_csv, capsys):
    out = tmp_path / "o"
    main(["decompose", "--method", "emd", str(signal_csv), str(out)])
    capsys.readouterr()
    assert main(["report", str(out / "report.json")]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0].split()[:2] == ["signal", "imf_count"]
    assert len(text.splitlines()) == 3


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "modekit", "report", str(tmp_path / "x.json")],
                          capture_output=True, text=True)
    assert proc.returncode == 2
    assert json.loads(proc.stderr)["error"] == "input not found"
