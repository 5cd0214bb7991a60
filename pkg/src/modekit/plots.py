"""Static SVG figures for decompositions and sweeps."""

from __future__ import annotations

import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ._io import atomic_write_bytes  # noqa: E402


def _save_svg(fig, path):
    buf = io.BytesIO()
    # a fixed hashsalt keeps the SVG ids reproducible
    with matplotlib.rc_context({"svg.hashsalt": "modekit"}):
        fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    atomic_write_bytes(path, buf.getvalue())


def plot_decomposition(signal, decomp, path, title: str = ""):
    """Input, each mode and the residue stacked on a shared time axis."""
    t = signal.time()
    rows = decomp.imf_count + 2
    fig, axes = plt.subplots(rows, 1, figsize=(8, 1.1 * rows + 0.6), sharex=True)
    axes[0].plot(t, signal.samples, color="k", lw=0.7)
    axes[0].set_ylabel("x", rotation=0, ha="right")
    for k, mode in enumerate(decomp.imfs, start=1):
        axes[k].plot(t, mode, lw=0.7)
        axes[k].set_ylabel(f"IMF {k}", rotation=0, ha="right")
    axes[-1].plot(t, decomp.residue, color="tab:red", lw=0.9)
    axes[-1].set_ylabel("res", rotation=0, ha="right")
    axes[-1].set_xlabel("time (s)")
    if title:
        axes[0].set_title(title)
    fig.tight_layout()
    _save_svg(fig, path)


def plot_sweep(rows, path):
    """Corpus-mean ECM for each grid point."""
    agg = [r for r in rows if r.status == "aggregate" and r.ecm is not None]
    fig, ax = plt.subplots(figsize=(max(5, 0.9 * len(agg) + 2), 4))
    labels = []
    for r in agg:
        parts = [r.method]
        if r.nr is not None:
            parts.append(f"NR={r.nr}")
        if r.nstd is not None:
            parts.append(f"Nstd={r.nstd:g}")
        parts.append(f"it={r.max_iter}")
        labels.append("\n".join(parts))
    ax.plot(range(len(agg)), [r.ecm for r in agg], "o-")
    ax.set_xticks(range(len(agg)))
    ax.set_xticklabels(labels, fontsize=7)
    if agg and all(r.ecm > 0 for r in agg):
        ax.set_yscale("log")
    ax.set_ylabel("ECM (corpus mean)")
    fig.tight_layout()
    _save_svg(fig, path)
