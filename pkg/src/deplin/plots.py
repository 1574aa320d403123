"""Render sweep tables to figure files.

Each sweep's CSV has a natural picture; these helpers draw it with
matplotlib (Agg backend, file output only) so a report run can drop a
PNG next to the delimited table. Reference constants for the natural
language baseline: mean sentence length 23, MDD 3.79.
"""

from __future__ import annotations

from collections import defaultdict
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .model import SweepRow

__all__ = [
    "plot_length_sweep",
    "plot_chunk_sweep",
    "plot_crossing_sweep",
    "plot_optimal_curve",
    "plot_table",
    "NL_MEAN_SL",
    "NL_MDD",
]

NL_MEAN_SL = 23
NL_MDD = 3.79

_FAMILY_STYLE = {
    "RL1": dict(color="tab:red", marker=""),
    "RL2": dict(color="tab:green", marker=""),
    "RL3": dict(color="tab:blue", marker=""),
    "RL4": dict(color="tab:purple", marker=""),
}


def _save(fig, path: str) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def plot_length_sweep(rows: Sequence[SweepRow], path: str) -> None:
    """Mean MDD against sentence length, one line per family."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    by_fam = defaultdict(list)
    for r in rows:
        by_fam[r.family].append((r.n, r.mean_mdd))
    for fam in sorted(by_fam):
        pts = sorted(by_fam[fam])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=fam,
                **_FAMILY_STYLE.get(fam, {}))
    ax.axvline(NL_MEAN_SL, color="gray", lw=0.8, ls="--")
    ax.axhline(NL_MDD, color="gray", lw=0.8, ls="--")
    ax.text(NL_MEAN_SL, ax.get_ylim()[1], " NL mean SL", va="top", fontsize=8, color="gray")
    ax.text(ax.get_xlim()[1], NL_MDD, "NL MDD ", ha="right", va="bottom", fontsize=8, color="gray")
    ax.set_xlabel("sentence length")
    ax.set_ylabel("mean MDD")
    ax.legend()
    _save(fig, path)


def plot_chunk_sweep(rows: Sequence[SweepRow], path: str) -> None:
    """Mean MDD against chunk size, one line per sentence length."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    by_len = defaultdict(list)
    for r in rows:
        if r.chunk_param is not None:
            by_len[r.n].append((r.chunk_param, r.mean_mdd))
    for n in sorted(by_len):
        pts = sorted(by_len[n])
        ax.plot([p[0] for p in pts], [p[1] for p in pts], label=f"SL{n}")
    modes = {r.chunk_mode for r in rows}
    ax.set_xlabel("max chunk size" if "random_max" in modes else "chunk size")
    ax.set_ylabel("mean MDD")
    ax.legend(fontsize=8)
    _save(fig, path)


def plot_crossing_sweep(rows: Sequence[SweepRow], path: str) -> None:
    """Crossing counts against the maximal chunk size; the unchunked
    baseline row becomes horizontal reference lines."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    base = [r for r in rows if r.chunk_mode == "none"]
    grid = sorted((r.chunk_param, r) for r in rows if r.chunk_param is not None)
    xs = [s for s, _ in grid]
    ax.plot(xs, [r.mean_type1 for _, r in grid], label="type-I", color="tab:blue")
    ax.plot(xs, [r.mean_type2 for _, r in grid], label="type-II", color="tab:orange")
    for b in base:
        ax.axhline(b.mean_type1, color="tab:blue", lw=0.8, ls=":")
        ax.axhline(b.mean_type2, color="tab:orange", lw=0.8, ls=":")
    ax.set_xlabel("max chunk size")
    ax.set_ylabel("mean crossings per tree")
    ax.legend()
    _save(fig, path)


def plot_optimal_curve(rows: Sequence[SweepRow], path: str) -> None:
    """Minimal mean MDD against sentence length, one line per chunk mode."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    by_mode = defaultdict(list)
    for r in rows:
        by_mode[r.chunk_mode].append((r.n, r.mean_mdd))
    label = {"random_max": "RL3, best max size",
             "fixed": "RL3, best fixed size"}
    for mode in sorted(by_mode):
        pts = sorted(by_mode[mode])
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                label=label.get(mode, mode))
    ax.axhline(NL_MDD, color="gray", lw=0.8, ls="--")
    ax.set_xlabel("sentence length")
    ax.set_ylabel("minimal mean MDD")
    ax.legend()
    _save(fig, path)


_KINDS = {
    "length": plot_length_sweep,
    "chunk": plot_chunk_sweep,
    "crossings": plot_crossing_sweep,
    "optimal": plot_optimal_curve,
}


def plot_table(rows: Sequence[SweepRow], kind: str, path: str) -> None:
    try:
        _KINDS[kind](rows, path)
    except KeyError:
        raise ValueError(f"unknown plot kind {kind!r} (one of {sorted(_KINDS)})")
