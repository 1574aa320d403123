"""Monte Carlo sweep orchestration and result tables.

Every sweep is a list of independent cells (family, n, chunk mode, chunk
parameter). Cell i draws from RngStream(master_seed, i), so results
depend only on the master seed and the cell's position in the canonical
cell list, never on worker count or scheduling. Tables serialize with a
fixed header and row order; rerunning a sweep with the same master seed
yields byte-identical CSV.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from multiprocessing import Pool
from typing import Iterable, Sequence

import numpy as np

from . import __version__ as _version
from .generate import FAMILIES, ChunkConfig, gen_family
from .metrics import batch_crossings, batch_mdd, pearson
from .model import RngStream, SweepRow

__all__ = [
    "ExperimentConfig",
    "Cell",
    "run_cell",
    "run_cells",
    "sweep_lengths",
    "sweep_chunks",
    "sweep_crossings",
    "optimal_chunk_curve",
    "correlation_report",
    "emit_table",
    "parse_table",
    "CSV_HEADER",
    "MissingCellError",
]

CSV_HEADER = "family,n,chunk_mode,chunk_param,replicates,mean_mdd,sd_mdd,mean_type1,mean_type2"

DEFAULT_REPLICATES = 5000
DEFAULT_LENGTHS = tuple(range(2, 101))
FIG4_LENGTHS = (2, 4, 8, 16, 32, 64)
FIG4_SIZES = tuple(range(1, 65))
CROSSING_N = 23


class MissingCellError(KeyError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    master_seed: int
    replicates: int = DEFAULT_REPLICATES
    lengths: tuple[int, ...] = DEFAULT_LENGTHS
    families: tuple[str, ...] = FAMILIES
    chunk_min: int = 1           # lower bound for random_max cells
    jobs: int = 1

    def __post_init__(self):
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if any(n < 2 for n in self.lengths):
            raise ValueError("lengths must be >= 2")
        for f in self.families:
            if f not in FAMILIES:
                raise ValueError(f"unknown family {f!r}")


@dataclass(frozen=True)
class Cell:
    family: str
    n: int
    chunk_mode: str              # none | random_max | fixed
    chunk_param: int | None
    chunk_min: int = 1           # lower size bound in random_max mode

    def chunk_config(self) -> ChunkConfig | None:
        if self.chunk_mode == "none":
            return None
        if self.chunk_mode == "fixed":
            return ChunkConfig.fixed(self.chunk_param)
        return ChunkConfig.random(self.chunk_min, self.chunk_param)


def run_cell(cell: Cell, replicates: int, master_seed: int,
             stream_id: int) -> SweepRow:
    """Generate `replicates` trees for one cell and aggregate the metrics."""
    rng = RngStream(master_seed, stream_id)
    cfg = cell.chunk_config()
    n = cell.n
    heads = np.zeros((replicates, n), dtype=np.int16)
    for i in range(replicates):
        heads[i] = gen_family(cell.family, n, cfg, rng).heads
    mdd = batch_mdd(heads)
    t1, t2 = batch_crossings(heads)
    sd = float(np.std(mdd, ddof=1)) if replicates > 1 else 0.0
    return SweepRow(
        family=cell.family, n=n, chunk_mode=cell.chunk_mode,
        chunk_param=cell.chunk_param, replicates=replicates,
        mean_mdd=float(mdd.mean()), sd_mdd=sd,
        mean_type1=float(t1.mean()), mean_type2=float(t2.mean()),
    )


def _run_indexed(args: tuple[Cell, int, int, int]) -> SweepRow:
    return run_cell(*args)


def run_cells(cells: Sequence[Cell], replicates: int, master_seed: int,
              jobs: int = 1) -> list[SweepRow]:
    """Run cells in order; cell i uses stream id i regardless of jobs."""
    tasks = [(cell, replicates, master_seed, i) for i, cell in enumerate(cells)]
    if jobs <= 1 or len(cells) <= 1:
        return [run_cell(*t) for t in tasks]
    with Pool(processes=jobs) as pool:
        return list(pool.map(_run_indexed, tasks, chunksize=1))


def sweep_lengths(cfg: ExperimentConfig) -> list[SweepRow]:
    """MDD/crossings against sentence length for each family; RL3/RL4
    chunk sizes drawn from [chunk_min, n] at each length."""
    cells = []
    for fam in sorted(cfg.families):
        for n in cfg.lengths:
            if fam in ("RL3", "RL4"):
                cells.append(Cell(family=fam, n=n, chunk_mode="random_max",
                                  chunk_param=n, chunk_min=min(cfg.chunk_min, n)))
            else:
                cells.append(Cell(family=fam, n=n, chunk_mode="none", chunk_param=None))
    return run_cells(cells, cfg.replicates, cfg.master_seed, cfg.jobs)


def sweep_chunks(cfg: ExperimentConfig, mode: str,
                 lengths: Sequence[int] = FIG4_LENGTHS,
                 sizes: Sequence[int] = FIG4_SIZES) -> list[SweepRow]:
    """Mean MDD over a (sentence length, chunk size) grid for family RL3.

    mode 'random_max': sizes drawn from [1, s]; mode 'fixed': every chunk
    exactly s. Cells with s > n are skipped.
    """
    if mode not in ("random_max", "fixed"):
        raise ValueError(f"mode must be random_max or fixed, got {mode!r}")
    cells = [Cell(family="RL3", n=n, chunk_mode=mode, chunk_param=s)
             for n in lengths for s in sizes if s <= n]
    return run_cells(cells, cfg.replicates, cfg.master_seed, cfg.jobs)


def sweep_crossings(cfg: ExperimentConfig, n: int = CROSSING_N,
                    max_sizes: Sequence[int] | None = None) -> list[SweepRow]:
    """Crossing counts against the maximal chunk size at one fixed
    sentence length, plus the unchunked RL1 baseline row."""
    if max_sizes is None:
        max_sizes = range(1, n + 1)
    cells = [Cell(family="RL1", n=n, chunk_mode="none", chunk_param=None)]
    cells += [Cell(family="RL3", n=n, chunk_mode="random_max", chunk_param=s)
              for s in max_sizes if s <= n]
    return run_cells(cells, cfg.replicates, cfg.master_seed, cfg.jobs)


def optimal_chunk_curve(grid: Sequence[SweepRow],
                        lengths: Sequence[int] | None = None) -> list[SweepRow]:
    """Minimal mean MDD over the chunk-size axis, per mode and length.
    Ties go to the smallest size."""
    by_mode: dict[str, dict[int, list[SweepRow]]] = {}
    for row in grid:
        if row.chunk_mode == "none":
            continue
        by_mode.setdefault(row.chunk_mode, {}).setdefault(row.n, []).append(row)
    out = []
    for mode in sorted(by_mode):
        per_n = by_mode[mode]
        wanted = sorted(per_n) if lengths is None else list(lengths)
        for n in wanted:
            rows = per_n.get(n)
            if not rows:
                raise MissingCellError(f"no {mode} cells at n={n}")
            best = min(rows, key=lambda r: (r.mean_mdd, r.chunk_param))
            out.append(best)
    return out


def correlation_report(rows: Sequence[SweepRow], family: str) -> float:
    """Pearson r between sentence length and mean MDD for one family."""
    pts = sorted((r.n, r.mean_mdd) for r in rows if r.family == family)
    return pearson([p[0] for p in pts], [p[1] for p in pts])


# --- serialization ----------------------------------------------------------

def _param_str(p: int | None) -> str:
    return "none" if p is None else str(p)


def _sort_key(row: SweepRow):
    return (row.family, row.n, row.chunk_mode,
            -1 if row.chunk_param is None else row.chunk_param)


def format_rows(rows: Iterable[SweepRow], fmt: str = "csv") -> str:
    ordered = sorted(rows, key=_sort_key)
    if fmt == "csv":
        lines = [CSV_HEADER]
        for r in ordered:
            lines.append(",".join([
                r.family, str(r.n), r.chunk_mode, _param_str(r.chunk_param),
                str(r.replicates), repr(r.mean_mdd), repr(r.sd_mdd),
                repr(r.mean_type1), repr(r.mean_type2)]))
        return "\n".join(lines) + "\n"
    if fmt == "json":
        return json.dumps([r.__dict__ for r in ordered], indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_table(rows: Iterable[SweepRow], fmt: str = "csv",
               path: str | None = None, master_seed: int | None = None,
               replicates: int | None = None) -> str:
    """Serialize rows (deterministic order); write to path when given,
    with a sidecar metadata record alongside."""
    text = format_rows(rows, fmt)
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
        meta = {
            "master_seed": master_seed,
            "replicates": replicates,
            "version": _version,
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        }
        with open(path + ".meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2)
            fh.write("\n")
    return text


def parse_table(source: str) -> list[SweepRow]:
    """Read rows back from CSV text or a CSV file path."""
    if "\n" not in source and os.path.exists(source):
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = source
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CSV_HEADER:
        raise ValueError("missing or unexpected CSV header")
    rows = []
    for ln in lines[1:]:
        f, n, mode, param, reps, mdd, sd, t1, t2 = ln.split(",")
        rows.append(SweepRow(
            family=f, n=int(n), chunk_mode=mode,
            chunk_param=None if param == "none" else int(param),
            replicates=int(reps), mean_mdd=float(mdd), sd_mdd=float(sd),
            mean_type1=float(t1), mean_type2=float(t2)))
    return rows
