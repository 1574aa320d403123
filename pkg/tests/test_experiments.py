import json
import os

import pytest

from deplin.experiments import (
    CSV_HEADER,
    Cell,
    ExperimentConfig,
    MissingCellError,
    correlation_report,
    emit_table,
    format_rows,
    optimal_chunk_curve,
    parse_table,
    run_cell,
    run_cells,
    sweep_chunks,
    sweep_crossings,
    sweep_lengths,
)
from deplin.metrics import ZeroVarianceError
from deplin.model import SweepRow


def small_cfg(**kw):
    kw.setdefault("master_seed", 7)
    kw.setdefault("replicates", 60)
    kw.setdefault("lengths", (2, 5, 9, 16))
    return ExperimentConfig(**kw)


def test_run_cell_deterministic():
    cell = Cell(family="RL3", n=12, chunk_mode="random_max", chunk_param=4)
    a = run_cell(cell, 40, master_seed=3, stream_id=5)
    b = run_cell(cell, 40, master_seed=3, stream_id=5)
    assert a == b
    c = run_cell(cell, 40, master_seed=3, stream_id=6)
    assert c != a


def test_run_cells_jobs_invariant():
    cells = [Cell("RL1", n, "none", None) for n in (4, 7, 10, 13)]
    seq = run_cells(cells, 30, master_seed=11, jobs=1)
    par = run_cells(cells, 30, master_seed=11, jobs=2)
    assert seq == par


def test_sweep_lengths_families_and_order():
    rows = sweep_lengths(small_cfg(families=("RL2", "RL1")))
    fams = [r.family for r in rows]
    assert fams == ["RL1"] * 4 + ["RL2"] * 4        # canonical family order
    assert [r.n for r in rows[:4]] == [2, 5, 9, 16]
    assert all(r.chunk_mode == "none" and r.chunk_param is None for r in rows)


def test_sweep_lengths_chunked_families_use_full_interval():
    rows = sweep_lengths(small_cfg(families=("RL3",), lengths=(6, 9)))
    assert [(r.n, r.chunk_param, r.chunk_mode) for r in rows] == \
        [(6, 6, "random_max"), (9, 9, "random_max")]


def test_sweep_chunks_skips_oversized_cells():
    rows = sweep_chunks(small_cfg(), "fixed", lengths=(4, 8), sizes=(2, 4, 6))
    assert [(r.n, r.chunk_param) for r in rows] == \
        [(4, 2), (4, 4), (8, 2), (8, 4), (8, 6)]
    assert all(r.chunk_mode == "fixed" for r in rows)


def test_sweep_chunks_rejects_unknown_mode():
    with pytest.raises(ValueError):
        sweep_chunks(small_cfg(), "sometimes")


def test_sweep_crossings_has_baseline_row():
    rows = sweep_crossings(small_cfg(), n=6, max_sizes=(1, 3, 6))
    assert rows[0].family == "RL1" and rows[0].chunk_mode == "none"
    assert [(r.family, r.chunk_param) for r in rows[1:]] == \
        [("RL3", 1), ("RL3", 3), ("RL3", 6)]
    assert all(r.n == 6 for r in rows)


def test_experiment_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig(master_seed=1, replicates=0)
    with pytest.raises(ValueError):
        ExperimentConfig(master_seed=1, lengths=(1, 5))
    with pytest.raises(ValueError):
        ExperimentConfig(master_seed=1, families=("RL7",))


# --- optimal curve -----------------------------------------------------------

def row(n, param, mdd, mode="random_max"):
    return SweepRow(family="RL3", n=n, chunk_mode=mode, chunk_param=param,
                    replicates=10, mean_mdd=mdd, sd_mdd=0.0,
                    mean_type1=0.0, mean_type2=0.0)


def test_optimal_curve_picks_minimum():
    grid = [row(8, 1, 3.0), row(8, 2, 2.0), row(8, 4, 2.5),
            row(16, 1, 5.0), row(16, 4, 4.0)]
    out = optimal_chunk_curve(grid)
    assert [(r.n, r.chunk_param, r.mean_mdd) for r in out] == \
        [(8, 2, 2.0), (16, 4, 4.0)]


def test_optimal_curve_tie_breaks_to_smaller_size():
    grid = [row(8, 5, 2.0), row(8, 2, 2.0)]
    assert optimal_chunk_curve(grid)[0].chunk_param == 2


def test_optimal_curve_missing_cell():
    grid = [row(8, 1, 3.0)]
    with pytest.raises(MissingCellError):
        optimal_chunk_curve(grid, lengths=(8, 12))


def test_optimal_curve_ignores_baseline_rows():
    grid = [SweepRow("RL1", 8, "none", None, 10, 9.0, 0.0, 0.0, 0.0),
            row(8, 2, 2.0)]
    out = optimal_chunk_curve(grid)
    assert len(out) == 1 and out[0].chunk_param == 2


def test_optimal_curve_separates_modes():
    grid = [row(8, 2, 2.0), row(8, 3, 1.5, mode="fixed")]
    out = optimal_chunk_curve(grid)
    assert [(r.chunk_mode, r.mean_mdd) for r in out] == \
        [("fixed", 1.5), ("random_max", 2.0)]


# --- correlation -------------------------------------------------------------

def test_correlation_report_monotone_family():
    rows = [SweepRow("RL1", n, "none", None, 5, (n + 1) / 3, 0.1, 0.0, 0.0)
            for n in range(2, 30)]
    assert correlation_report(rows, "RL1") == pytest.approx(1.0, abs=1e-9)


def test_correlation_report_zero_variance():
    rows = [SweepRow("RL1", n, "none", None, 5, 4.0, 0.1, 0.0, 0.0)
            for n in (2, 3, 4)]
    with pytest.raises(ZeroVarianceError):
        correlation_report(rows, "RL1")


def test_mean_mdd_family_ordering_rl1_rl3_rl2():
    cfg = ExperimentConfig(master_seed=99, replicates=400, lengths=(16,))
    rows = {r.family: r for r in sweep_lengths(cfg)}
    assert rows["RL1"].mean_mdd > rows["RL3"].mean_mdd > rows["RL2"].mean_mdd


# --- serialization -----------------------------------------------------------

def test_emit_header_only_for_empty():
    assert format_rows([], "csv") == CSV_HEADER + "\n"


def test_emit_rows_sorted_and_round_trip(tmp_path):
    rows = [row(16, 4, 4.25), row(8, 2, 2.125),
            SweepRow("RL1", 8, "none", None, 10, 3.5, 0.5, 1.25, 0.5)]
    path = tmp_path / "t.csv"
    emit_table(rows, "csv", str(path), master_seed=5, replicates=10)
    back = parse_table(str(path))
    assert back == sorted(rows, key=lambda r: (r.family, r.n, r.chunk_mode,
                                               -1 if r.chunk_param is None else r.chunk_param))
    meta = json.loads((tmp_path / "t.csv.meta.json").read_text())
    assert meta["master_seed"] == 5 and meta["replicates"] == 10
    assert "version" in meta and "timestamp" in meta


def test_emit_json_format():
    rows = [row(8, 2, 2.0)]
    data = json.loads(format_rows(rows, "json"))
    assert data[0]["family"] == "RL3" and data[0]["chunk_param"] == 2


def test_parse_table_rejects_garbage():
    with pytest.raises(ValueError):
        parse_table("not,a,header\n1,2,3\n")


def test_emitted_bytes_stable_across_reruns(tmp_path):
    cfg = small_cfg(lengths=(4, 9), families=("RL1", "RL3"))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_table(sweep_lengths(cfg), "csv", str(p1), master_seed=7, replicates=60)
    emit_table(sweep_lengths(cfg), "csv", str(p2), master_seed=7, replicates=60)
    assert p1.read_bytes() == p2.read_bytes()
