import json

import pytest

from deplin.cli import build_parser, run
from deplin.model import parse_head_line
from deplin.metrics import is_continuous


def run_cli(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_rl2_all_continuous(capsys):
    code, out, _ = run_cli(capsys, "gen", "--family", "rl2", "--n", "3",
                           "--seed", "7", "--count", "100")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 100
    for line in lines:
        head_part, meta_part = line.split("\t")
        tree = parse_head_line(head_part)
        meta = json.loads(meta_part)
        assert is_continuous(tree)
        assert meta["continuous"] is True and meta["n"] == 3


def test_gen_deterministic(capsys):
    a = run_cli(capsys, "gen", "--family", "rl4", "--n", "12", "--min", "2",
                "--max", "5", "--seed", "3", "--count", "5")
    b = run_cli(capsys, "gen", "--family", "rl4", "--n", "12", "--min", "2",
                "--max", "5", "--seed", "3", "--count", "5")
    assert a == b and a[0] == 0


def test_gen_fixed_conflicts_with_min_max(capsys):
    code, _, err = run_cli(capsys, "gen", "--family", "rl3", "--n", "8",
                           "--fixed", "2", "--min", "1", "--seed", "0")
    assert code == 1
    assert "--fixed" in err


def test_gen_chunk_flags_rejected_for_rl1(capsys):
    code, _, err = run_cli(capsys, "gen", "--family", "rl1", "--n", "8",
                           "--max", "4", "--seed", "0")
    assert code == 1


def test_oracle_projective_count(capsys):
    code, out, _ = run_cli(capsys, "oracle", "--n", "3", "--projective")
    assert code == 0
    lines = out.strip().splitlines()
    assert len([ln for ln in lines if not ln.startswith("#")]) == 7
    assert lines[-1].startswith("# count: 7")


def test_oracle_too_large_is_usage_error(capsys):
    code, _, err = run_cli(capsys, "oracle", "--n", "9")
    assert code == 1
    assert "--n" in err


def test_unknown_flag_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["oracle", "--n", "3", "--frobnicate"])
    assert exc.value.code == 1


def test_missing_subcommand_exits_1(capsys):
    with pytest.raises(SystemExit) as exc:
        run([])
    assert exc.value.code == 1


def test_sweep_crossings_rerun_identical(tmp_path, capsys):
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for out in (out1, out2):
        code, _, _ = run_cli(capsys, "sweep-crossings", "--n", "6",
                             "--replicates", "40", "--seed", "1",
                             "--out", str(out))
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_jobs_does_not_change_bytes(tmp_path, capsys):
    out1, out2 = tmp_path / "j1.csv", tmp_path / "j2.csv"
    base = ["sweep-length", "--lengths", "2,5,8", "--families", "RL1,RL3",
            "--replicates", "30", "--seed", "9"]
    assert run_cli(capsys, *base, "--out", str(out1), "--jobs", "1")[0] == 0
    assert run_cli(capsys, *base, "--out", str(out2), "--jobs", "2")[0] == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_stdout_when_out_omitted(capsys):
    code, out, _ = run_cli(capsys, "sweep-crossings", "--n", "4",
                           "--replicates", "10", "--seed", "2")
    assert code == 0
    assert out.startswith("family,n,chunk_mode,")
    assert "RL3" in out


def test_deplin_jobs_env_fallback(tmp_path, capsys, monkeypatch):
    base = ["sweep-length", "--lengths", "2,4", "--families", "RL1",
            "--replicates", "20", "--seed", "6"]
    p1, p2 = tmp_path / "env.csv", tmp_path / "flag.csv"
    monkeypatch.setenv("DEPLIN_JOBS", "2")
    assert run_cli(capsys, *base, "--out", str(p1))[0] == 0
    monkeypatch.delenv("DEPLIN_JOBS")
    assert run_cli(capsys, *base, "--out", str(p2), "--jobs", "1")[0] == 0
    assert p1.read_bytes() == p2.read_bytes()


def test_sweep_chunk_then_optimal(tmp_path, capsys):
    grid = tmp_path / "grid.csv"
    code, _, _ = run_cli(capsys, "sweep-chunk", "--mode", "fixed",
                         "--lengths", "6", "--sizes", "1..6",
                         "--replicates", "60", "--seed", "4",
                         "--out", str(grid))
    assert code == 0
    code, out, _ = run_cli(capsys, "optimal", "--in", str(grid))
    assert code == 0
    rows = [ln for ln in out.strip().splitlines()[1:]]
    assert len(rows) == 1                      # one mode, one length
    assert rows[0].startswith("RL3,6,fixed,")


def test_optimal_missing_grid_is_data_error(tmp_path, capsys):
    code, _, err = run_cli(capsys, "optimal", "--in", str(tmp_path / "nope.csv"))
    assert code == 2


def test_treebank_summary(tmp_path, capsys):
    conll = tmp_path / "tiny.conll"
    conll.write_text(
        "1\tI\t_\tPN\tPN\t_\t2\t_\t_\t_\n"
        "2\tlike\t_\tV\tV\t_\t0\t_\t_\t_\n"
        "3\tred\t_\tA\tA\t_\t4\t_\t_\t_\n"
        "4\tapple\t_\tN\tN\t_\t2\t_\t_\t_\n"
        "\n")
    code, out, _ = run_cli(capsys, "treebank", "--in", str(conll))
    assert code == 0
    summary = json.loads(out)
    assert summary["sentence_count"] == 1
    assert summary["mdd_pooled"] == pytest.approx(4 / 3)

    code, out, _ = run_cli(capsys, "treebank", "--in", str(conll),
                           "--format", "csv")
    assert code == 0
    assert out.splitlines()[0].startswith("sentence_count,")


def test_treebank_missing_file_is_data_error(capsys):
    code, _, err = run_cli(capsys, "treebank", "--in", "/nonexistent.conll")
    assert code == 2
    assert "nonexistent" in err


def test_treebank_diagnostics_on_stderr(tmp_path, capsys):
    conll = tmp_path / "bad.conll"
    conll.write_text(
        "1\tw\t_\tN\tN\t_\tx\t_\t_\t_\n"
        "\n"
        "1\tw\t_\tN\tN\t_\t0\t_\t_\t_\n"
        "2\tv\t_\tN\tN\t_\t1\t_\t_\t_\n"
        "\n")
    code, out, err = run_cli(capsys, "treebank", "--in", str(conll))
    assert code == 0
    assert "skipped sentence" in err
    assert json.loads(out)["sentence_count"] == 1


def test_plot_flag_writes_figure(tmp_path, capsys):
    out = tmp_path / "cross.csv"
    code, _, err = run_cli(capsys, "sweep-crossings", "--n", "5",
                           "--replicates", "20", "--seed", "3",
                           "--out", str(out), "--plot")
    assert code == 0
    assert (tmp_path / "cross.png").exists()


def test_plot_requires_out(capsys):
    code, _, err = run_cli(capsys, "sweep-crossings", "--n", "5",
                           "--replicates", "20", "--seed", "3", "--plot")
    assert code == 1
    assert "--plot" in err


def test_plot_subcommand(tmp_path, capsys):
    grid = tmp_path / "grid.csv"
    run_cli(capsys, "sweep-chunk", "--mode", "random", "--lengths", "4",
            "--sizes", "1..4", "--replicates", "30", "--seed", "5",
            "--out", str(grid))
    fig = tmp_path / "fig.png"
    code, _, _ = run_cli(capsys, "plot", "--in", str(grid), "--kind", "chunk",
                         "--out", str(fig))
    assert code == 0
    assert fig.exists() and fig.stat().st_size > 0


def test_help_lists_all_documented_flags(capsys):
    parser = build_parser()
    help_by_cmd = {
        "gen": ["--family", "--n", "--min", "--max", "--fixed", "--seed", "--count"],
        "sweep-length": ["--lengths", "--replicates", "--seed", "--out", "--jobs", "--plot"],
        "sweep-chunk": ["--mode", "--lengths", "--sizes", "--seed", "--out"],
        "sweep-crossings": ["--n", "--max-sizes", "--seed", "--out"],
        "optimal": ["--in", "--out"],
        "treebank": ["--in", "--skip-punct", "--out"],
        "oracle": ["--n", "--projective"],
    }
    subparsers = parser._subparsers._group_actions[0].choices
    for cmd, flags in help_by_cmd.items():
        text = subparsers[cmd].format_help()
        for flag in flags:
            assert flag in text, f"{cmd} help is missing {flag}"
