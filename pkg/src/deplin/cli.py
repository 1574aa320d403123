"""Command-line front door.

Subcommands: gen, sweep-length, sweep-chunk, sweep-crossings, optimal,
treebank, oracle, plot. Data goes to --out when given, else stdout;
diagnostics always go to stderr. Exit codes: 0 success, 1 usage error,
2 data error. Every subcommand taking --seed is bit-deterministic;
rerunning with a different --jobs value cannot change the output.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .experiments import (
    CROSSING_N,
    DEFAULT_LENGTHS,
    DEFAULT_REPLICATES,
    FIG4_LENGTHS,
    FIG4_SIZES,
    ExperimentConfig,
    emit_table,
    format_rows,
    optimal_chunk_curve,
    parse_table,
    sweep_chunks,
    sweep_crossings,
    sweep_lengths,
)
from .generate import FAMILIES, ChunkConfig, gen_family
from .metrics import measure
from .model import RngStream
from .oracle import MAX_ENUM_N, enumerate_projective_trees, enumerate_rooted_trees
from .treebank import NoUsableSentencesError, corpus_summary, load_conll

USAGE_ERROR = 1
DATA_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):   # argparse defaults to exit code 2
        self.print_usage(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _parse_int_list(spec: str) -> list[int]:
    """Parse '2..100' / '2,4,8' / '2,8..10' into an integer list."""
    out: list[int] = []
    for part in spec.split(","):
        part = part.strip()
        if ".." in part:
            a, b = part.split("..")
            out.extend(range(int(a), int(b) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise ValueError(f"empty length list {spec!r}")
    return out


def _jobs(args) -> int:
    if args.jobs is not None:
        return args.jobs
    env = os.environ.get("DEPLIN_JOBS")
    return int(env) if env else 1


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)


def _maybe_plot(args, rows, kind: str) -> None:
    if not getattr(args, "plot", False):
        return
    from .plots import plot_table
    fig_path = os.path.splitext(args.out)[0] + ".png"
    plot_table(rows, kind, fig_path)
    print(f"figure written to {fig_path}", file=sys.stderr)


def _add_common(p: argparse.ArgumentParser, seed_required: bool = True) -> None:
    p.add_argument("--seed", type=int, required=seed_required,
                   help="master seed (pins the output exactly)")
    p.add_argument("--replicates", type=int, default=DEFAULT_REPLICATES,
                   help=f"trees per cell (default {DEFAULT_REPLICATES})")
    p.add_argument("--out", help="output table path (stdout when omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--jobs", type=int, default=None,
                   help="worker processes (default $DEPLIN_JOBS or 1)")
    p.add_argument("--plot", action="store_true",
                   help="also render a figure next to --out")


def build_parser() -> _Parser:
    p = _Parser(prog="deplin", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate trees from one family")
    g.add_argument("--family", required=True,
                   choices=[f.lower() for f in FAMILIES] + list(FAMILIES))
    g.add_argument("--n", type=int, required=True, help="sentence length")
    g.add_argument("--min", type=int, default=None, help="min chunk size (rl3/rl4)")
    g.add_argument("--max", type=int, default=None, help="max chunk size (rl3/rl4)")
    g.add_argument("--fixed", type=int, default=None, help="fixed chunk size (rl3/rl4)")
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--count", type=int, default=1, help="number of trees")

    sl = sub.add_parser("sweep-length", help="MDD/crossings vs sentence length")
    sl.add_argument("--lengths", default=None,
                    help="lengths, e.g. 2..100 or 2,5,23 (default 2..100)")
    sl.add_argument("--families", default=None,
                    help="comma list among RL1,RL2,RL3,RL4 (default all)")
    _add_common(sl)

    sc = sub.add_parser("sweep-chunk", help="MDD vs chunk size grid (RL3)")
    sc.add_argument("--mode", required=True, choices=("random", "fixed"))
    sc.add_argument("--lengths", default=None,
                    help="sentence lengths (default 2,4,8,16,32,64)")
    sc.add_argument("--sizes", default=None, help="chunk sizes (default 1..64)")
    _add_common(sc)

    sx = sub.add_parser("sweep-crossings", help="crossings vs max chunk size")
    sx.add_argument("--n", type=int, default=CROSSING_N)
    sx.add_argument("--max-sizes", default=None, help="max sizes (default 1..n)")
    _add_common(sx)

    op = sub.add_parser("optimal", help="minimal-MDD curve from a chunk grid")
    op.add_argument("--in", dest="grid", required=True, help="sweep-chunk CSV")
    op.add_argument("--lengths", default=None, help="lengths to require")
    op.add_argument("--out", help="output table path (stdout when omitted)")
    op.add_argument("--format", choices=("csv", "json"), default="csv")
    op.add_argument("--plot", action="store_true")

    tb = sub.add_parser("treebank", help="summarize a CoNLL treebank")
    tb.add_argument("--in", dest="infile", required=True, help="CoNLL file (.gz ok)")
    tb.add_argument("--skip-punct", action="store_true",
                    help="drop PU/PUNCT tokens before measuring")
    tb.add_argument("--out", help="summary path (stdout when omitted)")
    tb.add_argument("--format", choices=("json", "csv"), default="json")

    orc = sub.add_parser("oracle", help="enumerate all small trees")
    orc.add_argument("--n", type=int, required=True)
    orc.add_argument("--projective", action="store_true",
                     help="continuous trees only")

    pl = sub.add_parser("plot", help="render a sweep CSV to a figure")
    pl.add_argument("--in", dest="grid", required=True, help="sweep CSV path")
    pl.add_argument("--kind", required=True,
                    choices=("length", "chunk", "crossings", "optimal"))
    pl.add_argument("--out", required=True, help="figure path (.png)")
    return p


def _cmd_gen(args) -> int:
    fam = args.family.upper()
    cfg = None
    if fam in ("RL3", "RL4"):
        if args.fixed is not None:
            if args.min is not None or args.max is not None:
                print("deplin gen: --fixed conflicts with --min/--max", file=sys.stderr)
                return USAGE_ERROR
            cfg = ChunkConfig.fixed(args.fixed)
        else:
            lo = 1 if args.min is None else args.min
            hi = args.n if args.max is None else args.max
            cfg = ChunkConfig.random(lo, hi)
    elif args.min is not None or args.max is not None or args.fixed is not None:
        print("deplin gen: chunk flags are only valid for rl3/rl4", file=sys.stderr)
        return USAGE_ERROR
    rng = RngStream(args.seed, 0)
    for _ in range(args.count):
        tree = gen_family(fam, args.n, cfg, rng)
        rec = measure(tree)
        meta = json.dumps({"n": rec.n, "mdd": rec.mdd, "type1": rec.type1,
                           "type2": rec.type2, "continuous": rec.continuous})
        sys.stdout.write(f"{tree.to_head_line()}\t{meta}\n")
    return 0


def _check_plot_flag(args) -> int | None:
    if getattr(args, "plot", False) and not args.out:
        print("deplin: --plot requires --out", file=sys.stderr)
        return USAGE_ERROR
    return None


def _run_sweep(args, rows, kind: str) -> int:
    text = emit_table(rows, fmt=args.format, path=args.out,
                      master_seed=args.seed, replicates=args.replicates)
    _write(text, args.out)
    if args.out:
        print(f"table written to {args.out}", file=sys.stderr)
        _maybe_plot(args, rows, kind)
    return 0


def _cmd_sweep_length(args) -> int:
    if (err := _check_plot_flag(args)) is not None:
        return err
    lengths = tuple(_parse_int_list(args.lengths)) if args.lengths else DEFAULT_LENGTHS
    fams = tuple(f.strip().upper() for f in args.families.split(",")) \
        if args.families else FAMILIES
    cfg = ExperimentConfig(master_seed=args.seed, replicates=args.replicates,
                           lengths=lengths, families=fams, jobs=_jobs(args))
    return _run_sweep(args, sweep_lengths(cfg), "length")


def _cmd_sweep_chunk(args) -> int:
    if (err := _check_plot_flag(args)) is not None:
        return err
    lengths = _parse_int_list(args.lengths) if args.lengths else FIG4_LENGTHS
    sizes = _parse_int_list(args.sizes) if args.sizes else FIG4_SIZES
    mode = "random_max" if args.mode == "random" else "fixed"
    cfg = ExperimentConfig(master_seed=args.seed, replicates=args.replicates,
                           jobs=_jobs(args))
    return _run_sweep(args, sweep_chunks(cfg, mode, lengths, sizes), "chunk")


def _cmd_sweep_crossings(args) -> int:
    if (err := _check_plot_flag(args)) is not None:
        return err
    sizes = _parse_int_list(args.max_sizes) if args.max_sizes else None
    cfg = ExperimentConfig(master_seed=args.seed, replicates=args.replicates,
                           jobs=_jobs(args))
    return _run_sweep(args, sweep_crossings(cfg, n=args.n, max_sizes=sizes),
                      "crossings")


def _cmd_optimal(args) -> int:
    try:
        grid = parse_table(args.grid)
    except (OSError, ValueError) as exc:
        print(f"deplin optimal: cannot read grid {args.grid}: {exc}", file=sys.stderr)
        return DATA_ERROR
    lengths = _parse_int_list(args.lengths) if args.lengths else None
    try:
        rows = optimal_chunk_curve(grid, lengths)
    except KeyError as exc:
        print(f"deplin optimal: {exc}", file=sys.stderr)
        return DATA_ERROR
    text = format_rows(rows, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"table written to {args.out}", file=sys.stderr)
        if args.plot:
            from .plots import plot_table
            fig = os.path.splitext(args.out)[0] + ".png"
            plot_table(rows, "optimal", fig)
            print(f"figure written to {fig}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_treebank(args) -> int:
    try:
        records, issues = load_conll(args.infile, skip_punct=args.skip_punct)
    except OSError as exc:
        print(f"deplin treebank: cannot read {args.infile}: {exc}", file=sys.stderr)
        return DATA_ERROR
    for issue in issues:
        print(f"{args.infile}:{issue.line}: skipped sentence: {issue.message}",
              file=sys.stderr)
    try:
        summary = corpus_summary(records)
    except NoUsableSentencesError as exc:
        print(f"deplin treebank: {args.infile}: {exc}", file=sys.stderr)
        return DATA_ERROR
    text = summary.to_json() + "\n" if args.format == "json" else summary.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"summary written to {args.out}", file=sys.stderr)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_oracle(args) -> int:
    if not 1 <= args.n <= MAX_ENUM_N:
        print(f"deplin oracle: --n must be in 1..{MAX_ENUM_N}", file=sys.stderr)
        return USAGE_ERROR
    trees = enumerate_projective_trees(args.n) if args.projective \
        else enumerate_rooted_trees(args.n)
    for t in trees:
        sys.stdout.write(t.to_head_line() + "\n")
    kind = "continuous trees" if args.projective else "rooted trees"
    sys.stdout.write(f"# count: {len(trees)} {kind} on {args.n} nodes\n")
    return 0


def _cmd_plot(args) -> int:
    from .plots import plot_table
    try:
        rows = parse_table(args.grid)
    except (OSError, ValueError) as exc:
        print(f"deplin plot: cannot read {args.grid}: {exc}", file=sys.stderr)
        return DATA_ERROR
    plot_table(rows, args.kind, args.out)
    print(f"figure written to {args.out}", file=sys.stderr)
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "sweep-length": _cmd_sweep_length,
    "sweep-chunk": _cmd_sweep_chunk,
    "sweep-crossings": _cmd_sweep_crossings,
    "optimal": _cmd_optimal,
    "treebank": _cmd_treebank,
    "oracle": _cmd_oracle,
    "plot": _cmd_plot,
}


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return _COMMANDS[args.command](args)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
