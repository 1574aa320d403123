"""CoNLL treebank ingestion and natural-language baseline statistics.

Accepts CoNLL-X / CoNLL-U style input: blank-line separated sentences,
tab-separated token lines with the token index in column 1, the word
form in column 2, POS tags in columns 4-5 and the governor index in
column 7 (0 = root). Comment lines, multiword ranges ("3-4") and empty
nodes ("3.1") are skipped. A sentence that does not validate as a tree
is recorded as an issue and skipped; parsing never aborts on bad data.
"""

from __future__ import annotations

import gzip
import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

from .metrics import ZeroVarianceError, count_type1, count_type2, pearson
from .model import DepTree, TreeValidationError, validate_tree

__all__ = [
    "SentenceRecord",
    "CorpusSummary",
    "ParseIssue",
    "parse_conll",
    "load_conll",
    "corpus_summary",
    "NoUsableSentencesError",
]

_PUNCT_TAGS = {"PU", "PUNCT"}
_SKIPPED_ID = re.compile(r"\d+-\d+$|\d+\.\d+$")   # multiword range / empty node


class NoUsableSentencesError(ValueError):
    pass


@dataclass(frozen=True)
class SentenceRecord:
    tokens: tuple[str, ...]
    tree: DepTree
    source_line: int        # 1-based line number of the first token line


@dataclass(frozen=True)
class ParseIssue:
    line: int
    message: str


@dataclass(frozen=True)
class CorpusSummary:
    sentence_count: int
    token_count: int
    mean_sl: float
    mdd_per_sentence_mean: float
    mdd_pooled: float
    total_type1: int
    total_type2: int
    pearson_sl_mdd: float | None

    def to_json(self) -> str:
        return json.dumps(self.__dict__, indent=2)

    CSV_HEADER = ("sentence_count,token_count,mean_sl,mdd_per_sentence_mean,"
                  "mdd_pooled,total_type1,total_type2,pearson_sl_mdd")

    def to_csv(self) -> str:
        vals = [self.sentence_count, self.token_count, self.mean_sl,
                self.mdd_per_sentence_mean, self.mdd_pooled,
                self.total_type1, self.total_type2,
                "" if self.pearson_sl_mdd is None else self.pearson_sl_mdd]
        return self.CSV_HEADER + "\n" + ",".join(str(v) for v in vals) + "\n"


def _strip_punct(rows: list[tuple[str, int, str, str]]) -> list[tuple[str, int]]:
    """Drop punctuation tokens, reattaching dependents to the nearest kept
    ancestor (0 if the climb ends at the root). rows: (form, head, pos4, pos5).
    """
    drop = [pos4 in _PUNCT_TAGS or pos5 in _PUNCT_TAGS
            for _, _, pos4, pos5 in rows]
    if not any(drop):
        return [(form, head) for form, head, _, _ in rows]
    # climb governors until a kept token (or the root) is reached
    resolved = []
    for _, head, _, _ in rows:
        g = head
        hops = 0
        while g != 0 and drop[g - 1]:
            g = rows[g - 1][1]
            hops += 1
            if hops > len(rows):
                break   # cycle; validation will reject downstream
        resolved.append(g)
    remap = {}
    for old, dead in enumerate(drop, start=1):
        if not dead:
            remap[old] = len(remap) + 1
    kept = []
    for i, (form, _, _, _) in enumerate(rows, start=1):
        if drop[i - 1]:
            continue
        g = resolved[i - 1]
        if g != 0 and drop[g - 1]:
            g = -1            # punctuation cycle; validation rejects it
        kept.append((form, g if g <= 0 else remap[g]))
    return kept


def parse_conll(stream: Iterable[str], skip_punct: bool = False,
                ) -> tuple[list[SentenceRecord], list[ParseIssue]]:
    """Parse a CoNLL text stream into sentence records plus issue reports."""
    records: list[SentenceRecord] = []
    issues: list[ParseIssue] = []
    rows: list[tuple[str, int, str, str]] = []
    first_line = 0
    broken: str | None = None

    def flush(at_line: int) -> None:
        nonlocal rows, broken, first_line
        if broken is not None:
            issues.append(ParseIssue(first_line, broken))
        elif rows:
            try:
                pairs = _strip_punct(rows) if skip_punct else \
                    [(form, head) for form, head, _, _ in rows]
                if pairs:
                    tree = validate_tree([h for _, h in pairs])
                    records.append(SentenceRecord(
                        tokens=tuple(form for form, _ in pairs),
                        tree=tree, source_line=first_line))
                else:
                    issues.append(ParseIssue(first_line, "no tokens left after filtering"))
            except TreeValidationError as exc:
                issues.append(ParseIssue(first_line, f"invalid tree: {exc}"))
        rows = []
        broken = None
        first_line = 0

    lineno = 0
    for lineno, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            flush(lineno)
            continue
        if line.startswith("#"):
            continue
        cols = line.split("\t")
        if not first_line:
            first_line = lineno
        if broken is not None:
            continue
        if _SKIPPED_ID.fullmatch(cols[0]):
            continue
        if len(cols) < 8:
            broken = f"line {lineno}: expected >= 8 columns, got {len(cols)}"
            continue
        try:
            int(cols[0])
            head = int(cols[6])
        except ValueError:
            broken = f"line {lineno}: non-integer id or head ({cols[0]!r}, {cols[6]!r})"
            continue
        rows.append((cols[1], head, cols[3], cols[4]))
    flush(lineno + 1)
    return records, issues


def load_conll(path: str, skip_punct: bool = False,
               ) -> tuple[list[SentenceRecord], list[ParseIssue]]:
    """parse_conll over a file path; .gz handled transparently."""
    opener = gzip.open if path.endswith(".gz") else open
    with opener(path, "rt", encoding="utf-8") as fh:   # type: ignore[operator]
        return parse_conll(fh, skip_punct=skip_punct)


def corpus_summary(records: Sequence[SentenceRecord]) -> CorpusSummary:
    """Whole-corpus statistics. Single-token sentences count toward sizes
    but are excluded from the MDD aggregates and the length correlation."""
    usable = [r for r in records if r.tree.n >= 2]
    if not usable:
        raise NoUsableSentencesError("no sentence with n >= 2")
    sls, mdds = [], []
    total_dist = 0
    total_edges = 0
    t1 = t2 = 0
    for r in records:
        t1 += count_type1(r.tree)
        t2 += count_type2(r.tree)
    for r in usable:
        n = r.tree.n
        dist = sum(abs(d - g) for d, g in r.tree.edges())
        total_dist += dist
        total_edges += n - 1
        sls.append(n)
        mdds.append(dist / (n - 1))
    try:
        corr = pearson(sls, mdds) if len(usable) >= 2 else None
    except ZeroVarianceError:
        corr = None
    token_count = sum(r.tree.n for r in records)
    return CorpusSummary(
        sentence_count=len(records),
        token_count=token_count,
        mean_sl=token_count / len(records),
        mdd_per_sentence_mean=math.fsum(mdds) / len(mdds),
        mdd_pooled=total_dist / total_edges,
        total_type1=t1,
        total_type2=t2,
        pearson_sl_mdd=corr,
    )
