"""Dependency-distance and crossing measurements.

Per-tree functions are deliberately plain O(E) / O(E^2) scans; they are
the reference against which the vectorized batch versions are tested.

Crossing conventions, with arcs normalized to (lo, hi), lo < hi:
  type-I  - two arcs with all four endpoints distinct and interleaved,
            lo_a < lo_b < hi_a < hi_b (counted once per unordered pair);
  type-II - an arc with lo < root < hi (the root is not an endpoint),
            counted per arc.
A tree is continuous iff both counts are zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .model import ChunkedTree, DepTree, MetricsRecord

__all__ = [
    "mdd_plain",
    "mdd_chunked",
    "count_type1",
    "count_type2",
    "is_continuous",
    "measure",
    "pearson",
    "aggregate",
    "Aggregate",
    "batch_mdd",
    "batch_crossings",
    "DegenerateSentenceError",
    "ZeroVarianceError",
    "LengthMismatchError",
    "EmptyInputError",
]


class DegenerateSentenceError(ValueError):
    """MDD is undefined for a single-node sentence (zero edges)."""


class ZeroVarianceError(ValueError):
    pass


class LengthMismatchError(ValueError):
    pass


class EmptyInputError(ValueError):
    pass


def mdd_plain(tree: DepTree) -> float:
    """Mean dependency distance: mean absolute governor-dependent offset."""
    if tree.n < 2:
        raise DegenerateSentenceError("MDD undefined for n=1")
    total = sum(abs(dep - gov) for dep, gov in tree.edges())
    return total / (tree.n - 1)


def mdd_chunked(ct: ChunkedTree) -> float:
    """Chunk-decomposed MDD: per-chunk internal distance sums plus the
    head-to-governor distance of each non-root chunk (0 for the root
    chunk). Always equals mdd_plain on the underlying tree; the
    decomposition only reorders the same n-1 edge distances.
    """
    tree = ct.tree
    if tree.n < 2:
        raise DegenerateSentenceError("MDD undefined for n=1")
    part = ct.partition
    span_index = {}
    for i, (lo, hi) in enumerate(part.spans, start=1):
        for p in range(lo, hi + 1):
            span_index[p] = i
    cdd = [0] * part.k
    for dep, gov in tree.edges():
        ci, cj = span_index[gov], span_index[dep]
        if ci == cj:
            cdd[ci - 1] += abs(dep - gov)
    total = 0.0
    for i in range(part.k):
        ldd = 0 if ct.chunk_parent[i] == 0 else abs(ct.chunk_heads[i] - ct.attach_node[i])
        total += cdd[i] + ldd
    return total / (tree.n - 1)


def _norm_edges(tree: DepTree) -> list[tuple[int, int]]:
    return [(dep, gov) if dep < gov else (gov, dep) for dep, gov in tree.edges()]


def count_type1(tree: DepTree) -> int:
    """Number of interleaved arc pairs (pairwise O(E^2) scan)."""
    edges = _norm_edges(tree)
    count = 0
    m = len(edges)
    for a in range(m):
        lo_a, hi_a = edges[a]
        for b in range(a + 1, m):
            lo_b, hi_b = edges[b]
            if lo_a < lo_b < hi_a < hi_b or lo_b < lo_a < hi_b < hi_a:
                count += 1
    return count


def count_type2(tree: DepTree) -> int:
    """Number of arcs strictly spanning the root position."""
    r = tree.root
    return sum(1 for lo, hi in _norm_edges(tree) if lo < r < hi)


def is_continuous(tree: DepTree) -> bool:
    return count_type2(tree) == 0 and count_type1(tree) == 0


def measure(tree: DepTree) -> MetricsRecord:
    """Bundle all per-tree measurements; mdd is None for n=1."""
    t1 = count_type1(tree)
    t2 = count_type2(tree)
    mdd = mdd_plain(tree) if tree.n >= 2 else None
    return MetricsRecord(n=tree.n, mdd=mdd, type1=t1, type2=t2,
                         continuous=(t1 == 0 and t2 == 0))


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample Pearson correlation coefficient."""
    if len(xs) != len(ys):
        raise LengthMismatchError(f"lengths differ: {len(xs)} vs {len(ys)}")
    n = len(xs)
    if n < 2:
        raise ZeroVarianceError("need at least two points")
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    sxy = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    sxx = math.fsum((x - mx) ** 2 for x in xs)
    syy = math.fsum((y - my) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise ZeroVarianceError("an argument has zero variance")
    return sxy / math.sqrt(sxx * syy)


@dataclass(frozen=True)
class Aggregate:
    count: int
    mean: float
    sd: float
    min: float
    max: float


def aggregate(values: Sequence[float]) -> Aggregate:
    """count/mean/sd/min/max with the (count-1) sd denominator."""
    if len(values) == 0:
        raise EmptyInputError("no values to aggregate")
    n = len(values)
    mean = math.fsum(values) / n
    sd = 0.0
    if n > 1:
        sd = math.sqrt(math.fsum((v - mean) ** 2 for v in values) / (n - 1))
    return Aggregate(count=n, mean=mean, sd=sd, min=min(values), max=max(values))


# --- vectorized batch versions (sweep engine hot path) ---

def batch_mdd(heads: np.ndarray) -> np.ndarray:
    """Per-row MDD for a (trees, n) matrix of governor indices (0=root)."""
    n = heads.shape[1]
    if n < 2:
        raise DegenerateSentenceError("MDD undefined for n=1")
    pos = np.arange(1, n + 1, dtype=heads.dtype)
    dist = np.where(heads > 0, np.abs(pos - heads), 0)
    return dist.sum(axis=1, dtype=np.int64) / (n - 1)


def batch_crossings(heads: np.ndarray, block: int = 256) -> tuple[np.ndarray, np.ndarray]:
    """Per-row (type-I, type-II) counts for a (trees, n) governor matrix.

    The root's pseudo-arc is collapsed to (0, 0) so the pairwise test
    ignores it; ordered-pair interleaving counts each crossing once.
    Processed in row blocks to bound the (block, n, n) intermediate.
    """
    trees, n = heads.shape
    pos = np.arange(1, n + 1, dtype=heads.dtype)
    lo = np.minimum(pos, heads)
    hi = np.maximum(pos, heads)
    is_root = heads == 0
    hi = np.where(is_root, 0, hi)          # root arc becomes (0, 0)
    roots = pos[np.argmax(is_root, axis=1)]

    type2 = ((lo < roots[:, None]) & (roots[:, None] < hi)).sum(axis=1)

    type1 = np.empty(trees, dtype=np.int64)
    for start in range(0, trees, block):
        sl = slice(start, min(start + block, trees))
        lo_a = lo[sl, :, None]
        hi_a = hi[sl, :, None]
        lo_b = lo[sl, None, :]
        hi_b = hi[sl, None, :]
        cross = (lo_a < lo_b) & (lo_b < hi_a) & (hi_a < hi_b)
        type1[sl] = cross.sum(axis=(1, 2))
    return type1, type2.astype(np.int64)
