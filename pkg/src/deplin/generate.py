"""Random dependency-tree generators over a fixed linear sequence of nodes.

Four families:
  RL1 - uniformly random rooted labeled tree (sequence-encoded labeled
        tree plus a uniform root choice);
  RL2 - uniformly random continuous (projective, root never covered)
        tree, sampled exactly from the span-counting recurrence;
  RL3 - chunk-segmented tree: random subtree per chunk, random tree over
        chunks, one uniformly drawn attachment node per chunk edge;
  RL4 - as RL3 but every piece continuity-constrained and attachment
        candidates filtered so the whole tree has zero crossings.

All draws go through a single RngStream so a (master_seed, stream_id)
pair pins every output exactly.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .model import (
    ChunkedTree,
    ChunkPartition,
    DepTree,
    RngStream,
    validate_tree,
)

__all__ = [
    "ChunkConfig",
    "gen_random_tree",
    "gen_projective_tree",
    "count_projective",
    "segment_chunks",
    "gen_chunked_tree",
    "gen_chunked_projective_tree",
    "gen_family",
    "FAMILIES",
    "MissingChunkConfigError",
    "RetryExhaustedError",
]

FAMILIES = ("RL1", "RL2", "RL3", "RL4")

_MAX_RETRIES = 1000


class MissingChunkConfigError(ValueError):
    pass


class RetryExhaustedError(RuntimeError):
    """Whole-tree resampling failed repeatedly; indicates a config bug."""


@dataclass(frozen=True)
class ChunkConfig:
    """Chunk-size policy: sizes drawn from [min_size, max_size] per chunk
    (random_max) or every chunk exactly max_size (fixed). The final chunk
    absorbs whatever tail is left, even if shorter than min_size.
    """

    min_size: int
    max_size: int
    mode: str = "random_max"

    @classmethod
    def random(cls, min_size: int, max_size: int) -> "ChunkConfig":
        return cls(min_size=min_size, max_size=max_size, mode="random_max")

    @classmethod
    def fixed(cls, size: int) -> "ChunkConfig":
        return cls(min_size=size, max_size=size, mode="fixed")

    def check(self, n: int) -> None:
        if self.mode not in ("random_max", "fixed"):
            raise ValueError(f"unknown chunk mode {self.mode!r}")
        if not 1 <= self.min_size <= self.max_size <= n:
            raise ValueError(
                f"need 1 <= min_size <= max_size <= n, got "
                f"[{self.min_size}, {self.max_size}] with n={n}")
        if self.mode == "fixed" and self.min_size != self.max_size:
            raise ValueError("fixed mode requires min_size == max_size")


# --- uniform labeled trees -------------------------------------------------

def _decode_tree_sequence(seq: list[int], n: int) -> list[tuple[int, int]]:
    """Decode a label sequence (length n-2, entries 1..n) into the n-1
    edges of the corresponding labeled tree (classic bijection, O(n))."""
    deg = [1] * (n + 1)
    for x in seq:
        deg[x] += 1
    edges = []
    ptr = 1
    while deg[ptr] != 1:
        ptr += 1
    leaf = ptr
    for x in seq:
        edges.append((leaf, x))
        deg[x] -= 1
        if deg[x] == 1 and x < ptr:
            leaf = x
        else:
            ptr += 1
            while deg[ptr] != 1:
                ptr += 1
            leaf = ptr
    edges.append((leaf, n))
    return edges


def _orient_from_root(edges: list[tuple[int, int]], n: int, root: int) -> list[int]:
    """Governor list (1-based positions, 0 at root) for an edge set."""
    adj: list[list[int]] = [[] for _ in range(n + 1)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    heads = [0] * (n + 1)
    seen = bytearray(n + 1)
    seen[root] = 1
    stack = [root]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = 1
                heads[v] = u
                stack.append(v)
    return heads[1:]


def _random_tree_edges(n: int, rng: RngStream) -> list[tuple[int, int]]:
    if n == 1:
        return []
    seq = [rng.randint(1, n) for _ in range(n - 2)]
    return _decode_tree_sequence(seq, n)


def _random_rooted_heads(s: int, rng: RngStream) -> tuple[list[int], int]:
    """Uniform rooted labeled tree on 1..s: uniform edge set, uniform root.
    Draw order: tree sequence first, then the root."""
    if s == 1:
        return [0], 1
    edges = _random_tree_edges(s, rng)
    root = rng.randint(1, s)
    return _orient_from_root(edges, s, root), root


def gen_random_tree(n: int, rng: RngStream) -> DepTree:
    """RL1: uniform over all n^(n-1) rooted labeled trees on 1..n."""
    heads, _ = _random_rooted_heads(n, rng)
    return validate_tree(heads)


# --- continuous (projective) trees ----------------------------------------

# d[l]: attachable continuous trees on l ordered nodes (no arc covers the
# head); ways[s]: forests of consecutive attachable subtrees on s nodes.
# Grown on demand; exact big integers throughout.
_d: list[int] = [1]
_ways: list[int] = [1]
_head_cums: dict[int, list[int]] = {}
_comp_cums: dict[int, list[int]] = {}


def _extend_tables(n: int) -> None:
    while len(_d) <= n:
        l = len(_d)
        _d.append(sum(_ways[h - 1] * _ways[l - h] for h in range(1, l + 1)))
        _ways.append(sum(_d[j] * _ways[l - j] for j in range(1, l + 1)))


def count_projective(l: int) -> int:
    """Number of attachable continuous trees on l ordered nodes (d(0)=1)."""
    if l < 0:
        raise ValueError("span length must be >= 0")
    _extend_tables(l)
    return _d[l]


def _head_cum(l: int) -> list[int]:
    cum = _head_cums.get(l)
    if cum is None:
        _extend_tables(l)
        cum, total = [], 0
        for h in range(1, l + 1):
            total += _ways[h - 1] * _ways[l - h]
            cum.append(total)
        _head_cums[l] = cum
    return cum


def _comp_cum(s: int) -> list[int]:
    cum = _comp_cums.get(s)
    if cum is None:
        _extend_tables(s)
        cum, total = [], 0
        for j in range(1, s + 1):
            total += _d[j] * _ways[s - j]
            cum.append(total)
        _comp_cums[s] = cum
    return cum


def _pick_weighted(rng: RngStream, cum: list[int]) -> int:
    """1-based index drawn with probability proportional to the weights."""
    return bisect_right(cum, rng.randbelow(cum[-1])) + 1


def _sample_attachable(rng: RngStream, heads: list[int], lo: int, hi: int,
                       gov: int) -> int:
    """Fill heads[lo..hi] with a uniform attachable continuous tree whose
    head attaches to gov (0 = sentence root). Returns the head position."""
    l = hi - lo + 1
    h = 1 if l == 1 else _pick_weighted(rng, _head_cum(l))
    head = lo + h - 1
    heads[head - 1] = gov
    _sample_forest(rng, heads, lo, head - 1, head)
    _sample_forest(rng, heads, head + 1, hi, head)
    return head


def _sample_forest(rng: RngStream, heads: list[int], a: int, b: int,
                   gov: int) -> None:
    """Fill heads[a..b] with a uniform forest of consecutive attachable
    subtrees, every component head governed by gov."""
    while a <= b:
        s = b - a + 1
        j = s if s == 1 else _pick_weighted(rng, _comp_cum(s))
        _sample_attachable(rng, heads, a, a + j - 1, gov)
        a += j


def gen_projective_tree(n: int, rng: RngStream) -> DepTree:
    """RL2: uniform over all continuous trees on 1..n (zero crossings of
    either type by construction)."""
    heads = [0] * n
    _sample_attachable(rng, heads, 1, n, 0)
    return validate_tree(heads)


# --- chunk segmentation and chunked trees ----------------------------------

def segment_chunks(n: int, cfg: ChunkConfig, rng: RngStream) -> ChunkPartition:
    """Left-to-right segmentation of 1..n under the chunk-size policy."""
    cfg.check(n)
    spans = []
    start = 1
    while start <= n:
        size = cfg.max_size if cfg.mode == "fixed" else rng.randint(cfg.min_size, cfg.max_size)
        end = min(start + size - 1, n)
        spans.append((start, end))
        start = end + 1
    part = ChunkPartition(spans=tuple(spans), min_size=cfg.min_size,
                          max_size=cfg.max_size)
    part.validate()
    return part


def _chunk_children(chunk_parent: list[int]) -> list[list[int]]:
    children: list[list[int]] = [[] for _ in range(len(chunk_parent) + 1)]
    for j, p in enumerate(chunk_parent, start=1):
        if p != 0:
            children[p].append(j)
    return children


def _bfs_chunk_order(chunk_parent: list[int], root_chunk: int) -> list[int]:
    children = _chunk_children(chunk_parent)
    order = [root_chunk]
    i = 0
    while i < len(order):
        order.extend(children[order[i]])
        i += 1
    return order


def gen_chunked_tree(n: int, cfg: ChunkConfig, rng: RngStream) -> ChunkedTree:
    """RL3: segment, random subtree per chunk, uniform root chunk, uniform
    tree over chunks, one uniform attachment node per chunk edge."""
    part = segment_chunks(n, cfg, rng)
    k = part.k
    heads = [0] * n
    chunk_heads = []
    for lo, hi in part.spans:
        local, local_root = _random_rooted_heads(hi - lo + 1, rng)
        for off, g in enumerate(local):
            if g != 0:
                heads[lo - 1 + off] = lo - 1 + g
        chunk_heads.append(lo - 1 + local_root)

    root_chunk = rng.randint(1, k)
    chunk_parent = [0] * k
    if k >= 2:
        edges = _random_tree_edges(k, rng)
        chunk_parent = _orient_from_root(edges, k, root_chunk)

    attach = [0] * k
    for j in range(1, k + 1):
        p = chunk_parent[j - 1]
        if p == 0:
            continue
        plo, phi = part.spans[p - 1]
        m = rng.randint(plo, phi)
        heads[chunk_heads[j - 1] - 1] = m
        attach[j - 1] = m

    tree = validate_tree(heads)
    return ChunkedTree(tree=tree, partition=part, chunk_heads=tuple(chunk_heads),
                       chunk_parent=tuple(chunk_parent), attach_node=tuple(attach))


def gen_chunked_projective_tree(n: int, cfg: ChunkConfig,
                                rng: RngStream) -> ChunkedTree:
    """RL4: as RL3 but with attachable continuous subtrees, a continuous
    chunk-level tree around the uniformly chosen root chunk, and
    attachment nodes filtered so no edge crosses another or covers the
    sentence root. Resamples the whole tree when a chunk edge has no
    admissible attachment node (rare)."""
    for _ in range(_MAX_RETRIES):
        ct = _try_chunked_projective(n, cfg, rng)
        if ct is not None:
            return ct
    raise RetryExhaustedError(
        f"no continuous chunked tree found in {_MAX_RETRIES} attempts "
        f"(n={n}, cfg={cfg})")


def _try_chunked_projective(n: int, cfg: ChunkConfig,
                            rng: RngStream) -> ChunkedTree | None:
    part = segment_chunks(n, cfg, rng)
    k = part.k
    heads = [0] * n
    chunk_heads = []
    for lo, hi in part.spans:
        chunk_heads.append(_sample_attachable(rng, heads, lo, hi, 0))

    root_chunk = rng.randint(1, k)
    chunk_parent = [0] * k
    if k >= 2:
        # continuous chunk-level tree conditioned on the chosen head chunk
        _sample_forest(rng, chunk_parent, 1, root_chunk - 1, root_chunk)
        _sample_forest(rng, chunk_parent, root_chunk + 1, k, root_chunk)

    root_pos = chunk_heads[root_chunk - 1]

    # arc buffers: intra-chunk arcs now, attachment arcs appended as added
    arc_lo = np.empty(n - 1, dtype=np.int32) if n > 1 else np.empty(0, dtype=np.int32)
    arc_hi = np.empty_like(arc_lo)
    count = 0
    for p in range(1, n + 1):
        g = heads[p - 1]
        if g != 0:
            arc_lo[count] = p if p < g else g
            arc_hi[count] = g if p < g else p
            count += 1

    attach = [0] * k
    children = _chunk_children(chunk_parent)
    for parent in _bfs_chunk_order(chunk_parent, root_chunk):
        plo, phi = part.spans[parent - 1]
        for j in children[parent]:
            hj = chunk_heads[j - 1]
            cand = np.arange(plo, phi + 1, dtype=np.int32)
            new_lo = np.minimum(cand, hj)
            new_hi = np.maximum(cand, hj)
            u = arc_lo[:count, None]
            v = arc_hi[:count, None]
            nl = new_lo[None, :]
            nh = new_hi[None, :]
            crosses = ((u < nl) & (nl < v) & (v < nh)) | ((nl < u) & (u < nh) & (nh < v))
            bad = crosses.any(axis=0) | ((new_lo < root_pos) & (root_pos < new_hi))
            ok = cand[~bad]
            if ok.size == 0:
                return None
            m = int(ok[rng.randint(0, ok.size - 1)])
            heads[hj - 1] = m
            attach[j - 1] = m
            arc_lo[count] = min(m, hj)
            arc_hi[count] = max(m, hj)
            count += 1

    tree = validate_tree(heads)
    return ChunkedTree(tree=tree, partition=part, chunk_heads=tuple(chunk_heads),
                       chunk_parent=tuple(chunk_parent), attach_node=tuple(attach))


def gen_family(family: str, n: int, cfg: ChunkConfig | None,
               rng: RngStream) -> DepTree:
    """Dispatch to the four generators; RL3/RL4 require a chunk config."""
    fam = family.upper()
    if fam == "RL1":
        return gen_random_tree(n, rng)
    if fam == "RL2":
        return gen_projective_tree(n, rng)
    if fam in ("RL3", "RL4"):
        if cfg is None:
            raise MissingChunkConfigError(f"family {fam} requires a ChunkConfig")
        if fam == "RL3":
            return gen_chunked_tree(n, cfg, rng).tree
        return gen_chunked_projective_tree(n, cfg, rng).tree
    raise ValueError(f"unknown family {family!r}")
