"""Core value types: dependency trees, chunk partitions, metric records,
and the deterministic randomness contract shared by every other module.

Positions are 1-based throughout (CoNLL convention). A governor value of 0
marks the root; the external head-sequence format is one tree per line of
space-separated governor indices, e.g. ``2 0 4 2``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterator, Sequence

__all__ = [
    "DepTree",
    "ChunkPartition",
    "ChunkedTree",
    "MetricsRecord",
    "SweepRow",
    "RngStream",
    "validate_tree",
    "derive_seed",
    "parse_head_line",
    "format_head_line",
    "TreeValidationError",
    "ZeroRootsError",
    "MultipleRootsError",
    "CycleDetectedError",
    "InvalidGovernorError",
]

_MASK64 = (1 << 64) - 1


class TreeValidationError(ValueError):
    """A governor sequence that does not encode a well-formed tree."""

    def __init__(self, message: str, positions: Sequence[int] = ()):
        super().__init__(message)
        self.positions = tuple(positions)


class ZeroRootsError(TreeValidationError):
    pass


class MultipleRootsError(TreeValidationError):
    pass


class CycleDetectedError(TreeValidationError):
    pass


class InvalidGovernorError(TreeValidationError):
    pass


@dataclass(frozen=True)
class DepTree:
    """A rooted single-governor tree over linearly ordered nodes 1..n.

    ``heads[p-1]`` is the governor of position p, 0 exactly at the root.
    Instances are produced by :func:`validate_tree`; construct through it
    so the invariants (single root, acyclic, connected) always hold.
    """

    n: int
    heads: tuple[int, ...]
    root: int

    def head_of(self, pos: int) -> int:
        return self.heads[pos - 1]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield (dependent, governor) pairs, root excluded; n-1 edges."""
        for pos, head in enumerate(self.heads, start=1):
            if head != 0:
                yield pos, head

    def to_head_line(self) -> str:
        return format_head_line(self.heads)


def validate_tree(heads: Sequence[int | None]) -> DepTree:
    """Check a governor sequence and return the validated tree.

    Accepts 0 or None as the root marker. Raises ZeroRootsError,
    MultipleRootsError, InvalidGovernorError or CycleDetectedError, each
    naming the violating positions.
    """
    n = len(heads)
    if n == 0:
        raise ZeroRootsError("empty governor sequence", ())
    norm: list[int] = []
    bad: list[int] = []
    roots: list[int] = []
    for pos, h in enumerate(heads, start=1):
        g = 0 if h is None else int(h)
        if g == 0:
            roots.append(pos)
        elif g < 0 or g > n:
            bad.append(pos)
        norm.append(g)
    if bad:
        raise InvalidGovernorError(f"governor out of range at positions {bad}", bad)

    # Cycles are reported before root-count problems ([2, 1] is a cycle,
    # not a missing root). 0=unseen, 1=on current path, 2=reaches a root.
    state = [0] * (n + 1)
    for start in range(1, n + 1):
        if state[start]:
            continue
        path = []
        p = start
        while True:
            state[p] = 1
            path.append(p)
            p = norm[p - 1]
            if p == 0 or state[p] == 2:
                break
            if state[p] == 1:
                cyc = path[path.index(p):]
                raise CycleDetectedError(f"cycle through positions {cyc}", cyc)
        for q in path:
            state[q] = 2

    if not roots:
        raise ZeroRootsError("no root position (no 0/none governor)", ())
    if len(roots) > 1:
        raise MultipleRootsError(f"multiple root positions {roots}", roots)
    return DepTree(n=n, heads=tuple(norm), root=roots[0])


def parse_head_line(line: str) -> DepTree:
    """Parse one line of the head-sequence fixture format and validate it."""
    return validate_tree([int(tok) for tok in line.split()])


def format_head_line(heads: Sequence[int]) -> str:
    return " ".join(str(h) for h in heads)


@dataclass(frozen=True)
class ChunkPartition:
    """An ordered segmentation of 1..n into contiguous spans.

    Every span length lies in [min_size, max_size] except possibly the
    last, which may be shorter when the tail runs out.
    """

    spans: tuple[tuple[int, int], ...]
    min_size: int
    max_size: int

    @property
    def k(self) -> int:
        return len(self.spans)

    @property
    def n(self) -> int:
        return self.spans[-1][1]

    def span_of(self, pos: int) -> int:
        """Index (1-based) of the span containing position pos."""
        for i, (lo, hi) in enumerate(self.spans, start=1):
            if lo <= pos <= hi:
                return i
        raise ValueError(f"position {pos} outside partition")

    def validate(self) -> None:
        if not self.spans:
            raise ValueError("empty partition")
        if not 1 <= self.min_size <= self.max_size:
            raise ValueError("need 1 <= min_size <= max_size")
        expect = 1
        for i, (lo, hi) in enumerate(self.spans):
            if lo != expect or hi < lo:
                raise ValueError(f"span {i + 1} ({lo},{hi}) breaks coverage")
            size = hi - lo + 1
            last = i == len(self.spans) - 1
            if size > self.max_size or (size < self.min_size and not last):
                raise ValueError(f"span {i + 1} size {size} out of bounds")
            expect = hi + 1


@dataclass(frozen=True)
class ChunkedTree:
    """A DepTree together with its chunk partition and attachment records.

    chunk_heads[i-1] is the position of chunk i's subtree root;
    chunk_parent[i-1] is the governing chunk index (0 for the root chunk);
    attach_node[i-1] is the position inside the governing chunk that
    governs chunk i's head (0 for the root chunk).
    """

    tree: DepTree
    partition: ChunkPartition
    chunk_heads: tuple[int, ...]
    chunk_parent: tuple[int, ...]
    attach_node: tuple[int, ...]

    @property
    def root_chunk(self) -> int:
        return self.chunk_parent.index(0) + 1

    def validate(self) -> None:
        part = self.partition
        part.validate()
        k = part.k
        if not (len(self.chunk_heads) == len(self.chunk_parent) == len(self.attach_node) == k):
            raise ValueError("per-chunk field lengths disagree with k")
        if part.n != self.tree.n:
            raise ValueError("partition does not cover the tree")
        roots = [i for i, p in enumerate(self.chunk_parent, start=1) if p == 0]
        if len(roots) != 1:
            raise ValueError(f"expected one root chunk, found {roots}")
        rc = roots[0]
        if self.tree.root != self.chunk_heads[rc - 1]:
            raise ValueError("tree root is not the root chunk's head")
        span_index = {}
        for i, (lo, hi) in enumerate(part.spans, start=1):
            if not lo <= self.chunk_heads[i - 1] <= hi:
                raise ValueError(f"chunk {i} head outside its span")
            for p in range(lo, hi + 1):
                span_index[p] = i
        # chunk_parent must itself be a tree over 1..k
        validate_tree(list(self.chunk_parent))
        inter = 0
        for dep, gov in self.tree.edges():
            ci, cj = span_index[gov], span_index[dep]
            if ci == cj:
                continue
            inter += 1
            if self.chunk_parent[cj - 1] != ci:
                raise ValueError(f"edge {gov}->{dep} crosses chunks {ci}->{cj} "
                                 "but chunk_parent disagrees")
            if dep != self.chunk_heads[cj - 1] or gov != self.attach_node[cj - 1]:
                raise ValueError(f"inter-chunk edge {gov}->{dep} is not the "
                                 f"recorded attachment of chunk {cj}")
        if inter != k - 1:
            raise ValueError(f"expected {k - 1} inter-chunk edges, found {inter}")


@dataclass(frozen=True)
class MetricsRecord:
    """Per-tree measurements. mdd is None for single-node trees."""

    n: int
    mdd: float | None
    type1: int
    type2: int
    continuous: bool


@dataclass(frozen=True)
class SweepRow:
    """One aggregated cell of an experiment table."""

    family: str
    n: int
    chunk_mode: str          # none | random_max | fixed
    chunk_param: int | None
    replicates: int
    mean_mdd: float
    sd_mdd: float
    mean_type1: float
    mean_type2: float


def _splitmix64(x: int) -> int:
    x = x & _MASK64
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK64
    return x ^ (x >> 31)


def derive_seed(master: int, stream_id: int) -> int:
    """Mix (master seed, stream id) into one 64-bit seed.

    Two rounds of the splitmix64 finalizer; bijective in each argument,
    so distinct stream ids at a fixed master never collide (and vice
    versa). Pure integer arithmetic: identical on every platform.
    """
    h = _splitmix64((master + 0x9E3779B97F4A7C15) & _MASK64)
    return _splitmix64((h ^ (stream_id & _MASK64)) + 0x9E3779B97F4A7C15)


class RngStream:
    """Deterministic random stream identified by (master_seed, stream_id).

    Wraps a Mersenne Twister seeded via derive_seed. Only integer draws
    are exposed, which keeps every consumer platform-independent. The one
    mutable object in the package; each worker owns a private stream.
    """

    __slots__ = ("master_seed", "stream_id", "_rng")

    def __init__(self, master_seed: int, stream_id: int = 0):
        self.master_seed = master_seed
        self.stream_id = stream_id
        self._rng = random.Random(derive_seed(master_seed, stream_id))

    def randint(self, lo: int, hi: int) -> int:
        """Uniform integer in [lo, hi], endpoints included."""
        return self._rng.randrange(lo, hi + 1)

    def randbelow(self, bound: int) -> int:
        """Uniform integer in [0, bound); exact for arbitrary-size bounds."""
        return self._rng.randrange(bound)

    def substream(self, stream_id: int) -> "RngStream":
        return RngStream(self.master_seed, stream_id)
