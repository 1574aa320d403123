"""Exhaustive ground truth for small n: every rooted labeled tree, every
continuous tree, and exact expectations of arbitrary per-tree metrics.

Enumeration is by direct head-vector iteration: each position draws its
governor from {0, 1..n} minus itself (n choices), giving n^n candidates
filtered down to the n^(n-1) valid trees. Capped at n=7.
"""

from __future__ import annotations

from itertools import product
from typing import Callable, Sequence

from .metrics import is_continuous
from .model import DepTree, validate_tree

__all__ = [
    "enumerate_rooted_trees",
    "enumerate_projective_trees",
    "exact_expectation",
    "TooLargeError",
    "MAX_ENUM_N",
]

MAX_ENUM_N = 7


class TooLargeError(ValueError):
    pass


def _check_n(n: int) -> None:
    if not 1 <= n <= MAX_ENUM_N:
        raise TooLargeError(f"enumeration supports 1 <= n <= {MAX_ENUM_N}, got {n}")


def _is_tree(heads: tuple[int, ...], n: int) -> bool:
    # cheap filter: exactly one root, every walk reaches it without repeats
    root = 0
    for p in range(n):
        if heads[p] == 0:
            if root:
                return False
            root = p + 1
    if not root:
        return False
    state = [0] * (n + 1)
    state[root] = 2
    for start in range(1, n + 1):
        if state[start]:
            continue
        path = []
        p = start
        while state[p] == 0:
            state[p] = 1
            path.append(p)
            p = heads[p - 1]
        if state[p] == 1:
            return False
        for q in path:
            state[q] = 2
    return True


def enumerate_rooted_trees(n: int) -> list[DepTree]:
    """All n^(n-1) distinct rooted labeled trees on positions 1..n."""
    _check_n(n)
    if n == 1:
        return [validate_tree([0])]
    choice_sets = [tuple(g for g in range(n + 1) if g != p) for p in range(1, n + 1)]
    trees = []
    for heads in product(*choice_sets):
        if _is_tree(heads, n):
            trees.append(DepTree(n=n, heads=heads, root=heads.index(0) + 1))
    return trees


def enumerate_projective_trees(n: int) -> list[DepTree]:
    """The continuous subset of enumerate_rooted_trees(n)."""
    return [t for t in enumerate_rooted_trees(n) if is_continuous(t)]


def exact_expectation(n: int, metric: Callable[[DepTree], float],
                      family: str = "RL1") -> float:
    """Uniform average of a metric over an enumerable family (RL1 or RL2)."""
    _check_n(n)
    if family == "RL1":
        trees: Sequence[DepTree] = enumerate_rooted_trees(n)
    elif family == "RL2":
        trees = enumerate_projective_trees(n)
    else:
        raise ValueError(f"family {family!r} is not enumerable (RL1 or RL2)")
    return sum(metric(t) for t in trees) / len(trees)
