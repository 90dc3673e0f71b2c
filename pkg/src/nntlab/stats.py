"""Sibling and degree statistics of labelled trees.

All counting is exact integer arithmetic; divisions happen only when a mean
is reported, so the identities below hold exactly on every tree:

* sum of degrees = 2(n-1);
* sum over nodes of deg^2 = (sum of sibling counts) + 4(n-1) - 2 deg(root).

The sibling count of node i (i >= 2 in 1-based labels) is the number of
other non-root nodes sharing its parent; the mean divides by n, with the
root contributing 0, so the mean equals the expected sibling count of a
uniformly random node.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .nnt import LabelledTree

CSV_COLUMNS = (
    "seed",
    "space",
    "d",
    "n",
    "mean_siblings",
    "mean_sq_degree",
    "root_degree",
    "leaf_count",
    "depth_last",
)


@dataclass(frozen=True)
class TreeStats:
    n: int
    mean_siblings: float
    mean_sq_degree: float
    root_degree: int
    leaf_count: int
    depth_last: int


def _require(tree: LabelledTree, minimum: int = 2) -> int:
    n = tree.n
    if n < minimum:
        raise ValueError(f"tree too small: n={n} < {minimum}")
    return n


def child_counts(tree: LabelledTree) -> np.ndarray:
    n = tree.n
    if n == 1:
        return np.zeros(1, dtype=np.int64)
    return np.bincount(tree.parent[1:], minlength=n).astype(np.int64)


def degrees(tree: LabelledTree) -> np.ndarray:
    deg = child_counts(tree)
    deg[1:] += 1
    return deg


def sibling_counts(tree: LabelledTree) -> np.ndarray:
    """s(i) for the non-root nodes, in node order (length n-1)."""
    _require(tree)
    c = child_counts(tree)
    return c[tree.parent[1:]] - 1


def mean_siblings(tree: LabelledTree) -> float:
    n = _require(tree)
    c = child_counts(tree)
    return int((c * (c - 1)).sum()) / n


def mean_sq_degree(tree: LabelledTree) -> float:
    n = _require(tree)
    deg = degrees(tree)
    return int((deg * deg).sum()) / n


def degree_identity_holds(tree: LabelledTree) -> bool:
    """Exact check: sum deg^2 == sum siblings + 4(n-1) - 2 deg(root)."""
    n = _require(tree)
    deg = degrees(tree)
    c = child_counts(tree)
    lhs = int((deg * deg).sum())
    rhs = int((c * (c - 1)).sum()) + 4 * (n - 1) - 2 * int(deg[0])
    return lhs == rhs


def root_degree(tree: LabelledTree) -> int:
    return int(child_counts(tree)[0])


def leaf_count(tree: LabelledTree) -> int:
    return int((child_counts(tree) == 0).sum())


def depth_last(tree: LabelledTree) -> int:
    """Number of edges from the last node up to the root."""
    parent = tree.parent
    i = tree.n - 1
    depth = 0
    while i > 0:
        i = int(parent[i])
        depth += 1
    return depth


def tree_stats(tree: LabelledTree) -> TreeStats:
    n = _require(tree)
    return TreeStats(
        n=n,
        mean_siblings=mean_siblings(tree),
        mean_sq_degree=mean_sq_degree(tree),
        root_degree=root_degree(tree),
        leaf_count=leaf_count(tree),
        depth_last=depth_last(tree),
    )
