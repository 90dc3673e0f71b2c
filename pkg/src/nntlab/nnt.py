"""Labelled nearest-neighbour tree construction.

Node i (0-based internally, 1-based in dumps) attaches to the earlier point
whose distance to point i is minimal; exact ties (bitwise-equal squared
distances) are broken uniformly at random, deterministically in ``tie_seed``.
On the constant-metric rrt space every candidate ties, which reproduces the
random recursive tree.

``build_nnt`` is the deliberately simple reference builder used as the
oracle in tests.  ``build_nnt_accelerated`` dispatches to the compiled (or
numpy fallback) kernels and is contractually equal to the reference on every
input, not approximately so.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import BACKEND, kernels
from ._tiebreak import tie_pick
from .spaces import Space


@dataclass
class LabelledTree:
    """Parent-array tree: parent[0] == -1, parent[i] < i for i >= 1."""

    parent: np.ndarray
    attach_distance: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return int(self.parent.shape[0])

    def validate(self) -> None:
        p = self.parent
        if p.shape[0] < 1 or p[0] != -1:
            raise ValueError("root must be node 0 with parent sentinel -1")
        idx = np.arange(p.shape[0])
        if not np.all((p[1:] >= 0) & (p[1:] < idx[1:])):
            raise ValueError("parent[i] must lie in {0..i-1} for i >= 1")


def _check_points(space: Space, points: np.ndarray) -> np.ndarray:
    points = np.ascontiguousarray(points, dtype=float)
    if points.ndim != 2 or points.shape[0] < 1:
        raise ValueError("points must be a nonempty (n, dim) array")
    if points.shape[1] != space.ambient_dim:
        raise ValueError(
            f"point dimension mismatch: space wants {space.ambient_dim}, "
            f"points have {points.shape[1]}"
        )
    return points


def build_nnt(space: Space, points: np.ndarray, tie_seed: int = 0) -> LabelledTree:
    """Reference builder: direct argmin over all earlier points.

    Quadratic time; exists as the oracle that every accelerated path is
    tested against.
    """
    points = _check_points(space, points)
    n = points.shape[0]
    parent = np.full(n, -1, dtype=np.int64)
    dist2 = np.full(n, np.nan)
    for i in range(1, n):
        row = _d2_row(space, points, i)
        best = row.min()
        tied = np.flatnonzero(row == best)
        if tied.size > 1:
            parent[i] = tied[tie_pick(tie_seed, i, tied.size)]
        else:
            parent[i] = tied[0]
        dist2[i] = best
    return LabelledTree(parent=parent, attach_distance=np.sqrt(dist2))


def _d2_row(space: Space, points: np.ndarray, i: int) -> np.ndarray:
    """Squared distances from point i to all earlier points.

    Accumulates coordinate by coordinate in index order so the arithmetic
    agrees bit-for-bit with the kernel backends.
    """
    prev = points[:i]
    if space.kind == "rrt":
        return np.ones(i)
    if space.kind == "sphere":
        d2 = (prev[:, 0] - points[i, 0]) ** 2
        for m in range(1, points.shape[1]):
            d2 = d2 + (prev[:, m] - points[i, m]) ** 2
        return d2
    delta = np.abs(prev[:, 0] - points[i, 0])
    d2 = np.where(delta > 0.5, 1.0 - delta, delta) ** 2
    for m in range(1, points.shape[1]):
        delta = np.abs(prev[:, m] - points[i, m])
        d2 = d2 + np.where(delta > 0.5, 1.0 - delta, delta) ** 2
    return d2


def build_nnt_accelerated(space: Space, points: np.ndarray, tie_seed: int = 0) -> LabelledTree:
    """Fast builder; same contract (and output) as :func:`build_nnt`.

    Torus uses a uniform cell grid with an exact expanding-ring search;
    sphere uses a flat linear scan over the contiguous coordinate array;
    rrt draws each parent directly from the tie-break hash.
    """
    points = _check_points(space, points)
    if space.kind == "rrt":
        parent, dist2 = kernels.build_rrt(points.shape[0], tie_seed)
    elif space.kind == "sphere":
        parent, dist2 = kernels.build_sphere_scan(points, tie_seed)
    else:
        parent, dist2 = kernels.build_torus_grid(points, tie_seed)
    return LabelledTree(parent=parent, attach_distance=np.sqrt(dist2))


def dump_tree(tree: LabelledTree) -> str:
    """One line per node, ``i <TAB> parent[i]``, 1-indexed, root's parent as 0."""
    lines = [f"{i + 1}\t{int(p) + 1}" for i, p in enumerate(tree.parent)]
    return "\n".join(lines) + "\n"


def write_tree(tree: LabelledTree, path) -> None:
    with open(path, "w") as fh:
        fh.write(dump_tree(tree))
