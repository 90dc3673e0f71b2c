"""Stationary nearest-older-neighbour trees on a periodic Poisson window.

A unit-intensity Poisson point process is realised on the d-torus of side L
with i.i.d. uniform arrival labels in [0, 1]; every point attaches to its
nearest point of strictly smaller label.  The periodic boundary removes edge
effects exactly, and sorting the points by label turns the construction into
an ordinary nearest-neighbour tree build on the unit torus (distances scale
by 1/L, which preserves every argmin), so the grid-accelerated builder does
the heavy lifting.  Averaging the per-point sibling count over replicates
gives an estimate of the limiting mean sibling count that is independent of
both the finite-n sphere simulations and the quadrature route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .nnt import LabelledTree, build_nnt_accelerated
from .spaces import Space, _philox
from .stats import mean_siblings

_TIE_SALT = 0x5EEDED


@dataclass
class PoissonSample:
    """One realisation: points and labels sorted by label; parent[i] indexes
    into the sorted order, so parent[i] < i and the oldest point has -1."""

    d: int
    side: float
    points: np.ndarray
    labels: np.ndarray
    tree: LabelledTree

    @property
    def count(self) -> int:
        return int(self.labels.shape[0])


def sample_poisson_tree(d: int, side: float, seed: int) -> PoissonSample:
    """Draw the process on the d-torus of side ``side`` and build its tree.

    Requires an expected point count side^d of at least 10 so the window is
    a meaningful approximation of the stationary picture.
    """
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    intensity = float(side) ** d
    if not intensity >= 10.0:
        raise ValueError(f"expected point count side^d = {intensity:.3g} < 10")
    rng = _philox(seed)
    n = int(rng.poisson(intensity))
    if n < 2:
        raise RuntimeError(
            f"degenerate realisation with {n} points; use a larger window"
        )
    positions = rng.random((n, d)) * side
    labels = rng.random(n)
    order = np.argsort(labels, kind="stable")
    positions = positions[order]
    labels = labels[order]
    tree = build_nnt_accelerated(
        Space.torus(d), positions / side, tie_seed=seed ^ _TIE_SALT
    )
    return PoissonSample(d=d, side=float(side), points=positions, labels=labels, tree=tree)


def _rrt_mean_siblings(d: int, side: float, seed: int) -> float:
    """Labels-only variant: same Poisson count, uniform parent among older
    points (geometry discarded); estimates the recursive-tree limit 2."""
    from ._backend import kernels

    rng = _philox(seed)
    n = int(rng.poisson(float(side) ** d))
    if n < 2:
        raise RuntimeError(f"degenerate realisation with {n} points")
    parent, dist2 = kernels.build_rrt(n, seed ^ _TIE_SALT)
    return mean_siblings(LabelledTree(parent=parent, attach_distance=np.sqrt(dist2)))


def estimate_mean_siblings(
    d: int,
    side: float,
    reps: int,
    seed: int,
    labels_only: bool = False,
):
    """Monte-Carlo estimate (mean, standard error) of the limiting mean
    sibling count from ``reps`` independent windows.

    Replicate r uses seed ``seed + r``, so worker sharding cannot change the
    estimate.  With ``labels_only`` the metric is ignored entirely and the
    estimate targets the recursive-tree limit instead.
    """
    if reps < 2:
        raise ValueError("need at least 2 replicates for a standard error")
    vals = np.empty(reps)
    for r in range(reps):
        if labels_only:
            vals[r] = _rrt_mean_siblings(d, side, seed + r)
        else:
            vals[r] = mean_siblings(sample_poisson_tree(d, side, seed + r).tree)
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(reps))


@dataclass(frozen=True)
class WindowCheck:
    """Window-doubling bias check: estimates at side L and 2L with their
    standard errors, and whether they agree within 3 combined sigma."""

    estimate_small: float
    stderr_small: float
    estimate_large: float
    stderr_large: float

    @property
    def consistent(self) -> bool:
        gap = abs(self.estimate_small - self.estimate_large)
        return gap <= 3.0 * math.hypot(self.stderr_small, self.stderr_large)


def window_doubling_check(d: int, side: float, reps: int, seed: int) -> WindowCheck:
    e1, s1 = estimate_mean_siblings(d, side, reps, seed)
    e2, s2 = estimate_mean_siblings(d, 2.0 * side, reps, seed + 10_000_019)
    return WindowCheck(e1, s1, e2, s2)
