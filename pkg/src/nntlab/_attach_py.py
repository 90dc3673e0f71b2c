"""Pure-numpy attachment kernels (fallback backend).

Function-for-function mirror of the compiled module ``nntlab._attach_c``.
Both backends must produce bitwise-identical (parent, squared-distance)
arrays for identical inputs: squared distances are accumulated coordinate by
coordinate in index order, and ties are resolved through the shared
``tie_pick`` convention on the ascending tied-index list.
"""

from __future__ import annotations

import numpy as np

from ._tiebreak import tie_pick

_BRUTE_CUTOFF = 64


def _resolve(d2: np.ndarray, tie_seed: int, node: int):
    best = d2.min()
    tied = np.flatnonzero(d2 == best)
    if tied.size > 1:
        j = tied[tie_pick(tie_seed, node, tied.size)]
    else:
        j = tied[0]
    return int(j), float(best)


def build_sphere_scan(coords: np.ndarray, tie_seed: int):
    """Exact linear-scan attachment for points with a plain Euclidean metric."""
    n, k = coords.shape
    parent = np.full(n, -1, dtype=np.int64)
    dist2 = np.full(n, np.nan)
    for i in range(1, n):
        prev = coords[:i]
        d2 = (prev[:, 0] - coords[i, 0]) ** 2
        for m in range(1, k):
            d2 = d2 + (prev[:, m] - coords[i, m]) ** 2
        parent[i], dist2[i] = _resolve(d2, tie_seed, i)
    return parent, dist2


def _wrap_d2(prev: np.ndarray, point: np.ndarray) -> np.ndarray:
    delta = np.abs(prev[:, 0] - point[0])
    d2 = np.where(delta > 0.5, 1.0 - delta, delta) ** 2
    for m in range(1, point.shape[0]):
        delta = np.abs(prev[:, m] - point[m])
        d2 = d2 + np.where(delta > 0.5, 1.0 - delta, delta) ** 2
    return d2


def build_torus_grid(coords: np.ndarray, tie_seed: int):
    """Exact grid-accelerated attachment on the unit torus.

    Cells of side 1/g with g = floor(n^(1/d)); an expanding Chebyshev-ring
    search stops once the best squared distance found is strictly below the
    least possible squared distance to any unvisited ring (a point of a cell
    at ring r+1 is at least r/g away).  Falls back to a full scan while the
    tree is small and whenever the rings would wrap onto themselves
    (2r+1 >= g), which keeps the search exact on any input.
    """
    n, d = coords.shape
    parent = np.full(n, -1, dtype=np.int64)
    dist2 = np.full(n, np.nan)
    g = max(1, int(np.floor(n ** (1.0 / d))))
    strides = g ** np.arange(d)
    cell_of = np.minimum((coords * g).astype(np.int64), g - 1)
    cell_ids = cell_of @ strides
    buckets: dict[int, list[int]] = {int(cell_ids[0]): [0]}

    offsets_cache: dict[int, np.ndarray] = {}

    def ring_offsets(r: int) -> np.ndarray:
        if r not in offsets_cache:
            rng = np.arange(-r, r + 1)
            grid = np.meshgrid(*([rng] * d), indexing="ij")
            offs = np.stack([gg.ravel() for gg in grid], axis=1)
            offsets_cache[r] = offs[np.abs(offs).max(axis=1) == r]
        return offsets_cache[r]

    for i in range(1, n):
        if i <= _BRUTE_CUTOFF or g < 3:
            d2 = _wrap_d2(coords[:i], coords[i])
            parent[i], dist2[i] = _resolve(d2, tie_seed, i)
        else:
            best = np.inf
            cand: list[int] = []
            point = coords[i]
            ci = cell_of[i]
            r = 0
            while True:
                if 2 * r + 1 >= g:
                    # rings would alias around the torus; scan everything
                    d2 = _wrap_d2(coords[:i], coords[i])
                    parent[i], dist2[i] = _resolve(d2, tie_seed, i)
                    cand = []
                    break
                for off in ring_offsets(r):
                    cid = int(((ci + off) % g) @ strides)
                    for j in buckets.get(cid, ()):
                        d2j = 0.0
                        for m in range(d):
                            delta = abs(coords[j, m] - point[m])
                            if delta > 0.5:
                                delta = 1.0 - delta
                            d2j += delta * delta
                        if d2j < best:
                            best = d2j
                            cand = [j]
                        elif d2j == best:
                            cand.append(j)
                lo = r / g
                if cand and best < lo * lo:
                    break
                r += 1
            if cand:
                if len(cand) > 1:
                    cand.sort()
                    jbest = cand[tie_pick(tie_seed, i, len(cand))]
                else:
                    jbest = cand[0]
                parent[i] = jbest
                dist2[i] = best
        buckets.setdefault(int(cell_ids[i]), []).append(i)
    return parent, dist2


def build_rrt(n: int, tie_seed: int):
    """Uniform attachment: node i picks among {0..i-1}, all tied at distance 1."""
    parent = np.full(n, -1, dtype=np.int64)
    dist2 = np.full(n, np.nan)
    for i in range(1, n):
        parent[i] = tie_pick(tie_seed, i, i)
        dist2[i] = 1.0
    return parent, dist2
