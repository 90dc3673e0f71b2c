"""Sampleable metric spaces for nearest-neighbour tree construction.

Three kinds of space are supported:

* ``sphere``: the unit d-sphere embedded in R^{d+1}, chordal (straight-line)
  metric.  Chordal and geodesic distances are monotone transforms of each
  other on a sphere, so every nearest-neighbour argmin is identical under
  both; we use the chordal one because it is a plain Euclidean norm.
* ``torus``: [0,1)^d with per-coordinate wrap-around Euclidean metric.
* ``rrt``: the degenerate space where all pairwise distances equal 1.  Trees
  grown on it are random recursive trees (every attachment is a tie, broken
  uniformly at random).

Randomness: points are produced by the counter-based Philox generator keyed
on the caller's 64-bit seed.  Gaussians for the sphere come from a Box-Muller
transform of Philox uniforms, so the output stream is a fixed deterministic
function of (space, n, seed) with no data-dependent rejection loops.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class Space:
    """A metric-space descriptor: ``kind`` in {'sphere', 'torus', 'rrt'} plus d."""

    kind: str
    d: int = 0

    def __post_init__(self):
        if self.kind not in ("sphere", "torus", "rrt"):
            raise ValueError(f"unknown space kind: {self.kind!r}")
        if self.kind in ("sphere", "torus") and self.d < 1:
            raise ValueError(f"{self.kind} requires dimension d >= 1, got {self.d}")
        if self.kind == "rrt" and self.d != 0:
            raise ValueError("rrt space carries no dimension; leave d at 0")

    @classmethod
    def sphere(cls, d: int) -> "Space":
        return cls("sphere", d)

    @classmethod
    def torus(cls, d: int) -> "Space":
        return cls("torus", d)

    @classmethod
    def rrt(cls) -> "Space":
        return cls("rrt", 0)

    @property
    def ambient_dim(self) -> int:
        """Length of a point's coordinate vector in this space."""
        if self.kind == "sphere":
            return self.d + 1
        if self.kind == "torus":
            return self.d
        return 0


def _philox(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=seed & _SEED_MASK))


def sample_points(space: Space, n: int, seed: int) -> np.ndarray:
    """Draw ``n`` i.i.d. uniform points; returns an (n, ambient_dim) float array.

    Deterministic: the same (space, n, seed) always yields the same array.
    Sphere rows are renormalised to unit Euclidean norm.
    """
    if n < 1:
        raise ValueError(f"need at least one point, got n={n}")
    rng = _philox(seed)
    if space.kind == "torus":
        return rng.random((n, space.d))
    if space.kind == "rrt":
        return np.empty((n, 0))
    # Sphere: Box-Muller pairs from uniforms, then renormalise.
    m = space.d + 1
    pairs = (m + 1) // 2
    u = rng.random((n, 2 * pairs))
    radius = np.sqrt(-2.0 * np.log1p(-u[:, :pairs]))
    angle = 2.0 * np.pi * u[:, pairs:]
    gauss = np.empty((n, 2 * pairs))
    gauss[:, 0::2] = radius * np.cos(angle)
    gauss[:, 1::2] = radius * np.sin(angle)
    gauss = gauss[:, :m]
    norms = np.sqrt(np.einsum("ij,ij->i", gauss, gauss))
    if np.any(norms == 0.0):  # probability zero; fail loudly rather than divide
        raise RuntimeError("degenerate Gaussian sample of zero norm")
    return gauss / norms[:, None]


def distance(space: Space, a: np.ndarray, b: np.ndarray) -> float:
    """Metric distance between two points of ``space``.

    For ``rrt`` every pair of (distinct) points is at distance 1; the
    coordinate vectors are empty and carry no identity, so 1.0 is returned
    unconditionally.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != (space.ambient_dim,) or b.shape != (space.ambient_dim,):
        raise ValueError(
            f"point dimension mismatch: expected {space.ambient_dim}, "
            f"got {a.shape} and {b.shape}"
        )
    if space.kind == "rrt":
        return 1.0
    if space.kind == "sphere":
        return float(np.sqrt(((a - b) ** 2).sum()))
    delta = np.abs(a - b)
    delta = np.minimum(delta, 1.0 - delta)
    return float(np.sqrt((delta**2).sum()))
