"""nntlab: nearest-neighbour tree simulation and sibling-statistics quadrature.

The package has three legs that cross-validate each other:

* growing labelled nearest-neighbour trees on spheres, flat tori and the
  constant-metric degenerate space (the random recursive tree), and measuring
  their sibling/degree statistics (``spaces``, ``nnt``, ``stats``);
* a stationary construction of the same local geometry from a Poisson point
  process on a periodic window (``locallimit``);
* deterministic quadrature of the closed-form limit of the mean sibling
  count per dimension, plus checkers for the inequalities the limit formulas
  rest on (``geomvol``, ``quadrature``).

Tree construction kernels are compiled (Cython) when available, with a
pure-numpy fallback selected at import; see ``nntlab.nnt.BACKEND``.
"""

__version__ = "0.1.0"

from .spaces import Space, sample_points, distance
from .nnt import LabelledTree, build_nnt, build_nnt_accelerated, dump_tree, BACKEND
from .stats import TreeStats, tree_stats, mean_siblings, sibling_counts
from .geomvol import (
    DimConstants,
    ball_volume_constants,
    sibling_kernel,
    z_cut,
    lens_ratio,
)
from .quadrature import (
    QuadResult,
    mean_siblings_limit,
    limit_gap_main,
    limit_gap_correction,
    circle_limit_integral,
    rrt_limit_integral,
    limit_table,
    MEAN_SIBLINGS_CIRCLE,
    MEAN_SIBLINGS_RRT,
)
from .locallimit import PoissonSample, sample_poisson_tree, estimate_mean_siblings

__all__ = [
    "__version__",
    "Space",
    "sample_points",
    "distance",
    "LabelledTree",
    "build_nnt",
    "build_nnt_accelerated",
    "dump_tree",
    "BACKEND",
    "TreeStats",
    "tree_stats",
    "mean_siblings",
    "sibling_counts",
    "DimConstants",
    "ball_volume_constants",
    "sibling_kernel",
    "z_cut",
    "lens_ratio",
    "QuadResult",
    "mean_siblings_limit",
    "limit_gap_main",
    "limit_gap_correction",
    "circle_limit_integral",
    "rrt_limit_integral",
    "limit_table",
    "MEAN_SIBLINGS_CIRCLE",
    "MEAN_SIBLINGS_RRT",
    "PoissonSample",
    "sample_poisson_tree",
    "estimate_mean_siblings",
]
