"""Compiled kernels and the numpy fallback must agree bitwise."""

import numpy as np
import pytest

from nntlab import _attach_py
from nntlab._backend import BACKEND
from nntlab._tiebreak import tie_pick
from nntlab.spaces import Space, sample_points

compiled = pytest.importorskip("nntlab._attach_c")


def test_backend_selected():
    assert BACKEND in ("compiled", "python")


def test_tie_pick_implementations_agree():
    for seed in (0, 1, 2**63 - 1, 2**64 - 1, 12345):
        for node in (1, 2, 10, 999, 10**6):
            for count in (1, 2, 3, 9, 10**4):
                assert tie_pick(seed, node, count) == compiled.tie_pick(seed, node, count)


@pytest.mark.parametrize(
    "kind,d,n",
    [
        ("sphere", 1, 700),
        ("sphere", 3, 300),
        ("sphere", 7, 200),
        ("torus", 1, 700),
        ("torus", 2, 2000),
        ("torus", 3, 900),
        ("torus", 5, 300),
    ],
)
def test_geometric_kernels_agree(kind, d, n):
    space = Space(kind, d)
    pts = sample_points(space, n, seed=31 + d)
    if kind == "sphere":
        pp, dp = _attach_py.build_sphere_scan(pts, 17)
        pc, dc = compiled.build_sphere_scan(pts, 17)
    else:
        pp, dp = _attach_py.build_torus_grid(pts, 17)
        pc, dc = compiled.build_torus_grid(pts, 17)
    assert np.array_equal(pp, pc)
    assert np.array_equal(dp[1:], dc[1:])


def test_rrt_kernels_agree():
    pp, _ = _attach_py.build_rrt(5000, 99)
    pc, _ = compiled.build_rrt(5000, 99)
    assert np.array_equal(pp, pc)


def test_small_n_grid_fallback_paths_agree():
    # exercises the i <= cutoff brute path and the aliasing full-scan path
    for n in (2, 3, 40, 65, 80):
        pts = sample_points(Space.torus(2), n, seed=n)
        pp, _ = _attach_py.build_torus_grid(pts, 5)
        pc, _ = compiled.build_torus_grid(pts, 5)
        assert np.array_equal(pp, pc)
