#!/usr/bin/env python3
"""Benchmark the compiled attachment kernels against the numpy fallback.

Both backends implement identical contracts (and return identical arrays;
verified here on every run), so the only difference is wall time.

Usage:
    python benchmarks/bench_builders.py [--quick]
"""

import argparse
import time

import numpy as np

from nntlab import _attach_py
from nntlab.spaces import Space, sample_points

try:
    from nntlab import _attach_c
except ImportError:
    _attach_c = None


CONFIGS = [
    ("sphere", 1, 20_000),
    ("sphere", 3, 10_000),
    ("torus", 2, 200_000),
    ("torus", 3, 100_000),
    ("rrt", 0, 200_000),
]

QUICK_CONFIGS = [
    ("sphere", 1, 2_000),
    ("torus", 2, 20_000),
    ("rrt", 0, 20_000),
]


def run_backend(mod, kind, pts, n):
    t0 = time.perf_counter()
    if kind == "sphere":
        out = mod.build_sphere_scan(pts, 1)
    elif kind == "torus":
        out = mod.build_torus_grid(pts, 1)
    else:
        out = mod.build_rrt(n, 1)
    return time.perf_counter() - t0, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="small sizes, a few seconds")
    args = parser.parse_args()
    configs = QUICK_CONFIGS if args.quick else CONFIGS

    if _attach_c is None:
        print("compiled backend not available; timing the numpy fallback only")
    print(f"{'space':<8} {'d':>2} {'n':>8} {'python (s)':>11} {'compiled (s)':>13} {'speedup':>8}")
    for kind, d, n in configs:
        space = Space(kind, d)
        pts = sample_points(space, n, seed=7)
        t_py, out_py = run_backend(_attach_py, kind, pts, n)
        if _attach_c is not None:
            t_c, out_c = run_backend(_attach_c, kind, pts, n)
            assert np.array_equal(out_py[0], out_c[0]), "backends disagree"
            print(f"{kind:<8} {d:>2} {n:>8} {t_py:>11.3f} {t_c:>13.3f} {t_py / t_c:>7.1f}x")
        else:
            print(f"{kind:<8} {d:>2} {n:>8} {t_py:>11.3f} {'-':>13} {'-':>8}")


if __name__ == "__main__":
    main()
