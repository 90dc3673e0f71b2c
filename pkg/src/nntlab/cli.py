"""Batch command-line front-end.

Subcommands
-----------
simulate   grow replicate trees on a space and report per-tree statistics
quadrature evaluate the limiting mean-sibling table over a dimension range
locallimit estimate the limit from Poisson windows, with a window-doubling
           bias check
verify     run the property suite (bound sweeps, identities, asymptotics,
           Monte-Carlo vs quadrature agreement); exit 0 iff all pass

Seeds are mandatory wherever randomness is involved: identical configurations
produce identical outputs (timing columns aside), and the worker count only
changes wall time because replicate r always uses seed ``seed + r``.
Exit codes: 0 success, 1 computation/check failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import io
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from . import geomvol, locallimit, quadrature, stats
from .nnt import build_nnt, build_nnt_accelerated
from .spaces import Space, sample_points
from .stats import tree_stats

SIM_COLUMNS = stats.CSV_COLUMNS + ("stderr_mean_siblings",)
QUAD_COLUMNS = ("d", "S_d", "err", "T_plus", "T_minus", "evaluations", "seconds")
LOCAL_COLUMNS = ("d", "L", "reps", "estimate", "std_error")


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else str(x)


def _config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:12]


def _emit(rows, columns, config, fmt, out, extra_comments=()):
    meta = f"version={__version__}, config={_config_hash(config)}"
    if fmt == "json":
        payload = {
            "rows": [{c: r.get(c) for c in columns} for r in rows],
            "version": __version__,
            "config_hash": _config_hash(config),
        }
        text = json.dumps(payload, indent=2, default=str) + "\n"
    else:
        buf = io.StringIO()
        buf.write(",".join(columns) + "\n")
        for r in rows:
            buf.write(",".join(_fmt(r.get(c)) for c in columns) + "\n")
        for line in extra_comments:
            buf.write(f"# {line}\n")
        buf.write(f"# {meta}\n")
        text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _workers(args) -> int:
    if args.workers is not None:
        return max(1, args.workers)
    env = os.environ.get("NNTLAB_WORKERS", "").strip()
    return max(1, int(env)) if env else 1


def _space_from(args) -> Space:
    if args.space == "rrt":
        if args.d not in (None, 0):
            raise ValueError("--d does not apply to the rrt space")
        return Space.rrt()
    if args.d is None or args.d < 1:
        raise ValueError(f"--d must be a positive integer for {args.space}")
    return Space(args.space, args.d)


def _simulate_one(task):
    kind, d, n, seed = task
    space = Space(kind, d)
    points = sample_points(space, n, seed)
    tree = build_nnt_accelerated(space, points, tie_seed=seed)
    st = tree_stats(tree)
    return seed, st


def cmd_simulate(args) -> int:
    try:
        space = _space_from(args)
        if args.n < 2:
            raise ValueError("--n must be at least 2")
        if args.reps < 1:
            raise ValueError("--reps must be at least 1")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    tasks = [(space.kind, space.d, args.n, args.seed + r) for r in range(args.reps)]
    nworkers = _workers(args)
    if nworkers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=nworkers) as pool:
            results = list(pool.map(_simulate_one, tasks))
    else:
        results = [_simulate_one(t) for t in tasks]
    results.sort(key=lambda pair: pair[0])
    rows = []
    for seed, st in results:
        rows.append(
            {
                "seed": seed,
                "space": space.kind,
                "d": space.d,
                "n": st.n,
                "mean_siblings": st.mean_siblings,
                "mean_sq_degree": st.mean_sq_degree,
                "root_degree": st.root_degree,
                "leaf_count": st.leaf_count,
                "depth_last": st.depth_last,
                "stderr_mean_siblings": None,
            }
        )
    sib = np.array([r["mean_siblings"] for r in rows])
    stderr = float(sib.std(ddof=1) / math.sqrt(len(sib))) if len(sib) > 1 else 0.0
    means = {
        col: float(np.mean([r[col] for r in rows]))
        for col in ("mean_sq_degree", "root_degree", "leaf_count", "depth_last")
    }
    rows.append(
        {
            "seed": "aggregate",
            "space": space.kind,
            "d": space.d,
            "n": args.n,
            "mean_siblings": float(sib.mean()),
            "stderr_mean_siblings": stderr,
            **means,
        }
    )
    config = {
        "command": "simulate",
        "space": space.kind,
        "d": space.d,
        "n": args.n,
        "reps": args.reps,
        "seed": args.seed,
        "format": args.format,
    }
    _emit(rows, SIM_COLUMNS, config, args.format, args.out)
    return 0


def _parse_d_range(text: str):
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out or any(d < 1 for d in out):
        raise ValueError(f"invalid dimension list {text!r}")
    return out


def cmd_quadrature(args) -> int:
    try:
        dims = _parse_d_range(args.d)
        if args.tol <= 0:
            raise ValueError("--tol must be positive")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rows = []
    comments = []
    for d in dims:
        if d == 1:
            rows.append(
                {
                    "d": 1,
                    "S_d": quadrature.MEAN_SIBLINGS_CIRCLE,
                    "err": 0.0,
                    "T_plus": None,
                    "T_minus": None,
                    "evaluations": 0,
                    "seconds": 0.0,
                }
            )
            comments.append(
                "d=1 reported from the closed form 1 + ln 2; the double-integral "
                "route applies only for d >= 2"
            )
            continue
        row = quadrature.limit_table([d], args.tol)[0]
        rows.append(
            {
                "d": row.d,
                "S_d": row.value,
                "err": row.abs_error,
                "T_plus": row.gap_main,
                "T_minus": row.gap_correction,
                "evaluations": row.evaluations,
                "seconds": row.seconds,
            }
        )
    values = [r["S_d"] for r in rows]
    monotone = all(a < b for a, b in zip(values, values[1:]))
    comments.append(f"S_d monotone increasing over requested d: {monotone} (reported, not asserted)")
    config = {"command": "quadrature", "d": args.d, "tol": args.tol, "format": args.format}
    _emit(rows, QUAD_COLUMNS, config, args.format, args.out, extra_comments=comments)
    return 0


def cmd_locallimit(args) -> int:
    try:
        if args.d is None or args.d < 1:
            raise ValueError("--d must be a positive integer")
        if args.L is None or args.L <= 0:
            raise ValueError("--L must be positive")
        if args.reps < 2:
            raise ValueError("--reps must be at least 2")
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        check = locallimit.window_doubling_check(args.d, args.L, args.reps, args.seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rows = [
        {
            "d": args.d,
            "L": args.L,
            "reps": args.reps,
            "estimate": check.estimate_small,
            "std_error": check.stderr_small,
        },
        {
            "d": args.d,
            "L": 2.0 * args.L,
            "reps": args.reps,
            "estimate": check.estimate_large,
            "std_error": check.stderr_large,
        },
    ]
    config = {
        "command": "locallimit",
        "d": args.d,
        "L": args.L,
        "reps": args.reps,
        "seed": args.seed,
        "format": args.format,
    }
    _emit(
        rows,
        LOCAL_COLUMNS,
        config,
        args.format,
        args.out,
        extra_comments=[f"window_doubling_consistent={check.consistent}"],
    )
    return 0


# --------------------------------------------------------------------------
# verify


def _check_reduced_integrals(quick):
    circle = quadrature.circle_limit_integral(1e-10)
    rrt = quadrature.rrt_limit_integral(1e-12)
    ok = (
        abs(circle.value - quadrature.MEAN_SIBLINGS_CIRCLE) <= 1e-8
        and abs(rrt.value - 2.0) <= 1e-10
    )
    return ok, f"circle={circle.value:.12f} rrt={rrt.value:.12f}"


def _check_scale_constants(quick):
    lo, hi = quadrature.main_gap_scale_constants(1e-12)
    target_lo = (math.pi * math.sqrt(3.0) - 3.0) / 8.0
    target_hi = (math.pi * math.sqrt(3.0) + 3.0) / 8.0
    ok = abs(lo.value - target_lo) <= 1e-10 and abs(hi.value - target_hi) <= 1e-10
    return ok, f"low={lo.value:.12f} high={hi.value:.12f}"


def _check_normalization(quick):
    dims = (2, 3, 5) if quick else tuple(range(2, 13))
    worst = 0.0
    for d in dims:
        r = quadrature.kernel_normalization(d, 1e-8)
        worst = max(worst, abs(r.value - 2.0))
    return worst <= 1e-8, f"max |norm - 2| = {worst:.2e} over d in {dims}"


def _check_decomposition(quick):
    dims = (2, 3) if quick else tuple(range(2, 11))
    worst = 0.0
    ok = True
    for d in dims:
        row = quadrature.limit_table([d], 1e-8)[0]
        main_tol, corr_tol = quadrature._gap_tols(d, 1e-8)
        gap = abs(row.value - (2.0 - row.gap_main + row.gap_correction))
        budget = row.abs_error + main_tol + corr_tol
        worst = max(worst, gap)
        ok = ok and gap <= budget
    return ok, f"max decomposition gap {worst:.2e} over d in {dims}"


def _check_lens_bounds(quick, lens_fn=None):
    grid = geomvol.lens_sweep_grid(1_000 if quick else 10_000, 30)
    if lens_fn is None:
        holds = geomvol.lens_lower_bounds_hold
    else:

        def holds(z, theta, d):
            u = z**d
            lens = lens_fn(z, theta, d)
            if lens < max(0.0, u - 1.0) - 1e-12 * max(1.0, u):
                return False
            return True

    bad = sum(0 if holds(z, th, d) else 1 for z, th, d in grid)
    return bad == 0, f"{bad} violations on {len(grid)} grid points"


def _check_kernel_drop(quick):
    count = 10_000 if quick else 100_000
    rng = np.random.default_rng(20260809)
    u = np.exp(rng.uniform(math.log(1e-6), math.log(1e6), count))
    eps = u * rng.uniform(0.0, 1.0, count)
    bad = sum(
        0 if geomvol.kernel_drop_bounds_hold(float(a), float(b)) else 1
        for a, b in zip(u, eps)
    )
    return bad == 0, f"{bad} violations on {count} pairs"


def _check_gap_bounds(quick):
    dims = (2, 5) if quick else (2, 5, 10, 20)
    per_region = 200 if quick else 10_000
    bad = total = 0
    for d in dims:
        for region in geomvol.GAP_REGIONS:
            samples = geomvol.gap_region_samples(region, d, per_region, seed=d)
            for u, theta in samples:
                total += 1
                if not geomvol.kernel_gap_bound_holds(u, theta, d):
                    bad += 1
    return bad == 0, f"{bad} violations on {total} samples, d in {dims}"


def _check_tree_identities(quick):
    reps = 200 if quick else 2_000
    ok = True
    for r in range(reps):
        pts = sample_points(Space.rrt(), 200, seed=r)
        tree = build_nnt_accelerated(Space.rrt(), pts, tie_seed=r)
        ok = ok and stats.degree_identity_holds(tree)
    sp = Space.torus(2)
    for r in range(10):
        tree = build_nnt_accelerated(sp, sample_points(sp, 500, seed=r), tie_seed=r)
        ok = ok and stats.degree_identity_holds(tree)
    return ok, f"degree identity exact on {reps} rrt + 10 torus trees"


def _check_asymptote_ratio(quick):
    ratios = []
    for d in (25, 50, 100, 200):
        tol = max(1e-15, 1e-4 * quadrature.gap_main_asymptote(d))
        ratios.append(quadrature.limit_gap_main(d, tol).value / quadrature.gap_main_asymptote(d))
    in_band = 0.95 <= ratios[-1] <= 1.05
    monotone = all(abs(a - 1.0) > abs(b - 1.0) for a, b in zip(ratios, ratios[1:]))
    return in_band and monotone, f"ratios {['%.4f' % r for r in ratios]}"


def _check_correction_slope(quick):
    dims = np.arange(6, 11 if quick else 21)
    vals = []
    for d in dims:
        tol = max(1e-15, 1e-4 * quadrature.GAP_CORRECTION_RATE ** int(d))
        vals.append(quadrature.limit_gap_correction(int(d), tol).value)
    vals = np.array(vals)
    slope = float(np.polyfit(dims, np.log(vals), 1)[0])
    bound = math.log(quadrature.GAP_CORRECTION_RATE) + 0.02
    ok = slope <= bound and bool((vals >= 0).all())
    return ok, f"slope {slope:.4f} <= {bound:.4f}, min {vals.min():.2e}"


def _check_mc_agreement(quick):
    # sizes chosen so the finite-n bias stays well inside the 3-sigma band
    if quick:
        n, reps, dims = 50_000, 8, (2,)
    else:
        n, reps, dims = 100_000, 8, (2, 3)
    ok = True
    details = []
    for d in dims:
        target = quadrature.mean_siblings_limit(d, 1e-8).value
        sp = Space.torus(d)
        vals = []
        for r in range(reps):
            seed = 1000 + r
            tree = build_nnt_accelerated(sp, sample_points(sp, n, seed), tie_seed=seed)
            vals.append(stats.mean_siblings(tree))
        vals = np.array(vals)
        se = vals.std(ddof=1) / math.sqrt(reps)
        z = (vals.mean() - target) / se
        ok = ok and abs(z) <= 3.0
        details.append(f"d={d} z={z:+.2f}")
    return ok, " ".join(details)


_CHECKS = (
    ("reduced-integrals", _check_reduced_integrals),
    ("gap-scale-constants", _check_scale_constants),
    ("kernel-normalization", _check_normalization),
    ("gap-decomposition", _check_decomposition),
    ("lens-lower-bounds", _check_lens_bounds),
    ("kernel-drop-bounds", _check_kernel_drop),
    ("kernel-gap-bounds", _check_gap_bounds),
    ("tree-identities", _check_tree_identities),
    ("main-gap-asymptote", _check_asymptote_ratio),
    ("correction-slope", _check_correction_slope),
    ("mc-vs-quadrature", _check_mc_agreement),
)


def cmd_verify(args) -> int:
    all_ok = True
    print(f"{'check':<24} {'status':<6} {'seconds':>8}  detail")
    for name, fn in _CHECKS:
        t0 = time.perf_counter()
        try:
            if name == "lens-lower-bounds" and args.fault_inject_lens:
                corrupt = lambda z, th, d: geomvol.lens_ratio(z, th, d) - 1e-3 * max(
                    1.0, z**d
                )
                ok, detail = fn(args.quick, lens_fn=corrupt)
            else:
                ok, detail = fn(args.quick)
        except Exception as exc:  # a crashed check is a failed check
            ok, detail = False, f"exception: {exc}"
        dt = time.perf_counter() - t0
        all_ok = all_ok and ok
        print(f"{name:<24} {'PASS' if ok else 'FAIL':<6} {dt:>8.2f}  {detail}")
    print("overall:", "PASS" if all_ok else "FAIL")
    return 0 if all_ok else 1


# --------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nntlab",
        description="nearest-neighbour tree simulation and sibling-limit quadrature",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="grow replicate trees and report statistics")
    sim.add_argument("--space", required=True, choices=("sphere", "torus", "rrt"))
    sim.add_argument("--d", type=int, default=None)
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--reps", type=int, default=1)
    sim.add_argument("--seed", type=int, required=True)
    sim.add_argument("--out", default=None)
    sim.add_argument("--format", choices=("csv", "json"), default="csv")
    sim.add_argument("--workers", type=int, default=None)
    sim.set_defaults(func=cmd_simulate)

    quad = sub.add_parser("quadrature", help="evaluate the limit table over dimensions")
    quad.add_argument("--d", required=True, help="dimension list, e.g. 3 or 2..10 or 2,5,9")
    quad.add_argument("--tol", type=float, default=1e-8)
    quad.add_argument("--out", default=None)
    quad.add_argument("--format", choices=("csv", "json"), default="csv")
    quad.set_defaults(func=cmd_quadrature)

    loc = sub.add_parser("locallimit", help="Poisson-window estimate of the limit")
    loc.add_argument("--d", type=int, required=True)
    loc.add_argument("--L", type=float, required=True)
    loc.add_argument("--reps", type=int, default=20)
    loc.add_argument("--seed", type=int, required=True)
    loc.add_argument("--out", default=None)
    loc.add_argument("--format", choices=("csv", "json"), default="csv")
    loc.set_defaults(func=cmd_locallimit)

    ver = sub.add_parser("verify", help="run the property suite")
    ver.add_argument("--quick", action="store_true", help="smaller sweeps, under a minute")
    ver.add_argument("--fault-inject-lens", action="store_true", help=argparse.SUPPRESS)
    ver.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
