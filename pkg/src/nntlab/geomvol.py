"""Unit-ball volumes, spherical caps, two-ball lens ratios and bound checkers.

Conventions used throughout:

* ``d`` is the ambient dimension (integer >= 1; most two-ball quantities
  require d >= 2).
* Volumes are handled in log space (via log-gamma), so ratios stay finite
  far beyond the point where the volumes themselves underflow (d ~ 500).
* The configuration of two balls is parametrised by the radius ratio z >= 0
  of the second ball (the first has radius 1) and the angle theta in [0, pi]
  between the line of centres and a reference axis through a point of the
  unit sphere; the centre distance is then sqrt(1 + z^2 - 2 z cos theta).
  The admissible domain is z >= z_cut(theta) = max(0, 2 cos theta).
* ``lens_ratio`` is (volume of the z-ball minus the intersection) / V_d;
  it lives in [max(0, z^d - 1), z^d] and is clamped there, since values
  outside are roundoff by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc, gammaln
from numpy.polynomial.legendre import leggauss

__all__ = [
    "DimConstants",
    "ball_volume_constants",
    "sibling_kernel",
    "kernel_tail_integral",
    "z_cut",
    "cap_fraction",
    "cap_fraction_quad",
    "lens_ratio",
    "lens_ratio_pow",
    "ball_intersection_ratio",
    "lens_lower_bounds_hold",
    "kernel_drop_bounds_hold",
    "gap_bound_region",
    "gap_bound_value",
    "kernel_gap_bound_holds",
    "lens_sweep_grid",
    "gap_region_samples",
    "GAP_REGIONS",
]


# --------------------------------------------------------------------------
# volumes


def _log_ball_volume(d: int) -> float:
    return 0.5 * d * math.log(math.pi) - float(gammaln(0.5 * d + 1.0))


@dataclass(frozen=True)
class DimConstants:
    """Per-dimension constants of the sibling integrands.

    ``prefactor``        2 (d-1) V_{d-1} / V_d     (double-integral form)
    ``prefactor_over_d`` 2 (d-1) V_{d-1} / (d V_d) (after the u = z^d change)
    """

    d: int
    log_ball_volume: float
    log_volume_ratio: float  # log(V_{d-1} / V_d)
    prefactor: float
    prefactor_over_d: float


def ball_volume_constants(d: int) -> DimConstants:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    log_v = _log_ball_volume(d)
    log_ratio = _log_ball_volume(d - 1) - log_v
    pref = 2.0 * (d - 1) * math.exp(log_ratio)
    return DimConstants(
        d=d,
        log_ball_volume=log_v,
        log_volume_ratio=log_ratio,
        prefactor=pref,
        prefactor_over_d=pref / d,
    )


# --------------------------------------------------------------------------
# the sibling kernel


_SERIES_CUT = 1e-3
# coefficients of sum_k (-1)^k (k+1)/(k+2) x^k, k = 0..8
_SERIES = [((-1.0) ** k * (k + 1.0) / (k + 2.0)) for k in range(9)]


def sibling_kernel(x):
    """The decreasing convex kernel (ln(1+x)/x - 1/(1+x)) / x of the sibling
    integrands; continuous value 1/2 at 0, range (0, 1/2], total integral 1.

    A degree-8 alternating series is used below x = 1e-3 where the direct
    expression loses digits to cancellation.  Accepts scalars or arrays.
    """
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0):
        raise ValueError("kernel argument must be nonnegative")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    small = arr < _SERIES_CUT
    if np.any(small):
        xs = arr[small]
        acc = np.full_like(xs, _SERIES[-1])
        for c in reversed(_SERIES[:-1]):
            acc = acc * xs + c
        out[small] = acc
    if np.any(~small):
        xl = arr[~small]
        out[~small] = (np.log1p(xl) / xl - 1.0 / (1.0 + xl)) / xl
    return float(out[0]) if scalar else out


def kernel_tail_integral(a: float) -> float:
    """Integral of the sibling kernel over [a, infinity): log1p(a)/a, 1 at a=0."""
    if a < 0:
        raise ValueError("lower bound must be nonnegative")
    if a == 0.0:
        return 1.0
    return math.log1p(a) / a


def z_cut(theta: float) -> float:
    """Lower edge of the admissible radius ratio: max(0, 2 cos theta)."""
    return max(0.0, 2.0 * math.cos(theta))


# --------------------------------------------------------------------------
# spherical caps and the lens ratio


def cap_fraction(t, d: int):
    """Volume fraction of the unit d-ball above the hyperplane x = t.

    Equals (V_{d-1}/V_d) * integral_t^1 (1 - x^2)^{(d-1)/2} dx, evaluated
    through the regularised incomplete beta of parameters ((d+1)/2, 1/2);
    arguments outside [-1, 1] are clipped (they arise from roundoff in the
    plane offsets).  Accepts scalars or arrays.
    """
    t = np.clip(np.asarray(t, dtype=float), -1.0, 1.0)
    scalar = t.ndim == 0
    t = np.atleast_1d(t)
    frac = 0.5 * betainc(0.5 * (d + 1), 0.5, 1.0 - t * t)
    out = np.where(t >= 0, frac, 1.0 - frac)
    return float(out[0]) if scalar else out


_GL_CAP = leggauss(240)


def cap_fraction_quad(t: float, d: int) -> float:
    """Gauss-Legendre evaluation of :func:`cap_fraction` (cross-check route).

    Uses x = cos(phi), turning the integrand into the smooth sin^d(phi) so
    the fixed rule is accurate to ~1e-14 for d <= 30; prefer
    :func:`cap_fraction` generally.
    """
    t = min(max(t, -1.0), 1.0)
    nodes, weights = _GL_CAP
    b = math.acos(t)
    phi = 0.5 * b * (nodes + 1.0)
    integral = 0.5 * b * float(weights @ np.sin(phi) ** d)
    return math.exp(ball_volume_constants(d).log_volume_ratio) * integral


def _lens_core(z, u, theta: float, d: int):
    """Shared lens computation; z and u = z^d may be arrays."""
    cos_t = math.cos(theta)
    delta2 = 1.0 + z * z - 2.0 * z * cos_t
    if np.any(delta2 <= 0.0):
        raise ValueError("coincident ball centres (z = 1, theta = 0) are outside the domain")
    delta = np.sqrt(delta2)
    x1 = (1.0 - z * cos_t) / delta
    x2 = (cos_t - z) / delta
    intersection = u * cap_fraction(-x2, d) + cap_fraction(x1, d)
    lens = u - intersection
    return np.clip(lens, np.maximum(0.0, u - 1.0), u)


def _check_domain(z, theta: float, d: int) -> None:
    if d < 2:
        raise ValueError(f"two-ball quantities need d >= 2, got {d}")
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"theta must lie in [0, pi], got {theta}")
    zc = z_cut(theta)
    if np.any(np.asarray(z) < zc - 1e-12 * max(1.0, zc)):
        raise ValueError(f"radius ratio below the admissible cut {zc} at theta={theta}")


def lens_ratio(z: float, theta: float, d: int) -> float:
    """(Volume of z-ball minus two-ball intersection) / V_d, clamped to
    [max(0, z^d - 1), z^d]."""
    _check_domain(z, theta, d)
    z = float(z)
    return float(_lens_core(z, z**d, theta, d))


def lens_ratio_pow(u, theta: float, d: int):
    """Same as :func:`lens_ratio` but parametrised by u = z^d (the natural
    integration variable); accepts scalar or array u."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("u must be nonnegative")
    z = u ** (1.0 / d)
    _check_domain(z, theta, d)
    out = _lens_core(z, u, theta, d)
    return float(out) if out.ndim == 0 else out


def ball_intersection_ratio(z: float, theta: float, d: int) -> float:
    """Two-ball intersection volume divided by V_d; in [0, min(1, z^d)]."""
    _check_domain(z, theta, d)
    u = float(z) ** d
    return float(np.clip(u - _lens_core(float(z), u, theta, d), 0.0, min(1.0, u)))


# --------------------------------------------------------------------------
# lower bounds on the lens ratio


def _c_theta(theta: float) -> float:
    """Upper radius-ratio boundary 1/(cos theta + 0.01) of the refined-bound
    region for theta < pi/2."""
    return 1.0 / (math.cos(theta) + 0.01)


def _refined_region(u: float, theta: float, d: int) -> bool:
    if theta >= math.pi / 2.0:
        return True
    return z_cut(theta) ** d <= u <= _c_theta(theta) ** d


def _refined_lower_bound(u: float, theta: float, d: int) -> float:
    """u minus the cap-area overestimate of the intersection; valid on the
    region of :func:`_refined_region`."""
    if u == 0.0:
        return 0.0
    z = u ** (1.0 / d)
    cos_t = math.cos(theta)
    sin_t = math.sin(theta)
    delta2 = 1.0 + z * z - 2.0 * z * cos_t
    # u * sin^{d+1} / delta^d in log space; sin_t == 0 only at theta in {0, pi}
    if sin_t <= 0.0:
        envelope = 0.0
    else:
        envelope = math.exp(
            math.log(u) + (d + 1) * math.log(sin_t) - 0.5 * d * math.log(delta2)
        )
    inv_terms = 1.0 / (1.0 / z - cos_t) + 1.0 / (z - cos_t)
    return u - math.sqrt(2.0) / (math.pi * math.sqrt(d)) * envelope * inv_terms


def lens_lower_bounds_hold(z: float, theta: float, d: int) -> bool:
    """Checks the two analytic lower bounds on the lens ratio at (z, theta, d):
    the containment bound max(0, u-1) everywhere, and the refined cap bound
    on its stated region.  Slack 1e-12 * max(1, u) absorbs roundoff."""
    u = float(z) ** d
    lens = lens_ratio(z, theta, d)
    slack = 1e-12 * max(1.0, u)
    if lens < max(0.0, u - 1.0) - slack:
        return False
    if z > 0 and _refined_region(u, theta, d):
        if lens < _refined_lower_bound(u, theta, d) - slack:
            return False
    return True


def lens_sweep_grid(n_points: int = 10_000, d_max: int = 30):
    """Deterministic stratified (z, theta, d) grid covering the admissible
    domain, for bound sweeps; yields ~n_points triples."""
    n_theta = 25
    n_off = 20
    n_d = max(1, n_points // (n_theta * n_off))
    thetas = np.linspace(0.02, math.pi - 0.02, n_theta)
    offsets = np.concatenate(([0.0], np.geomspace(1e-9, 50.0, n_off - 1)))
    dims = np.unique(np.linspace(2, d_max, n_d).astype(int))
    out = []
    for d in dims:
        for theta in thetas:
            base = z_cut(theta)
            for off in offsets:
                # base + 0 gives the domain edge itself (z = 0 when theta >= pi/2)
                out.append((float(base + off), float(theta), int(d)))
    return out


# --------------------------------------------------------------------------
# kernel drop bounds


def kernel_drop_bounds_hold(u: float, eps: float) -> bool:
    """Checks the four chained upper bounds on kernel(u-eps) - kernel(u):
    <= 1/2 and <= (2/3) eps for any 0 <= eps <= u; and for u >= 1.1,
    eps <= 1, <= 2 ln(u) eps / (u (u-1)^2) <= 242 ln(u) eps / u^3."""
    if not 0.0 <= eps <= u:
        raise ValueError("need 0 <= eps <= u")
    drop = sibling_kernel(u - eps) - sibling_kernel(u)
    slack = 1e-12
    if drop > 0.5 + slack:
        return False
    if drop > (2.0 / 3.0) * eps + slack:
        return False
    if u >= 1.1 and eps <= 1.0:
        tight = 2.0 * math.log(u) / (u * (u - 1.0) ** 2) * eps
        loose = 242.0 * math.log(u) / u**3 * eps
        if drop > tight + slack:
            return False
        if tight > loose + slack:
            return False
    return True


# --------------------------------------------------------------------------
# region-wise upper bounds on kernel(lens) - kernel(u)

GAP_REGIONS = (
    "low_angle",
    "mid_cap",
    "mid_small",
    "mid_large",
    "mid_tail",
    "wide_cap",
    "wide_small",
    "wide_large",
    "wide_tail",
)

_ANGLE_B = math.acos(0.05)


def _angle_a(d: int) -> float:
    """Angle where the domain edge (2 cos theta)^d crosses 1.1."""
    return math.acos(1.1 ** (1.0 / d) / 2.0)


def gap_bound_region(u: float, theta: float, d: int) -> str:
    """Locates (u, theta) in the partition of the gap-bound table.

    Requires u inside the integration domain (u >= z_cut(theta)^d up to
    roundoff)."""
    if d < 2:
        raise ValueError("region table is stated for d >= 2")
    lo = z_cut(theta) ** d
    if u < lo - 1e-12 * max(1.0, lo):
        raise ValueError("u below the integration domain")
    if theta <= math.pi / 4.0:
        return "low_angle"
    if theta <= math.pi / 2.0:
        if u <= 0.1**d:
            return "mid_cap"
        if u <= 1.1 and u >= max(0.1, 2.0 * math.cos(theta)) ** d:
            return "mid_small"
        c_d = _c_theta(theta) ** d
        if 1.1 <= u <= c_d:
            return "mid_large"
        return "mid_tail"
    if u <= 0.1**d:
        return "wide_cap"
    if u <= 1.1:
        return "wide_small"
    if u <= 10.0**d:
        return "wide_large"
    return "wide_tail"


def gap_bound_value(u: float, theta: float, d: int, region: str | None = None) -> float:
    """Tabulated upper bound for kernel(lens) - kernel(u) in the region of
    (u, theta)."""
    if region is None:
        region = gap_bound_region(u, theta, d)
    sqrt_d = math.sqrt(d)
    sin_t = math.sin(theta)
    if region in ("low_angle", "mid_tail", "wide_tail"):
        return sibling_kernel(max(0.0, u - 1.0)) - sibling_kernel(u)
    if region in ("mid_cap", "wide_cap"):
        return 0.5
    if u <= 0.0:
        return 0.5  # degenerate corner; the cap rows cover it anyway
    z = u ** (1.0 / d)
    if region == "mid_small":
        delta2 = 1.0 + z * z - 2.0 * z * math.cos(theta)
        env = math.exp(math.log(u) + (d + 1) * math.log(sin_t) - 0.5 * d * math.log(delta2))
        return 18.0 * math.sqrt(2.0) / (math.pi * sqrt_d) * env
    if region == "mid_large":
        delta2 = 1.0 + z * z - 2.0 * z * math.cos(theta)
        env = math.exp((d + 1) * math.log(sin_t) - 0.5 * d * math.log(delta2))
        return 25168.0 * math.sqrt(2.0) / (math.pi * sqrt_d) * math.log(u) / u**2 * env
    if region == "wide_small":
        env = math.exp(math.log(u) + (d + 1) * math.log(sin_t) - 0.5 * d * math.log1p(z * z))
        return 8.0 * math.sqrt(2.0) / (math.pi * sqrt_d) * env
    if region == "wide_large":
        damp = math.exp(-0.5 * d * math.log1p(1.1 ** (2.0 / d)))
        return 2662.0 * math.sqrt(2.0) / (math.pi * sqrt_d) * damp * math.log(u) / u**2
    raise ValueError(f"unknown region {region!r}")


def kernel_gap_bound_holds(u: float, theta: float, d: int) -> bool:
    """True when kernel(lens_ratio) - kernel(u) respects its region bound."""
    gap = sibling_kernel(lens_ratio_pow(u, theta, d)) - sibling_kernel(u)
    return gap <= gap_bound_value(u, theta, d) + 1e-12


def gap_region_samples(region: str, d: int, count: int, seed: int):
    """Deterministic (u, theta) samples stratified inside one table region.

    u is drawn log-uniformly across the region's u-range (capped at 1e6 times
    the lower edge for the unbounded rows), theta uniformly across the
    admissible angles of the region.
    """
    rng = np.random.default_rng(seed & ((1 << 64) - 1))
    out = []
    guard = 0
    while len(out) < count and guard < 50 * count:
        guard += 1
        if region == "low_angle":
            theta = rng.uniform(1e-3, math.pi / 4.0)
            lo, hi = z_cut(theta) ** d, (z_cut(theta) ** d) * 1e6
        elif region == "mid_cap":
            theta = rng.uniform(_ANGLE_B, math.pi / 2.0)
            lo, hi = z_cut(theta) ** d, 0.1**d
        elif region == "mid_small":
            theta = rng.uniform(_angle_a(d), math.pi / 2.0)
            lo, hi = max(0.1, 2.0 * math.cos(theta)) ** d, 1.1
        elif region == "mid_large":
            theta = rng.uniform(math.pi / 4.0, math.pi / 2.0)
            lo, hi = max(1.1, z_cut(theta) ** d), _c_theta(theta) ** d
        elif region == "mid_tail":
            theta = rng.uniform(math.pi / 4.0, math.pi / 2.0)
            lo = max(_c_theta(theta), z_cut(theta), 1.01) ** d
            hi = lo * 1e6
        elif region == "wide_cap":
            theta = rng.uniform(math.pi / 2.0, math.pi)
            lo, hi = 0.0, 0.1**d
        elif region == "wide_small":
            theta = rng.uniform(math.pi / 2.0, math.pi)
            lo, hi = 0.1**d, 1.1
        elif region == "wide_large":
            theta = rng.uniform(math.pi / 2.0, math.pi)
            lo, hi = 1.1, 10.0**d
        elif region == "wide_tail":
            theta = rng.uniform(math.pi / 2.0, math.pi)
            lo, hi = 10.0**d, 10.0**d * 1e6
        else:
            raise ValueError(f"unknown region {region!r}")
        if hi <= lo:
            continue
        if lo > 0.0:
            u = math.exp(rng.uniform(math.log(lo), math.log(hi)))
        else:
            u = hi * rng.uniform(0.0, 1.0)
        u = min(max(u, lo), hi)
        if gap_bound_region(u, theta, d) == region:
            out.append((u, theta))
    if len(out) < count:
        raise RuntimeError(f"could not populate region {region!r} at d={d}")
    return out
