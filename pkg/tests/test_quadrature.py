import math

import numpy as np
import pytest

from nntlab import quadrature as q


def test_adaptive_on_polynomial():
    val, err, evals = q.adaptive_integrate(lambda x: x**2, (0.0, 1.0), 1e-12)
    assert val == pytest.approx(1.0 / 3.0, abs=1e-13)
    assert err >= 0 and evals >= 22


def test_adaptive_on_sine():
    val, _, _ = q.adaptive_integrate(np.sin, (0.0, math.pi), 1e-12)
    assert val == pytest.approx(2.0, abs=1e-12)


def test_adaptive_rejects_bad_inputs():
    with pytest.raises(ValueError):
        q.adaptive_integrate(np.sin, (0.0,), 1e-6)
    with pytest.raises(ValueError):
        q.adaptive_integrate(np.sin, (1.0, 0.0), 1e-6)
    with pytest.raises(ValueError):
        q.adaptive_integrate(np.sin, (0.0, 1.0), -1e-6)


def test_adaptive_reports_budget_exhaustion():
    # an integrable singularity needs many splits; a tiny budget must be
    # reported as failure, not returned silently
    with pytest.raises(q.ConvergenceError):
        q.adaptive_integrate(lambda x: 1.0 / np.sqrt(x), (0.0, 1.0), 1e-12, max_evals=200)


def test_circle_limit_value():
    r = q.circle_limit_integral(1e-10)
    assert r.value == pytest.approx(q.MEAN_SIBLINGS_CIRCLE, abs=1e-8)
    assert r.abs_error_estimate <= 1e-10


def test_circle_limit_leading_term_variant():
    # keeping only the 2/x term of the integrand doubles the unit triple
    # integral of 1/x, whose analytic value is 1
    r = q.circle_limit_integral(1e-10, drop_cross_term=True)
    assert r.value == pytest.approx(2.0 * 1.0, abs=1e-9)


def test_rrt_limit_value_and_oracle():
    r = q.rrt_limit_integral(1e-12)
    assert r.value == pytest.approx(2.0, abs=1e-10)
    assert r.abs_error_estimate <= 1e-12
    # independent 3-D quadrature of the raw nested form
    from scipy.integrate import tplquad

    raw, raw_err = tplquad(
        lambda zz, yy, xx: 1.0 / (xx * zz),
        1e-12,
        1.0,
        lambda xx: 0.0,
        lambda xx: xx,
        lambda xx, yy: max(yy, 1e-300),
        lambda xx, yy: 1.0,
        epsabs=1e-9,
    )
    assert r.value == pytest.approx(raw, abs=max(1e-6, 10 * raw_err))


def test_main_gap_scale_constants():
    lo, hi = q.main_gap_scale_constants(1e-12)
    assert lo.value == pytest.approx((math.pi * math.sqrt(3) - 3) / 8, abs=1e-10)
    assert hi.value == pytest.approx((math.pi * math.sqrt(3) + 3) / 8, abs=1e-10)


@pytest.mark.parametrize("d", [2, 5, 9])
def test_kernel_normalization_returns_two(d):
    r = q.kernel_normalization(d, 1e-8)
    assert r.value == pytest.approx(2.0, abs=1e-8)
    assert r.truncation_bound <= 1e-9
    assert r.abs_error_estimate <= 1e-8


def test_main_gap_positive_and_matches_scipy():
    from scipy.integrate import quad as sciquad
    from nntlab.geomvol import ball_volume_constants

    for d in (2, 3, 6, 11):
        r = q.limit_gap_main(d, 1e-12)
        assert r.value > 0
        pref = ball_volume_constants(d).prefactor_over_d

        def integrand(phi):
            s = math.sin(phi)
            if s <= 0:
                return 0.0
            w = math.exp(d * (math.log(2.0) + math.log(s)))
            return math.cos(phi) ** (d - 2) * (1.0 - math.log1p(w) / w)

        ref, ref_err = sciquad(integrand, 0.0, math.pi / 2, epsabs=1e-13, epsrel=1e-12, limit=200)
        assert r.value == pytest.approx(pref * ref, abs=max(1e-11, 10 * pref * ref_err))


def test_correction_term_nonnegative_and_decomposition():
    for d in (2, 3):
        limit = q.mean_siblings_limit(d, 1e-8)
        main = q.limit_gap_main(d, 1e-11)
        corr = q.limit_gap_correction(d, 1e-9)
        assert corr.value >= 0.0
        combined = (
            limit.abs_error_estimate
            + limit.truncation_bound
            + main.abs_error_estimate
            + corr.abs_error_estimate
            + corr.truncation_bound
        )
        assert abs(limit.value - (2.0 - main.value + corr.value)) <= combined


def test_limit_in_sanity_band_large_d():
    r = q.mean_siblings_limit(30, 1e-7)
    lo = 2.0 - 2.0 * q.GAP_MAIN_RATE ** (30 / 2)
    assert lo < r.value < 2.0


def test_refinement_convergence():
    a = q.mean_siblings_limit(3, 2e-7)
    b = q.mean_siblings_limit(3, 1e-7)
    assert abs(a.value - b.value) <= a.abs_error_estimate + a.truncation_bound
    assert b.abs_error_estimate <= a.abs_error_estimate * 1.5 + 1e-12


def test_quad_result_contract():
    r = q.mean_siblings_limit(4, 1e-7)
    assert r.abs_error_estimate >= 0
    assert r.truncation_bound <= 1e-7 / 10
    assert r.evaluations > 0


def test_dimension_and_tolerance_validation():
    with pytest.raises(ValueError):
        q.mean_siblings_limit(1, 1e-8)
    with pytest.raises(ValueError):
        q.limit_gap_main(1, 1e-8)
    with pytest.raises(ValueError):
        q.limit_gap_correction(0, 1e-8)
    with pytest.raises(ValueError):
        q.mean_siblings_limit(3, 0.0)
    with pytest.raises(ValueError):
        q.circle_limit_integral(-1.0)


def test_limit_table_single_row_and_identity():
    rows = q.limit_table([2], 1e-8)
    assert len(rows) == 1
    row = rows[0]
    assert row.d == 2
    assert 1.0 < row.value < 2.0
    main_tol, corr_tol = q._gap_tols(2, 1e-8)
    assert abs(row.value - (2.0 - row.gap_main + row.gap_correction)) <= (
        row.abs_error + main_tol + corr_tol
    )
    assert row.evaluations > 0 and row.seconds >= 0.0
