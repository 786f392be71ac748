import dataclasses
import math

import numpy as np
import pytest

from sap_lab import analytic, numerics
from sap_lab.errors import ParameterError
from sap_lab.model import NetworkParams


def _params(**kw) -> NetworkParams:
    base = dict(lambda1=5e-4, lambda2=0.0, p1=19.952623149688797, p2=0.19952623149688797,
                alpha=4.0, d=2.0, tau=0.5, gamma=1.0)
    base.update(kw)
    return NetworkParams(**base)


# -- mean interference and the exclusion radius ------------------------------


def test_mean_interference_pure_path_loss():
    p = _params(lambda1=1e-300, p1=1.0)  # lambda1 must stay positive
    assert analytic.mean_interference(1.0, p) == pytest.approx(1.0, rel=1e-12)
    assert analytic.mean_interference(2.0, p) == pytest.approx(1.0 / 16.0, rel=1e-12)


def test_mean_interference_campbell_oracle():
    # Monte Carlo mean of the faded field: nearest at exactly R plus a PPP
    # annulus outside, truncated where the tail is negligible.
    p = _params()
    radius, outer = 10.0, 200.0
    rng = np.random.default_rng(1234)
    drops = 100_000
    lam_area = p.lambda1 * math.pi * (outer**2 - radius**2)
    counts = rng.poisson(lam_area, drops)
    total = int(counts.sum())
    idx = np.repeat(np.arange(drops), counts)
    r = np.sqrt(rng.uniform(radius**2, outer**2, total))
    h = rng.exponential(size=total)
    field = np.bincount(idx, weights=p.p1 * h * r**-p.alpha, minlength=drops)
    nearest = p.p1 * rng.exponential(size=drops) * radius**-p.alpha
    mc = float(np.mean(field + nearest))
    assert mc == pytest.approx(analytic.mean_interference(radius, p), rel=0.02)


def test_empty_ball_radius_no_field_degenerates():
    p = _params(lambda1=1e-300, p1=1.0)
    assert analytic.empty_ball_radius(1.0, p).radius == pytest.approx(1.0, rel=1e-12)


def test_empty_ball_radius_round_trip(fig7_params):
    for r in (0.5, 3.6, 10.0, 100.0):
        i = analytic.mean_interference(r, fig7_params)
        ball = analytic.empty_ball_radius(i, fig7_params)
        assert ball.radius == pytest.approx(r, rel=1e-9)
        assert ball.measured_interference == i


def test_empty_ball_radius_matches_alpha4_closed_form():
    p = _params()
    rng = np.random.default_rng(5)
    for _ in range(200):
        i = 10.0 ** rng.uniform(-9, 2)
        lam = 10.0 ** rng.uniform(-6, -2)
        p1 = 10.0 ** rng.uniform(-2, 2)
        local = _params(lambda1=lam, p1=p1)
        root = analytic.empty_ball_radius(i, local).radius
        closed = analytic.empty_ball_radius_alpha4(i, lam, p1)
        assert root == pytest.approx(closed, rel=1e-9)


def test_empty_ball_radius_rejects_nonpositive():
    with pytest.raises(ParameterError):
        analytic.empty_ball_radius(0.0, _params())


def test_empty_ball_radii_vector_matches_scalar(fig7_params):
    i_vals = np.geomspace(1e-7, 1e-1, 40)
    vec = analytic.empty_ball_radii(i_vals, fig7_params)
    for i, r in zip(i_vals, vec):
        assert r == pytest.approx(analytic.empty_ball_radius(float(i), fig7_params).radius, rel=1e-8)
    assert math.isinf(analytic.empty_ball_radii(np.array([0.0]), fig7_params)[0])


def test_radius_monotone_in_density_power_and_exponent():
    i = 1e-4
    radii = [analytic.empty_ball_radius(i, _params(lambda1=lam)).radius
             for lam in (1e-5, 1e-4, 1e-3, 1e-2)]
    assert all(a <= b + 1e-12 for a, b in zip(radii, radii[1:]))
    radii = [analytic.empty_ball_radius(i, _params(p1=p1)).radius
             for p1 in (0.1, 1.0, 10.0, 100.0)]
    assert all(a <= b + 1e-12 for a, b in zip(radii, radii[1:]))
    # larger exponent shrinks the inferred ball (radii above one meter)
    radii = [analytic.empty_ball_radius(i, _params(alpha=a)).radius
             for a in (2.5, 3.0, 4.0, 5.0, 6.0)]
    assert all(r > 1.0 for r in radii)
    assert all(a >= b - 1e-12 for a, b in zip(radii, radii[1:]))


# -- ring intensity -----------------------------------------------------------


def test_ring_intensity_cases():
    lam = 7e-3
    r_ball, d = 5.0, 2.0
    # fully inside the exclusion ball
    assert analytic.ring_intensity((r_ball - d) / 2.0, r_ball, d, lam) == 0.0
    # outside the tangency circle: full ring
    y = r_ball + d + 1.0
    assert analytic.ring_intensity(y, r_ball, d, lam) == pytest.approx(2.0 * math.pi * lam * y)
    # continuous at exact tangency
    y = r_ball + d
    assert analytic.ring_intensity(y, r_ball, d, lam) == pytest.approx(2.0 * math.pi * lam * y)
    # ball smaller than the pair distance: full ring near the receiver
    assert analytic.ring_intensity(0.5, 2.0, 5.0, lam) == pytest.approx(2.0 * math.pi * lam * 0.5)
    # degenerate co-location
    assert analytic.ring_intensity(1.0, 2.0, 0.0, lam) == 0.0
    assert analytic.ring_intensity(3.0, 2.0, 0.0, lam) == pytest.approx(2.0 * math.pi * lam * 3.0)


def test_ring_intensity_matches_arc_geometry():
    # interior overlap case against a brute-force arc fraction
    lam, r_ball, d = 1e-3, 5.0, 2.0
    rng = np.random.default_rng(0)
    for y in (3.5, 5.0, 6.5):
        angles = rng.uniform(0.0, 2.0 * math.pi, 200_000)
        dist_to_tx = np.sqrt(y * y + d * d - 2.0 * y * d * np.cos(angles))
        frac_outside = float(np.mean(dist_to_tx > r_ball))
        expected = frac_outside * 2.0 * math.pi * lam * y
        assert analytic.ring_intensity(y, r_ball, d, lam) == pytest.approx(expected, rel=0.02)


# -- access probability -------------------------------------------------------


def test_access_probability_zero_threshold(fig7_params):
    assert analytic.access_probability(3.6, 0.0, fig7_params) == 1.0
    assert analytic.access_probability_lower_bound(10.0, 0.0, dataclasses.replace(fig7_params, d=20.0)) == 1.0


def test_access_probability_colocated_pair(fig7_params):
    p = dataclasses.replace(fig7_params, d=0.0)
    assert analytic.access_probability(3.6, 1.0, p) == 1.0
    assert analytic.access_probability_lower_bound(3.6, 1.0, p) == 1.0


def test_lower_bound_zero_threshold(fig7_params):
    p = fig7_params
    assert analytic.access_probability_lower_bound(10.0, 0.0, p) == pytest.approx(1.0)
    # the fully closed-form variant keeps the extra inequality step and is
    # strictly loose at zero threshold when the ball encloses the pair
    lb_printed = analytic.access_probability_lower_bound(10.0, 0.0, p, form="printed")
    expected = math.exp(
        -math.pi * p.lambda1 * (10.0 - p.d) ** 2 * (numerics.rho_constant(p.alpha) - 1.0)
    )
    assert lb_printed == pytest.approx(expected, rel=1e-9)


def test_printed_form_below_tight_form(fig7_params):
    for theta in (0.3, 1.0, 3.0):
        for r in (1.0, 3.6, 8.0):
            tight = analytic.access_probability_lower_bound(r, theta, fig7_params)
            printed = analytic.access_probability_lower_bound(r, theta, fig7_params, form="printed")
            assert printed <= tight + 1e-12


def test_lower_bound_below_exact(fig7_params, fig8_params):
    rng = np.random.default_rng(99)
    for params in (fig7_params, fig8_params):
        for _ in range(100):
            r = 10.0 ** rng.uniform(-0.3, 1.7)
            theta = 10.0 ** rng.uniform(-1, 2)
            d = rng.uniform(0.0, 10.0)
            p = dataclasses.replace(params, d=d)
            lb = analytic.access_probability_lower_bound(r, theta, p)
            ex = analytic.access_probability(r, theta, p)
            assert lb <= ex + 1e-6
            assert 0.0 <= lb <= 1.0 and 0.0 <= ex <= 1.0


def test_bound_gap_grows_with_pair_distance(fig7_params):
    for theta in (0.5, 1.0, 2.0):
        gaps = []
        for d in (1.2, 2.0):
            p = dataclasses.replace(fig7_params, d=d)
            gaps.append(
                analytic.access_probability(3.6, theta, p)
                - analytic.access_probability_lower_bound(3.6, theta, p)
            )
        assert gaps[1] > gaps[0]


def test_lower_bound_continuous_at_case_boundary(fig7_params):
    p = fig7_params
    lo = analytic.access_probability_lower_bound(p.d * (1.0 - 1e-7), 1.0, p)
    hi = analytic.access_probability_lower_bound(p.d * (1.0 + 1e-7), 1.0, p)
    assert abs(hi - lo) <= 1e-6


def test_access_probability_monotone_in_theta(fig7_params):
    values = [analytic.access_probability(3.6, t, fig7_params) for t in (0.0, 0.1, 1.0, 10.0)]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))
    values = [analytic.access_probability_lower_bound(3.6, t, fig7_params) for t in (0.1, 1.0, 10.0)]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


def test_access_probability_monotone_in_interference(fig7_params):
    levels = np.geomspace(1e-6, 1e-2, 12)
    values = [
        analytic.access_probability(analytic.empty_ball_radius(float(i), fig7_params).radius, 1.0, fig7_params)
        for i in levels
    ]
    assert all(a >= b - 1e-9 for a, b in zip(values, values[1:]))


# -- asymptotes ----------------------------------------------------------------


def test_small_interference_limits(fig8_params):
    p = fig8_params
    assert analytic.access_probability_small_interference(1.0, 0.0, p) == 1.0
    # grows to one as the ball expands, albeit slowly (the closed form's
    # tail limit carries a squared radius where the exponent calls for the
    # path-loss power)
    assert analytic.access_probability_small_interference(1e6, 1.0, p) == pytest.approx(1.0, abs=1e-3)
    vals = [analytic.access_probability_small_interference(r, 1.0, p) for r in (10.0, 100.0, 1e3, 1e4)]
    assert all(a <= b + 1e-12 for a, b in zip(vals, vals[1:]))


def test_small_interference_agreement_as_printed(fig8_params):
    # quantify the as-printed closed form's gap to the exact value at a
    # large ball, in a short-pair configuration
    p = dataclasses.replace(fig8_params, d=2.0)
    r = 100.0 * p.d
    exact = analytic.access_probability(r, 1.0, p)
    printed = analytic.access_probability_small_interference(r, 1.0, p)
    gap = abs(exact - printed)
    print(f"printed small-interference gap at theta=1: {gap:.4f}")
    assert gap < 0.06
    # at a gentle threshold the printed form does approach the exact value
    gap_small_theta = abs(
        analytic.access_probability(r, 0.1, p)
        - analytic.access_probability_small_interference(r, 0.1, p)
    )
    assert gap_small_theta <= 0.01


def test_large_interference_limit(fig8_params):
    p = fig8_params
    assert analytic.access_probability_large_interference(0.0, p) == 1.0
    # vanishing primary density leaves only the nearest-interferer factor
    sparse = dataclasses.replace(p, lambda1=1e-300)
    assert analytic.access_probability_large_interference(1.0, sparse) == pytest.approx(
        p.p2 / (p.p2 + p.p1), rel=1e-9
    )
    exact = analytic.access_probability(p.d / 100.0, 1.0, p)
    limit = analytic.access_probability_large_interference(1.0, p)
    assert abs(exact - limit) <= 0.01
