import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from sap_lab import numerics
from sap_lab.errors import BracketError, ParameterError, QuadratureToleranceWarning


def test_integrate_constant():
    assert numerics.integrate(lambda x: np.ones_like(x), 0.0, 2.0 * math.pi) == pytest.approx(
        2.0 * math.pi, rel=1e-12
    )


def test_integrate_linear():
    assert numerics.integrate(lambda x: x, 0.0, 1.0) == pytest.approx(0.5, rel=1e-12)


def test_integrate_long_interval_arctan():
    val = numerics.integrate(lambda u: 1.0 / (1.0 + u * u), 0.0, 1e6)
    assert val == pytest.approx(math.atan(1e6), abs=1e-5)
    assert val == pytest.approx(math.pi / 2.0, abs=1e-5)


def test_integrate_rejects_reversed_bounds():
    with pytest.raises(ParameterError):
        numerics.integrate(lambda x: x, 1.0, 0.0)


def test_integrate_flags_exhausted_budget():
    cfg = numerics.QuadratureConfig(rel_tol=1e-14, abs_tol=1e-16, max_depth=2)
    with pytest.warns(QuadratureToleranceWarning):
        numerics.integrate(lambda x: np.sin(100.0 * x) ** 2, 0.0, 10.0, cfg)


def test_semi_infinite_inverse_square():
    assert numerics.integrate_semi_infinite(lambda y: y**-2.0, 1.0) == pytest.approx(1.0, rel=1e-9)


def test_semi_infinite_inverse_cube():
    assert numerics.integrate_semi_infinite(lambda y: y**-3.0, 2.0) == pytest.approx(0.125, rel=1e-9)


@pytest.mark.parametrize("alpha_s_a", [(3.0, 34.13, 5.6), (4.0, 1600.0, 9.0)])
def test_semi_infinite_matches_cutoff_oracle(alpha_s_a):
    # field-tail integrand shapes from both figure parameter families
    alpha, s, a = alpha_s_a
    lam = 7e-3

    def f(y):
        return 2.0 * math.pi * lam * y * s / (y**alpha + s)

    ours = numerics.integrate_semi_infinite(f, a)
    ref, _err = quad(lambda y: f(y), a, np.inf)
    assert ours == pytest.approx(ref, rel=1e-8)
    # large-cutoff oracle: finite quadrature plus the closed-form tail of the
    # dominating power law (the raw tail mass at alpha=3 exceeds 1e-6)
    cut = 1e5 * a
    tail = 2.0 * math.pi * lam * s * cut ** (2.0 - alpha) / (alpha - 2.0)
    assert ours == pytest.approx(numerics.integrate(f, a, cut) + tail, abs=1e-6)


def test_find_root_linear():
    assert numerics.find_root(lambda x: x - 1.0, 0.0, 2.0) == pytest.approx(1.0, abs=1e-9)


def test_find_root_sqrt2():
    root = numerics.find_root(lambda x: x * x - 2.0, 0.0, 2.0)
    assert root == pytest.approx(math.sqrt(2.0), abs=1e-9)


def test_find_root_requires_sign_change():
    with pytest.raises(BracketError):
        numerics.find_root(lambda x: x * x + 1.0, -1.0, 1.0)


def test_find_root_residual_below_bracket_values():
    f = lambda x: math.expm1(x) - 0.5
    root = numerics.find_root(f, -1.0, 1.0)
    assert abs(f(root)) <= min(abs(f(-1.0)), abs(f(1.0)))


def test_rho_constant_values():
    assert numerics.rho_constant(4.0) == pytest.approx(math.pi / 2.0, rel=1e-13)
    assert numerics.rho_constant(3.0) == pytest.approx(4.0 * math.pi / (3.0 * math.sqrt(3.0)), rel=1e-13)


def test_rho_constant_equals_full_integral():
    val = numerics.integrate_semi_infinite(lambda u: 1.0 / (1.0 + u * u), 0.0)
    assert val == pytest.approx(numerics.rho_constant(4.0), abs=1e-8)


def test_rho_coverage_values():
    assert numerics.rho_coverage(0.0, 4.0) == 0.0
    assert numerics.rho_coverage(1.0, 4.0) == pytest.approx(math.pi / 2.0, rel=1e-12)
    assert numerics.rho_coverage(4.0, 4.0) == pytest.approx(math.pi, rel=1e-12)


def test_rho_excluded_values():
    assert numerics.rho_coverage_excluded(0.0, 4.0) == 0.0
    # sqrt(x) * atan(sqrt(x)) closed form at alpha = 4
    assert numerics.rho_coverage_excluded(1.0, 4.0) == pytest.approx(math.pi / 4.0, rel=1e-8)
    for x in (0.01, 0.5, 7.0, 300.0):
        expected = math.sqrt(x) * math.atan(math.sqrt(x))
        assert numerics.rho_coverage_excluded(x, 4.0) == pytest.approx(expected, rel=1e-8)


@pytest.mark.parametrize("alpha", [2.5, 3.0, 4.0, 6.0])
def test_pfaff_inequality(alpha):
    rc = numerics.rho_constant(alpha)
    for x in np.geomspace(1e-3, 1e3, 25):
        lhs = 1.0 + numerics.rho_coverage_excluded(float(x), alpha)
        rhs = rc * (1.0 + x) ** (2.0 / alpha)
        assert lhs <= rhs + 1e-9


@settings(max_examples=30, deadline=None)
@given(
    x=st.floats(min_value=1e-3, max_value=1e3),
    scale=st.floats(min_value=1.01, max_value=3.0),
    alpha=st.sampled_from([2.5, 3.0, 4.0, 6.0]),
)
def test_rho_monotone_and_ordered(x, scale, alpha):
    full = numerics.rho_coverage(x, alpha)
    excl = numerics.rho_coverage_excluded(x, alpha)
    assert full - excl >= -1e-10
    assert numerics.rho_coverage(x * scale, alpha) >= full - 1e-12
    assert numerics.rho_coverage_excluded(x * scale, alpha) >= excl - 1e-9


def test_safe_acos_clamps():
    assert numerics.safe_acos(1.0000000002) == 0.0
    assert numerics.safe_acos(-1.0000000002) == pytest.approx(math.pi)
    assert numerics.safe_acos(0.0) == pytest.approx(math.pi / 2.0)


def test_config_validation():
    with pytest.raises(ParameterError):
        numerics.QuadratureConfig(rel_tol=0.0)
    with pytest.raises(ParameterError):
        numerics.RootConfig(max_iters=0)
