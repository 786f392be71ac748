"""Joint tuning of the access threshold and decoding target.

Builds the average access probability, transmission success probability and
primary-outage constraint on top of the analytic engine, exposes the area
spectral efficiency (ASE) objective, and maximizes it over (theta, beta) by
grid search with local refinement.  A root-based shortcut covers the regime
where primary interference dominates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import analytic
from .errors import BracketError, InfeasibleProtectionError, ParameterError
from .model import NetworkParams, validate
from .numerics import (
    QuadratureConfig,
    RootConfig,
    find_root,
    integrate_semi_infinite,
    rho_constant,
    rho_coverage,
    rho_coverage_excluded,
)

__all__ = [
    "Optimum",
    "VARIANTS",
    "BACKENDS",
    "READINGS",
    "average_access_probability",
    "transmission_success_probability",
    "primary_outage",
    "min_access_threshold",
    "ase",
    "ase_surface",
    "optimize",
    "d_function",
    "solve_beta_asymptotic",
    "default_grid_db",
]

# Secondary-thinning variants: "printed" raises the average access
# probability to the 2/alpha power inside the active-density exponent,
# "linear" thins the density linearly (independent thinning).
VARIANTS = ("printed", "linear")
BACKENDS = ("exact", "lower_bound")
READINGS = ("printed", "corrected")

THETA_MAX = 1e6  # upper bracket for the protection threshold [linear]


@dataclass(frozen=True)
class Optimum:
    """Result of the joint (theta, beta) search.

    theta_bar is the binding minimum access threshold; lambda2_star the
    resulting density of concurrent secondary transmissions.
    """

    theta_star: float
    beta_star: float
    ase: float
    theta_bar: float
    lambda2_star: float


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ParameterError(f"variant must be one of {VARIANTS}, got {variant!r}")


def _check_backend(backend: str) -> None:
    if backend not in BACKENDS:
        raise ParameterError(f"backend must be one of {BACKENDS}, got {backend!r}")


def _ps(backend: str):
    return analytic.access_probability if backend == "exact" else analytic.access_probability_lower_bound


def _thinning_exponent(variant: str, alpha: float) -> float:
    return 2.0 / alpha if variant == "printed" else 1.0


def average_access_probability(
    theta: float,
    params: NetworkParams,
    cfg: QuadratureConfig | None = None,
    backend: str = "exact",
) -> float:
    """Access probability averaged over the nearest-primary distance.

    Integrates the conditional access probability against the Rayleigh
    nearest-neighbor density 2 pi lambda1 r exp(-pi lambda1 r^2), via the
    substitution v = pi lambda1 r^2.
    """
    if theta < 0.0:
        raise ParameterError(f"theta must be nonnegative, got {theta}")
    _check_backend(backend)
    ps = _ps(backend)
    scale = math.pi * params.lambda1

    def integrand(v: np.ndarray) -> np.ndarray:
        v = np.atleast_1d(v)
        out = np.empty_like(v)
        for i, vi in enumerate(v):
            if vi > 700.0:  # the exponential weight has underflowed
                out[i] = 0.0
                continue
            r = math.sqrt(vi / scale) if vi > 0.0 else 1e-300
            out[i] = ps(r, theta, params, cfg) * math.exp(-vi)
        return out

    return min(1.0, integrate_semi_infinite(integrand, 0.0, cfg))


# -- fixed-node evaluators used on the optimization hot path ---------------

_N_LAGUERRE = 64
_N_ANGULAR = 96


@lru_cache(maxsize=1)
def _laguerre_nodes() -> tuple[np.ndarray, np.ndarray]:
    return np.polynomial.laguerre.laggauss(_N_LAGUERRE)


@lru_cache(maxsize=1)
def _angular_nodes() -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(_N_ANGULAR)
    # map [-1, 1] -> [0, pi]
    return 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w


def _nearest_distance_nodes(lambda1: float) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Laguerre nodes for expectations over the nearest-primary distance."""
    v, w = _laguerre_nodes()
    return np.sqrt(v / (math.pi * lambda1)), w


@lru_cache(maxsize=32)
def _log_tail_spline(alpha: float):
    """log coverage-tail vs log10 lower limit, for vectorized evaluation."""
    from scipy.interpolate import CubicSpline

    from .numerics import coverage_tail

    log_lower = np.linspace(-14.0, 14.0, 451)
    vals = np.array([coverage_tail(10.0**x, alpha) for x in log_lower])
    return CubicSpline(log_lower, np.log(vals))


def _rho_excluded_vec(t: np.ndarray, alpha: float) -> np.ndarray:
    """Excluded coverage integral on an array of thresholds."""
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0.0
    if not np.any(pos):
        return out
    if alpha == 4.0:
        s = np.sqrt(t[pos])
        out[pos] = s * np.arctan(s)
    else:
        scale = t[pos] ** (2.0 / alpha)
        log_lower = np.clip(np.log10(1.0 / scale), -14.0, 14.0)
        out[pos] = scale * np.exp(_log_tail_spline(alpha)(log_lower))
    return out


def _ps_lb_fixed(r: np.ndarray, x: float, params: NetworkParams) -> np.ndarray:
    """Lower-bound access probability on an array of radii, fixed-node rules.

    Identical formula to the adaptive lower bound (tight form), evaluated
    with fixed Gauss-Legendre angular nodes and a closed-form or splined
    coverage tail, so the result is smooth in x; used where finite
    differences in x are taken.
    """
    p = params
    r = np.asarray(r, dtype=float)
    if x == 0.0 or p.d == 0.0:
        return np.ones_like(r)
    t_nodes, t_weights = _angular_nodes()
    q = p.p1 * x * p.d**p.alpha / p.p2
    dist_sq = (
        r[:, None] ** 2 - 2.0 * p.d * r[:, None] * np.cos(t_nodes)[None, :] + p.d**2
    )
    with np.errstate(divide="ignore"):
        ang = (1.0 / (1.0 + q * dist_sq ** (-p.alpha / 2.0))) @ t_weights / math.pi
    two_over_a = 2.0 / p.alpha
    rc = rho_constant(p.alpha)
    expo_far = math.pi * p.lambda1 * (p.p1 / p.p2) ** two_over_a * p.d**2 * rho_coverage(x, p.alpha)
    delta = r - p.d
    tiny = delta <= 1e-9 * np.maximum(r, 1.0)
    safe = np.where(tiny, 1.0, delta)
    with np.errstate(over="ignore"):
        t_term = p.d**p.alpha * p.p1 * x / (p.p2 * safe**p.alpha)
        expo_near = math.pi * p.lambda1 * safe**2 * _rho_excluded_vec(t_term, p.alpha)
    expo_limit = math.pi * p.lambda1 * p.d**2 * (p.p1 * x / p.p2) ** two_over_a * rc
    expo = np.where(delta <= 0.0, expo_far, np.where(tiny, expo_limit, expo_near))
    return ang * np.exp(-expo)


def _ps_exact_vector(r: np.ndarray, x: float, params: NetworkParams,
                     cfg: QuadratureConfig | None) -> np.ndarray:
    return np.array([analytic.access_probability(ri, x, params, cfg) for ri in r])


def _ps_vector(r: np.ndarray, x: float, params: NetworkParams,
               cfg: QuadratureConfig | None, backend: str) -> np.ndarray:
    if backend == "exact":
        return _ps_exact_vector(r, x, params, cfg)
    return _ps_lb_fixed(r, x, params)


def _avg_access_fixed(theta: float, params: NetworkParams,
                      cfg: QuadratureConfig | None, backend: str) -> float:
    r, w = _nearest_distance_nodes(params.lambda1)
    return float(min(1.0, _ps_vector(r, theta, params, cfg, backend) @ w))


# -- protection constraint --------------------------------------------------


def primary_outage(
    theta: float,
    params: NetworkParams,
    variant: str = "linear",
    cfg: QuadratureConfig | None = None,
    reading: str = "corrected",
    backend: str = "exact",
    phi2_hat: float | None = None,
) -> float:
    """Outage probability of a typical primary user (nearest-TX association).

    The "printed" reading keeps the access threshold inside the coverage
    integrals and the power ratio (P1/P2)^(2/alpha) on the secondary term.  The default "corrected"
    reading evaluates the coverage integrals at the primary decoding
    threshold gamma and restores the ratio to (P2/P1)^(2/alpha), which is
    what the nearest-association outage derivation and the Monte Carlo
    oracle give.  theta enters both through the average access probability.
    """
    if theta < 0.0:
        raise ParameterError(f"theta must be nonnegative, got {theta}")
    if reading not in READINGS:
        raise ParameterError(f"reading must be one of {READINGS}, got {reading!r}")
    _check_variant(variant)
    p = params
    phi = (
        phi2_hat
        if phi2_hat is not None
        else average_access_probability(theta, p, cfg, backend)
    )
    two_over_a = 2.0 / p.alpha
    if reading == "printed":
        x = theta
        num = p.lambda1 * p.p2**two_over_a
        den = (
            p.lambda2 * phi * rho_coverage(x, p.alpha) * p.p1**two_over_a
            + p.lambda1 * p.p2**two_over_a * (rho_coverage_excluded(x, p.alpha, cfg) + 1.0)
        )
    else:
        x = p.gamma
        num = p.lambda1 * p.p1**two_over_a
        den = (
            p.lambda2 * phi * rho_coverage(x, p.alpha) * p.p2**two_over_a
            + p.lambda1 * p.p1**two_over_a * (rho_coverage_excluded(x, p.alpha, cfg) + 1.0)
        )
    return 1.0 - num / den


def min_access_threshold(
    params: NetworkParams,
    variant: str = "linear",
    cfg: QuadratureConfig | None = None,
    reading: str = "corrected",
    method: str = "operational",
    backend: str = "exact",
) -> float:
    """Smallest access threshold meeting the primary outage budget.

    method="operational" (default) solves primary_outage(theta) = tau on
    [0, THETA_MAX] and returns 0 when the constraint is inactive at
    theta = 0.  method="printed-equation" solves the closed-form
    minimum-threshold equation of the printed reading instead.  Raises InfeasibleProtectionError when even
    full secondary suppression violates tau (primary network alone exceeds
    the budget).
    """
    validate(params)
    tau = params.tau

    if method == "printed-equation":
        two_over_a = 2.0 / params.alpha

        def g(theta: float) -> float:
            phi = average_access_probability(theta, params, cfg, backend)
            lhs = params.lambda2 * phi * params.p1**two_over_a * rho_coverage(theta, params.alpha) * (1.0 - tau)
            rx = rho_coverage_excluded(theta, params.alpha, cfg)
            rhs = params.lambda1 * params.p2**two_over_a * (tau + rx * tau - rx)
            return lhs - rhs

        grid = np.geomspace(1e-6, THETA_MAX, 61)
        vals = [g(t) for t in grid]
        for i in range(len(grid) - 1):
            if vals[i] == 0.0:
                return float(grid[i])
            if vals[i] * vals[i + 1] < 0.0:
                return find_root(g, float(grid[i]), float(grid[i + 1]),
                                 RootConfig(x_tol=1e-10, max_iters=200))
        raise BracketError("printed minimum-threshold equation has no root in the scan range")

    if method != "operational":
        raise ParameterError(f"unknown method {method!r}")

    def outage(theta: float) -> float:
        return primary_outage(theta, params, variant, cfg, reading, backend)

    if outage(0.0) <= tau:
        return 0.0
    if outage(THETA_MAX) > tau:
        raise InfeasibleProtectionError(
            "primary outage exceeds tau even with secondary transmissions fully "
            f"suppressed (tau={tau}, gamma={params.gamma}, lambda1={params.lambda1})"
        )
    # bracket the crossing on a log grid, then refine
    grid = np.geomspace(1e-4, THETA_MAX, 61)
    lo = 0.0
    hi = THETA_MAX
    for t in grid:
        if outage(float(t)) > tau:
            lo = float(t)
        else:
            hi = float(t)
            break
    root = find_root(lambda t: outage(t) - tau, lo, hi,
                     RootConfig(x_tol=1e-10, max_iters=200))
    # land on the protected side of the crossing
    for _ in range(10):
        if outage(root) <= tau:
            break
        root *= 1.0 + 1e-9
    return root


# -- success probability and the ASE objective ------------------------------


def transmission_success_probability(
    r_ball: float,
    beta: float,
    theta: float,
    params: NetworkParams,
    variant: str = "linear",
    cfg: QuadratureConfig | None = None,
    backend: str = "exact",
    phi2_hat: float | None = None,
) -> float:
    """P(SIR at the RX exceeds beta | measured interference geometry).

    Product of the primary-field access-probability form at beta and the
    Laplace factor of the thinned secondary interferer field.
    """
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    _check_variant(variant)
    _check_backend(backend)
    p = params
    phi = (
        phi2_hat
        if phi2_hat is not None
        else average_access_probability(theta, p, cfg, backend)
    )
    e = _thinning_exponent(variant, p.alpha)
    secondary = math.exp(-math.pi * p.lambda2 * phi**e * p.d**2 * rho_coverage(beta, p.alpha))
    return _ps(backend)(r_ball, beta, params, cfg) * secondary


def ase(
    theta: float,
    beta: float,
    params: NetworkParams,
    variant: str = "linear",
    cfg: QuadratureConfig | None = None,
    backend: str = "exact",
    phi2_hat: float | None = None,
) -> float:
    """Area spectral efficiency of the secondary network [nat/s/Hz/m2].

    lambda2 * ln(1+beta) * E_r[Ps(r,theta) Ps(r,beta)] times the secondary
    thinning factor, which is independent of r and hoisted out of the
    expectation.
    """
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    if theta < 0.0:
        raise ParameterError(f"theta must be nonnegative, got {theta}")
    _check_variant(variant)
    _check_backend(backend)
    p = params
    if p.lambda2 == 0.0:
        return 0.0
    phi = (
        phi2_hat
        if phi2_hat is not None
        else average_access_probability(theta, p, cfg, backend)
    )
    e = _thinning_exponent(variant, p.alpha)
    secondary = math.exp(-math.pi * p.lambda2 * phi**e * p.d**2 * rho_coverage(beta, p.alpha))
    ps = _ps(backend)
    scale = math.pi * p.lambda1

    def integrand(v: np.ndarray) -> np.ndarray:
        v = np.atleast_1d(v)
        out = np.empty_like(v)
        for i, vi in enumerate(v):
            if vi > 700.0:
                out[i] = 0.0
                continue
            r = math.sqrt(vi / scale) if vi > 0.0 else 1e-300
            out[i] = ps(r, theta, p, cfg) * ps(r, beta, p, cfg) * math.exp(-vi)
        return out

    joint = integrate_semi_infinite(integrand, 0.0, cfg)
    return p.lambda2 * math.log1p(beta) * secondary * joint


def _ase_fixed(
    theta: float,
    beta: float,
    params: NetworkParams,
    variant: str,
    cfg: QuadratureConfig | None,
    backend: str,
    ps_theta: np.ndarray | None = None,
) -> float:
    """ASE on fixed nearest-distance nodes; the optimizer's objective."""
    p = params
    r, w = _nearest_distance_nodes(p.lambda1)
    if ps_theta is None:
        ps_theta = _ps_vector(r, theta, p, cfg, backend)
    ps_beta = _ps_vector(r, beta, p, cfg, backend)
    phi = min(1.0, float(ps_theta @ w))
    e = _thinning_exponent(variant, p.alpha)
    secondary = math.exp(-math.pi * p.lambda2 * phi**e * p.d**2 * rho_coverage(beta, p.alpha))
    return p.lambda2 * math.log1p(beta) * secondary * float((ps_theta * ps_beta) @ w)


def ase_surface(
    params: NetworkParams,
    theta_grid: np.ndarray,
    beta_grid: np.ndarray,
    variant: str = "linear",
    cfg: QuadratureConfig | None = None,
    backend: str = "exact",
) -> tuple[np.ndarray, np.ndarray]:
    """ASE on the full theta x beta grid (linear thresholds).

    Returns (surface[i_theta, j_beta], phi2_hat[i_theta]).  Shares one set
    of access-probability evaluations per grid value across the whole
    surface.
    """
    p = params
    r, w = _nearest_distance_nodes(p.lambda1)
    ps_theta = np.array([_ps_vector(r, float(t), p, cfg, backend) for t in theta_grid])
    ps_beta = np.array([_ps_vector(r, float(b), p, cfg, backend) for b in beta_grid])
    phi = np.minimum(1.0, ps_theta @ w)
    e = _thinning_exponent(variant, p.alpha)
    rho0_beta = np.array([rho_coverage(float(b), p.alpha) for b in beta_grid])
    secondary = np.exp(-math.pi * p.lambda2 * p.d**2 * np.outer(phi**e, rho0_beta))
    joint = np.einsum("ik,jk,k->ij", ps_theta, ps_beta, w)
    log_term = np.log1p(np.asarray(beta_grid, dtype=float))
    surface = p.lambda2 * secondary * joint * log_term[None, :]
    return surface, phi

def default_grid_db(step: float = 0.5) -> np.ndarray:
    """Default threshold grid: -20 dB to 30 dB inclusive."""
    n = int(round(50.0 / step)) + 1
    return np.linspace(-20.0, 30.0, n)


def _golden_max(g, lo: float, hi: float, iters: int = 40) -> tuple[float, float]:
    """Deterministic golden-section maximization on [lo, hi]."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    gc, gd = g(c), g(d)
    for _ in range(iters):
        if b - a < 1e-6 * max(1.0, abs(a), abs(b)):
            break
        if gc > gd:
            b, d, gd = d, c, gc
            c = b - invphi * (b - a)
            gc = g(c)
        else:
            a, c, gc = c, d, gd
            d = a + invphi * (b - a)
            gd = g(d)
    if gc > gd:
        return c, gc
    return d, gd


def optimize(
    params: NetworkParams,
    variant: str = "linear",
    theta_grid_db: np.ndarray | None = None,
    beta_grid_db: np.ndarray | None = None,
    cfg: QuadratureConfig | None = None,
    backend: str = "exact",
    reading: str = "corrected",
    refine: bool = True,
) -> Optimum:
    """Joint ASE maximization over theta >= theta_bar and beta.

    Grid argmax (ties broken toward smaller theta, then smaller beta)
    followed by one golden-section refinement pass per coordinate around
    the grid optimum.  Deterministic for fixed inputs.
    """
    validate(params)
    _check_variant(variant)
    _check_backend(backend)
    theta_grid_db = default_grid_db() if theta_grid_db is None else np.asarray(theta_grid_db, dtype=float)
    beta_grid_db = default_grid_db() if beta_grid_db is None else np.asarray(beta_grid_db, dtype=float)
    if theta_grid_db.size == 0 or beta_grid_db.size == 0:
        raise ParameterError("threshold grids must be nonempty")

    theta_bar = min_access_threshold(params, variant, cfg, reading=reading, backend=backend)
    theta_grid = 10.0 ** (theta_grid_db / 10.0)
    beta_grid = 10.0 ** (beta_grid_db / 10.0)
    feasible = theta_grid[theta_grid >= theta_bar]
    if feasible.size == 0:
        feasible = np.array([theta_bar])
    surface, _ = ase_surface(params, feasible, beta_grid, variant, cfg, backend)

    best_i, best_j = 0, 0
    best = -math.inf
    for i in range(feasible.size):
        for j in range(beta_grid.size):
            if surface[i, j] > best:
                best = surface[i, j]
                best_i, best_j = i, j
    theta_star = float(feasible[best_i])
    beta_star = float(beta_grid[best_j])
    best = float(best)

    if refine:
        th_lo = float(feasible[best_i - 1]) if best_i > 0 else theta_star
        th_hi = float(feasible[best_i + 1]) if best_i + 1 < feasible.size else theta_star
        th_lo = max(th_lo, theta_bar)
        if th_hi > th_lo:
            t_ref, v_ref = _golden_max(
                lambda t: _ase_fixed(t, beta_star, params, variant, cfg, backend),
                th_lo, th_hi,
            )
            if v_ref > best:
                theta_star, best = t_ref, v_ref
        be_lo = float(beta_grid[best_j - 1]) if best_j > 0 else beta_star
        be_hi = float(beta_grid[best_j + 1]) if best_j + 1 < beta_grid.size else beta_star
        if be_hi > be_lo:
            ps_theta = _ps_vector(
                _nearest_distance_nodes(params.lambda1)[0], theta_star, params, cfg, backend
            )
            b_ref, v_ref = _golden_max(
                lambda b: _ase_fixed(theta_star, b, params, variant, cfg, backend, ps_theta=ps_theta),
                be_lo, be_hi,
            )
            if v_ref > best:
                beta_star, best = b_ref, v_ref

    phi_star = _avg_access_fixed(theta_star, params, cfg, backend)
    return Optimum(
        theta_star=theta_star,
        beta_star=beta_star,
        ase=best,
        theta_bar=theta_bar,
        lambda2_star=params.lambda2 * phi_star,
    )


# -- asymptotic regime -------------------------------------------------------


def d_function(
    beta: float,
    theta_bar: float,
    params: NetworkParams,
    cfg: QuadratureConfig | None = None,
    fd_step_rel: float = 1e-6,
    phi2_hat: float | None = None,
) -> float:
    """Stationarity function for the decoding target in the primary-dominant regime.

    Expectation over the nearest-primary distance of
    Ps(r, theta_bar) * [Ps(r, beta) (-2 c0 beta^((2-alpha)/alpha)/alpha
    + 1/((1+beta) ln(1+beta))) + Ps'(r, beta)], with
    c0 = pi lambda2 phi_hat d^2 times the full coverage constant.  Ps is the
    lower-bound form; Ps' its central finite difference in beta, evaluated
    on fixed quadrature nodes so differencing stays smooth.
    """
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    p = params
    r, w = _nearest_distance_nodes(p.lambda1)
    phi = (
        phi2_hat
        if phi2_hat is not None
        else float(_ps_lb_fixed(r, theta_bar, p) @ w)
    )
    c0 = math.pi * p.lambda2 * phi * p.d**2 * rho_constant(p.alpha)
    h = fd_step_rel * max(1.0, beta)
    ps_bar = _ps_lb_fixed(r, theta_bar, p)
    ps_beta = _ps_lb_fixed(r, beta, p)
    ps_prime = (_ps_lb_fixed(r, beta + h, p) - _ps_lb_fixed(r, beta - h, p)) / (2.0 * h)
    coeff = (
        -2.0 * c0 * beta ** ((2.0 - p.alpha) / p.alpha) / p.alpha
        + 1.0 / ((1.0 + beta) * math.log1p(beta))
    )
    return float((ps_bar * (ps_beta * coeff + ps_prime)) @ w)


def solve_beta_asymptotic(
    params: NetworkParams,
    variant: str = "linear",
    cfg: QuadratureConfig | None = None,
    reading: str = "corrected",
    scan: tuple[float, float, int] = (0.01, 100.0, 61),
) -> tuple[float, float]:
    """Optimal policy in the primary-interference-dominant regime.

    Returns (theta_bar, beta_star): the minimum protected threshold and the
    root of the stationarity function, located by a log-spaced scan plus
    bracketed root finding.  Raises BracketError when no sign change exists
    in the scan range (reported, never guessed).
    """
    theta_bar = min_access_threshold(params, variant, cfg, reading=reading)
    r, w = _nearest_distance_nodes(params.lambda1)
    phi = float(_ps_lb_fixed(r, theta_bar, params) @ w)

    def d_of_beta(b: float) -> float:
        return d_function(b, theta_bar, params, cfg, phi2_hat=phi)

    lo, hi, n = scan
    grid = np.geomspace(lo, hi, n)
    vals = [d_of_beta(float(b)) for b in grid]
    for i in range(n - 1):
        if vals[i] == 0.0:
            return theta_bar, float(grid[i])
        if vals[i] * vals[i + 1] < 0.0:
            beta_star = find_root(
                d_of_beta, float(grid[i]), float(grid[i + 1]),
                RootConfig(x_tol=1e-12, max_iters=200),
            )
            return theta_bar, beta_star
    raise BracketError(
        f"stationarity function has no sign change on [{lo}, {hi}]"
    )
