"""Analytic access-probability engine.

Maps a measured primary interference level to an empty-ball radius, and
evaluates the conditional probability that the SIR at a secondary RX (pair
distance d from the sensing TX) exceeds a threshold, given that geometry:
the exact expression, its closed-form lower bound, and the small-/large-
interference asymptotes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .model import NetworkParams
from .numerics import (
    QuadratureConfig,
    RootConfig,
    coverage_tail,
    find_root,
    integrate,
    integrate_semi_infinite,
    rho_constant,
    rho_coverage,
    rho_coverage_excluded,
    safe_acos,
)

__all__ = [
    "EmptyBall",
    "mean_interference",
    "empty_ball_radius",
    "empty_ball_radius_alpha4",
    "empty_ball_radii",
    "ring_intensity",
    "nearest_interferer_factor",
    "access_probability",
    "access_probability_lower_bound",
    "access_probability_small_interference",
    "access_probability_large_interference",
]


@dataclass(frozen=True)
class EmptyBall:
    """Exclusion geometry inferred from a measured interference level.

    radius is the ball radius around the sensing TX with the nearest primary
    TX on its boundary; measured_interference is the level that produced it.
    """

    radius: float
    measured_interference: float


def mean_interference(radius: float, params: NetworkParams) -> float:
    """Mean aggregate primary interference given nearest-TX distance `radius`.

    Nearest primary at exactly `radius` plus a homogeneous field outside the
    ball, unit-mean fading averaged out:
    P1 R^-alpha + 2 pi lambda1 P1 R^(2-alpha) / (alpha - 2).
    """
    if radius <= 0.0:
        raise ParameterError(f"radius must be positive, got {radius}")
    a = params.alpha
    return params.p1 * radius**-a + (
        2.0 * math.pi * params.lambda1 * params.p1 * radius ** (2.0 - a) / (a - 2.0)
    )


def _radius_equation_bracket(i_watt: float, params: NetworkParams) -> tuple[float, float]:
    """Bracket for the unique positive root of (I/P1) R^a - c R^2 - 1 = 0."""
    r0 = (params.p1 / i_watt) ** (1.0 / params.alpha)
    c = 2.0 * math.pi * params.lambda1 / (params.alpha - 2.0)

    def f(r: float) -> float:
        return (i_watt / params.p1) * r**params.alpha - c * r * r - 1.0

    lo = r0
    # f(r0) is <= 0 up to rounding; widen downward if round-off flips it
    for _ in range(64):
        if f(lo) <= 0.0:
            break
        lo *= 0.5
    hi = r0
    for _ in range(1024):
        if f(hi) > 0.0:
            break
        hi *= 2.0
    else:  # pragma: no cover - astronomically large radii only
        raise ParameterError(f"no finite empty-ball radius for interference {i_watt}")
    return lo, hi


def empty_ball_radius(
    i_watt: float,
    params: NetworkParams,
    cfg: RootConfig | None = None,
) -> EmptyBall:
    """Invert the mean-interference relation: measured level -> EmptyBall.

    The defining equation (I/P1) R^alpha - (2 pi lambda1/(alpha-2)) R^2 - 1 = 0
    has exactly one positive root.  Solved by a bracketed root finder and
    polished with two Newton steps.
    """
    if not i_watt > 0.0:
        raise ParameterError(f"measured interference must be positive, got {i_watt}")
    cfg = cfg or RootConfig(x_tol=1e-13, max_iters=300)
    lo, hi = _radius_equation_bracket(i_watt, params)
    c = 2.0 * math.pi * params.lambda1 / (params.alpha - 2.0)
    a = params.alpha
    k = i_watt / params.p1

    def f(r: float) -> float:
        return k * r**a - c * r * r - 1.0

    root = lo if f(lo) == 0.0 else find_root(f, lo, hi, cfg)
    for _ in range(2):
        df = a * k * root ** (a - 1.0) - 2.0 * c * root
        if df != 0.0:
            step = f(root) / df
            if abs(step) < 0.5 * root:
                root -= step
    return EmptyBall(radius=root, measured_interference=i_watt)


def empty_ball_radius_alpha4(i_watt: float, lambda1: float, p1: float) -> float:
    """Closed-form empty-ball radius for path-loss exponent 4."""
    if not i_watt > 0.0:
        raise ParameterError(f"measured interference must be positive, got {i_watt}")
    q = math.pi * lambda1 * p1
    return (2.0 * i_watt) ** -0.5 * (q + math.sqrt(q * q + 4.0 * p1 * i_watt)) ** 0.5


def empty_ball_radii(i_watt: np.ndarray, params: NetworkParams) -> np.ndarray:
    """Vectorized inversion of the mean-interference relation.

    Uses the closed form at alpha = 4, bisection plus Newton polish
    otherwise.  Zero (or nonpositive) interference maps to +inf.
    """
    i_arr = np.asarray(i_watt, dtype=float)
    out = np.full(i_arr.shape, np.inf)
    pos = i_arr > 0.0
    if not np.any(pos):
        return out
    vals = i_arr[pos]
    if params.alpha == 4.0:
        q = math.pi * params.lambda1 * params.p1
        out[pos] = (2.0 * vals) ** -0.5 * (
            q + np.sqrt(q * q + 4.0 * params.p1 * vals)
        ) ** 0.5
        return out
    a = params.alpha
    c = 2.0 * math.pi * params.lambda1 / (a - 2.0)
    k = vals / params.p1

    def f(r: np.ndarray) -> np.ndarray:
        return k * r**a - c * r * r - 1.0

    lo = (params.p1 / vals) ** (1.0 / a)
    hi = lo.copy()
    for _ in range(200):
        mask = f(hi) <= 0.0
        if not mask.any():
            break
        hi[mask] *= 2.0
    for _ in range(90):
        mid = 0.5 * (lo + hi)
        below = f(mid) <= 0.0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    r = 0.5 * (lo + hi)
    for _ in range(3):
        df = a * k * r ** (a - 1.0) - 2.0 * c * r
        step = np.where(df != 0.0, f(r) / np.where(df != 0.0, df, 1.0), 0.0)
        r = r - np.clip(step, -0.5 * r, 0.5 * r)
    out[pos] = r
    return out


def ring_intensity(y, r_ball: float, d: float, lambda1: float):
    """Primary-interferer intensity on the RX-centered ring of radius y.

    The ring is centered at the RX, a distance d from the sensing TX whose
    empty ball has radius r_ball.  Zero inside the ball, the clamped-arc
    expression across the partial overlap, 2 pi lambda1 y outside; measured
    in TXs per meter of ring radius.
    """
    y_arr = np.asarray(y, dtype=float)
    if d == 0.0:
        return np.where(y_arr <= r_ball, 0.0, 2.0 * math.pi * lambda1 * y_arr)
    with np.errstate(divide="ignore", invalid="ignore"):
        arc = 2.0 * safe_acos((r_ball**2 - d * d - y_arr**2) / (2.0 * d * y_arr))
    inner = max(0.0, r_ball - d)
    out = np.where(
        y_arr <= inner,
        0.0,
        np.where(y_arr > r_ball + d, 2.0 * math.pi, arc) * lambda1 * y_arr,
    )
    return np.where(y_arr <= 0.0, 0.0, out)


def nearest_interferer_factor(
    r_ball: float,
    x: float,
    params: NetworkParams,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Angular average of the nearest-primary coverage term.

    (1/pi) * integral over t in [0, pi] of
    P2 / (P2 + P1 x d^alpha (r^2 - 2 d r cos t + d^2)^(-alpha/2));
    the integrand is symmetric in cos t, so the half range is doubled.
    """
    if x == 0.0:
        return 1.0
    p = params
    q = p.p1 * x * p.d**p.alpha / p.p2
    half_alpha = p.alpha / 2.0

    def integrand(t: np.ndarray) -> np.ndarray:
        dist_sq = r_ball * r_ball - 2.0 * p.d * r_ball * np.cos(t) + p.d * p.d
        with np.errstate(divide="ignore"):
            return 1.0 / (1.0 + q * dist_sq**-half_alpha)

    return integrate(integrand, 0.0, math.pi, cfg) / math.pi


def _field_exponent(
    r_ball: float,
    x: float,
    params: NetworkParams,
    cfg: QuadratureConfig | None,
) -> float:
    """Exponent of the outside-the-ball field's Laplace factor.

    Integral over ring radius of ring_intensity(y) * q/(y^alpha + q) with
    q = P1 x d^alpha / P2, split at the tangency radius r + d.
    """
    p = params
    if x == 0.0 or p.lambda1 == 0.0:
        return 0.0
    q = p.p1 * x * p.d**p.alpha / p.p2
    inner = max(0.0, r_ball - p.d)
    outer = r_ball + p.d

    def kernel(y: np.ndarray) -> np.ndarray:
        return q / (y**p.alpha + q)

    def ring_part(y: np.ndarray) -> np.ndarray:
        return ring_intensity(y, r_ball, p.d, p.lambda1) * kernel(y)

    def far_part(y: np.ndarray) -> np.ndarray:
        return 2.0 * math.pi * p.lambda1 * y * kernel(y)

    return integrate(ring_part, inner, outer, cfg) + integrate_semi_infinite(
        far_part, outer, cfg
    )


def access_probability(
    r_ball: float,
    theta: float,
    params: NetworkParams,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Exact conditional access probability given the empty-ball radius.

    Product of the nearest-interferer angular factor and the Laplace factor
    of the primary field outside the ball.  At d = 0 the RX coincides with
    the sensing TX and the probability is 1 for every threshold.
    """
    if r_ball <= 0.0:
        raise ParameterError(f"r_ball must be positive, got {r_ball}")
    if theta < 0.0:
        raise ParameterError(f"theta must be nonnegative, got {theta}")
    if theta == 0.0 or params.d == 0.0:
        return 1.0
    angular = nearest_interferer_factor(r_ball, theta, params, cfg)
    return angular * math.exp(-_field_exponent(r_ball, theta, params, cfg))


def access_probability_lower_bound(
    r_ball: float,
    theta: float,
    params: NetworkParams,
    cfg: QuadratureConfig | None = None,
    form: str = "tight",
) -> float:
    """Lower bound on the access probability.

    Shares the exact angular factor; the field factor moves the exclusion
    ball onto the RX (radius max(0, r - d)), whose Laplace exponent is the
    excluded coverage integral.  form="tight" evaluates that exponent as is
    (equality at d = 0); form="printed" additionally applies the Pfaff
    inequality, trading tightness for a fully closed-form radial factor.
    """
    if r_ball <= 0.0:
        raise ParameterError(f"r_ball must be positive, got {r_ball}")
    if theta < 0.0:
        raise ParameterError(f"theta must be nonnegative, got {theta}")
    if form not in ("tight", "printed"):
        raise ParameterError(f"form must be 'tight' or 'printed', got {form!r}")
    p = params
    if p.d == 0.0:
        return 1.0
    angular = nearest_interferer_factor(r_ball, theta, p, cfg)
    two_over_a = 2.0 / p.alpha
    if p.d > r_ball:
        expo = (
            math.pi * p.lambda1 * (p.p1 / p.p2) ** two_over_a * p.d**2
            * rho_coverage(theta, p.alpha)
        )
    else:
        delta = r_ball - p.d
        limit = math.pi * p.lambda1 * p.d**2 * (p.p1 * theta / p.p2) ** two_over_a * rho_constant(p.alpha)
        if delta < 1e-9 * max(r_ball, 1.0):
            expo = limit
        else:
            t = (p.d / delta) ** p.alpha * p.p1 * theta / p.p2
            if form == "printed":
                expo = (
                    math.pi * p.lambda1 * delta**2
                    * (rho_constant(p.alpha) * (1.0 + t) ** two_over_a - 1.0)
                )
            else:
                expo = (
                    math.pi * p.lambda1 * delta**2
                    * rho_coverage_excluded(t, p.alpha, cfg)
                )
    return angular * math.exp(-expo)


def access_probability_small_interference(
    r_ball: float,
    theta: float,
    params: NetworkParams,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Small-interference (large ball) asymptote of the access probability.

    Converges to 1 as the ball grows.  Kept exactly as the closed form
    reads, including its internally inconsistent exponents; use only for
    asymptotic cross-checks, never on the optimization path.
    """
    if r_ball <= 0.0:
        raise ParameterError(f"r_ball must be positive, got {r_ball}")
    p = params
    if theta == 0.0 or p.d == 0.0:
        return 1.0
    two_over_a = 2.0 / p.alpha
    q = p.p1 * theta * p.d**p.alpha / p.p2
    lower = (r_ball * r_ball / q) ** two_over_a
    tail = coverage_tail(lower, p.alpha, cfg)
    expo = math.pi * p.lambda1 * q**two_over_a * tail
    return p.p2 * math.exp(-expo) / (p.p2 + p.p1 * theta * (p.d / r_ball) ** 2)


def access_probability_large_interference(
    theta: float,
    params: NetworkParams,
    cfg: QuadratureConfig | None = None,
) -> float:
    """Large-interference (vanishing ball) limit; independent of the measurement."""
    if theta < 0.0:
        raise ParameterError(f"theta must be nonnegative, got {theta}")
    p = params
    if theta == 0.0:
        return 1.0
    two_over_a = 2.0 / p.alpha
    expo = (
        math.pi * p.lambda1 * p.d**2 * (p.p1 * theta / p.p2) ** two_over_a
        * rho_constant(p.alpha)
    )
    return p.p2 * math.exp(-expo) / (p.p2 + p.p1 * theta)
