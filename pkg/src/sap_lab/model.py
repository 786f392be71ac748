"""Domain types, unit conversions and parameter validation.

Everything downstream of this module works in SI units: meters, watts,
transmitters per square meter, and linear power ratios.  dBm, dB and
per-km2 values exist only at CLI/config boundaries.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ParameterError

# Fixed received-signal power used when a measured interference has to be
# displayed as an SIR (sensing-map style outputs).
SENSING_REFERENCE_SIGNAL_DBM = 10.0


def dbm_to_watts(x: float) -> float:
    """Convert a power from dBm to watts."""
    return 10.0 ** ((x - 30.0) / 10.0)


def watts_to_dbm(x: float) -> float:
    """Convert a power from watts to dBm."""
    if x <= 0.0:
        raise ParameterError(f"power must be positive to express in dBm, got {x}")
    return 10.0 * math.log10(x) + 30.0


def db_to_linear(x: float) -> float:
    """Convert a ratio from dB to linear."""
    return 10.0 ** (x / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a linear ratio to dB."""
    if x <= 0.0:
        raise ParameterError(f"ratio must be positive to express in dB, got {x}")
    return 10.0 * math.log10(x)


def per_km2_to_per_m2(x: float) -> float:
    """Convert a density from per km2 to per m2."""
    if x < 0.0:
        raise ParameterError(f"density must be nonnegative, got {x}")
    return x * 1e-6


def per_m2_to_per_km2(x: float) -> float:
    """Convert a density from per m2 to per km2."""
    return x * 1e6


def sensed_sir(interference_watt: float, signal_dbm: float = SENSING_REFERENCE_SIGNAL_DBM) -> float:
    """Measured interference expressed as an SIR against a fixed signal power."""
    return dbm_to_watts(signal_dbm) / interference_watt


@dataclass(frozen=True)
class NetworkParams:
    """Physical parameters of the coexisting primary/secondary networks.

    Attributes:
        lambda1: primary TX density [per m2].
        lambda2: secondary TX density [per m2].
        p1: primary transmit power [W].
        p2: secondary transmit power [W].
        alpha: path-loss exponent (> 2 for finite mean interference).
        d: secondary TX-RX pair distance [m].
        tau: primary outage budget, in (0, 1).
        gamma: primary decoding SIR threshold [linear].
    """

    lambda1: float
    lambda2: float
    p1: float
    p2: float
    alpha: float
    d: float
    tau: float
    gamma: float


@dataclass(frozen=True)
class Policy:
    """The two SIR thresholds of the MAC, as linear ratios.

    theta gates spectrum access against primary-only interference; beta is
    the decoding target against all interference.
    """

    theta: float
    beta: float


def validate(params: NetworkParams) -> NetworkParams:
    """Check every invariant of NetworkParams; return it unchanged if valid."""
    if not params.lambda1 > 0.0:
        raise ParameterError(f"lambda1 must be positive, got {params.lambda1}")
    if params.lambda2 < 0.0:
        raise ParameterError(f"lambda2 must be nonnegative, got {params.lambda2}")
    if not params.p1 > 0.0:
        raise ParameterError(f"p1 must be positive, got {params.p1}")
    if not params.p2 > 0.0:
        raise ParameterError(f"p2 must be positive, got {params.p2}")
    if not params.alpha > 2.0:
        raise ParameterError(
            f"alpha must exceed 2 (mean interference diverges), got {params.alpha}"
        )
    if params.d < 0.0:
        raise ParameterError(f"d must be nonnegative, got {params.d}")
    if not 0.0 < params.tau < 1.0:
        raise ParameterError(f"tau must lie in (0,1), got {params.tau}")
    if not params.gamma > 0.0:
        raise ParameterError(f"gamma must be positive, got {params.gamma}")
    for name in ("lambda1", "lambda2", "p1", "p2", "alpha", "d", "tau", "gamma"):
        if not math.isfinite(getattr(params, name)):
            raise ParameterError(f"{name} must be finite")
    return params


def validate_policy(policy: Policy) -> Policy:
    """Check Policy invariants; return it unchanged if valid."""
    if policy.theta < 0.0 or not math.isfinite(policy.theta):
        raise ParameterError(f"theta must be finite and nonnegative, got {policy.theta}")
    if not policy.beta > 0.0 or not math.isfinite(policy.beta):
        raise ParameterError(f"beta must be finite and positive, got {policy.beta}")
    return policy
