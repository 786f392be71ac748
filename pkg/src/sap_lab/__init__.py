"""Stochastic-geometry laboratory for the sense-and-predict cognitive-radio MAC.

An analytic engine for the conditional access probability and its bounds, a
seeded Monte Carlo Poisson-field oracle, and a joint optimizer for the
access threshold and decoding target under a primary-protection constraint.
"""

__version__ = "0.1.0"

from .analytic import (
    EmptyBall,
    access_probability,
    access_probability_large_interference,
    access_probability_lower_bound,
    access_probability_small_interference,
    empty_ball_radius,
    empty_ball_radius_alpha4,
    mean_interference,
    ring_intensity,
)
from .model import (
    NetworkParams,
    Policy,
    db_to_linear,
    dbm_to_watts,
    linear_to_db,
    per_km2_to_per_m2,
    validate,
    watts_to_dbm,
)
from .numerics import (
    QuadratureConfig,
    RootConfig,
    find_root,
    integrate,
    integrate_semi_infinite,
    rho_constant,
    rho_coverage,
    rho_coverage_excluded,
    safe_acos,
)
from .optimizer import (
    Optimum,
    ase,
    average_access_probability,
    d_function,
    min_access_threshold,
    optimize,
    primary_outage,
    solve_beta_asymptotic,
    transmission_success_probability,
)
from .simulator import (
    Estimate,
    Scenario,
    TrialRecord,
    inject_measurement_error,
    measure_interference,
    run_access_prob_experiment,
    run_ase_experiment,
    run_ase_grid,
    run_primary_outage_experiment,
    sample_ppp,
    wilson_interval,
)

__all__ = [name for name in dir() if not name.startswith("_")]
