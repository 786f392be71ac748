"""Seeded Monte Carlo oracle and protocol testbed.

Samples primary/secondary Poisson fields on a toroidal square window,
executes the sense-and-predict slot (sense, infer the exclusion ball,
probabilistic access, transmit), and estimates every probability and ASE
the analytic modules predict.  All experiments are driven by a 64-bit
master seed through per-chunk substreams, so results are bit-identical for
a given configuration regardless of worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import analytic
from .errors import InsufficientBinOccupancyError, ParameterError
from .model import NetworkParams, Policy, validate, validate_policy
from .numerics import QuadratureConfig

__all__ = [
    "PROTOCOLS",
    "SENSING_MODES",
    "Scenario",
    "Estimate",
    "TrialRecord",
    "wilson_interval",
    "sample_ppp",
    "toroidal_distances",
    "measure_interference",
    "inject_measurement_error",
    "run_access_prob_experiment",
    "run_ase_experiment",
    "run_ase_grid",
    "run_primary_outage_experiment",
    "run_average_sir_experiment",
    "run_sensing_map",
]

PROTOCOLS = ("SapExact", "SapLowerBound", "TxThreshold", "RxThreshold", "AlwaysOn")
SENSING_MODES = ("faded", "mean")

_Z95 = 1.959963984540054
_CHUNK = 1024


@dataclass(frozen=True)
class Estimate:
    """Monte Carlo estimate with a symmetric 95% half-width."""

    mean: float
    half_width_95: float
    trials: int

    @property
    def ci_low(self) -> float:
        return self.mean - self.half_width_95

    @property
    def ci_high(self) -> float:
        return self.mean + self.half_width_95


@dataclass(frozen=True)
class TrialRecord:
    """Per-transmitter outcome of one simulated slot."""

    measured_i: float
    r_ball: float
    access_granted: bool
    sir_rx: float
    success: bool


@dataclass(frozen=True)
class Scenario:
    """Fully seeded simulation specification."""

    params: NetworkParams
    protocol: str
    policy: Policy
    window_side: float
    trials: int
    master_seed: int
    error_sigma_db: float = 0.0
    sensing_mode: str = "faded"

    def validated(self) -> "Scenario":
        validate(self.params)
        validate_policy(self.policy)
        if self.protocol not in PROTOCOLS:
            raise ParameterError(f"protocol must be one of {PROTOCOLS}, got {self.protocol!r}")
        if self.sensing_mode not in SENSING_MODES:
            raise ParameterError(
                f"sensing_mode must be one of {SENSING_MODES}, got {self.sensing_mode!r}"
            )
        if self.trials < 1:
            raise ParameterError(f"trials must be at least 1, got {self.trials}")
        if self.error_sigma_db < 0.0:
            raise ParameterError(f"error_sigma_db must be nonnegative, got {self.error_sigma_db}")
        min_side = 20.0 * max(self.params.d, 0.5 / math.sqrt(self.params.lambda1))
        if not self.window_side >= min_side:
            raise ParameterError(
                f"window_side must be at least {min_side:.1f} m to bound edge effects, "
                f"got {self.window_side}"
            )
        return self


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n < 1:
        raise ParameterError("need at least one trial")
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    return center - half, center + half


def _wilson_estimate(successes: int, n: int) -> Estimate:
    lo, hi = wilson_interval(successes, n)
    p = successes / n
    return Estimate(mean=p, half_width_95=max(p - lo, hi - p), trials=n)


def _chunk_rng(master_seed: int, chunk_index: int) -> np.random.Generator:
    """Counter-style substream: one independent generator per chunk."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(master_seed, spawn_key=(chunk_index,)))
    )


def _chunk_sizes(trials: int, chunk: int = _CHUNK) -> list[int]:
    full, rest = divmod(trials, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _worker_count() -> int:
    raw = os.environ.get("SAP_LAB_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_chunks(fn, n_chunks: int):
    """Apply fn(chunk_index) for every chunk, preserving chunk order."""
    workers = _worker_count()
    if workers == 1 or n_chunks == 1:
        return [fn(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(n_chunks)))


# -- geometry ----------------------------------------------------------------


def sample_ppp(density: float, window_side: float, rng: np.random.Generator) -> np.ndarray:
    """Homogeneous PPP realization on the square window; (n, 2) positions."""
    if density < 0.0:
        raise ParameterError(f"density must be nonnegative, got {density}")
    n = rng.poisson(density * window_side * window_side)
    return rng.random((n, 2)) * window_side


def toroidal_distances(a: np.ndarray, b: np.ndarray, window_side: float) -> np.ndarray:
    """Pairwise wrap-around distances between point sets a (m,2) and b (n,2)."""
    delta = np.abs(a[:, None, :] - b[None, :, :])
    delta = np.minimum(delta, window_side - delta)
    return np.sqrt((delta * delta).sum(axis=-1))


def measure_interference(
    location: np.ndarray,
    primaries: np.ndarray,
    params: NetworkParams,
    window_side: float,
    rng: np.random.Generator,
    sensing_mode: str = "faded",
) -> float:
    """Aggregate primary interference at a location (energy detection).

    Per-link unit-mean exponential fading in "faded" mode, its mean in
    "mean" mode; wrap-around distances.
    """
    if sensing_mode not in SENSING_MODES:
        raise ParameterError(f"sensing_mode must be one of {SENSING_MODES}")
    if len(primaries) == 0:
        return 0.0
    dist = toroidal_distances(np.asarray(location, dtype=float)[None, :], primaries, window_side)[0]
    gains = rng.exponential(size=dist.shape) if sensing_mode == "faded" else 1.0
    return float(np.sum(params.p1 * gains * dist**-params.alpha))


def inject_measurement_error(i_watt: float, sigma_db: float, rng: np.random.Generator) -> float:
    """Multiplicative log-domain measurement error; identity at sigma 0."""
    if i_watt < 0.0:
        raise ParameterError(f"interference must be nonnegative, got {i_watt}")
    if sigma_db < 0.0:
        raise ParameterError(f"sigma_db must be nonnegative, got {sigma_db}")
    if sigma_db == 0.0:
        return i_watt
    eps = rng.normal(0.0, sigma_db)
    return i_watt * 10.0 ** (eps / 10.0)


# -- access-probability lookup tables ---------------------------------------

_TABLE_RADII = np.geomspace(1e-2, 1e3, 241)


@lru_cache(maxsize=512)
def _access_table(params: NetworkParams, theta: float, kind: str,
                  cfg: QuadratureConfig | None) -> PchipInterpolator:
    fn = analytic.access_probability if kind == "exact" else analytic.access_probability_lower_bound
    values = np.array([fn(r, theta, params, cfg) for r in _TABLE_RADII])
    return PchipInterpolator(np.log10(_TABLE_RADII), values, extrapolate=False)


def access_probability_lookup(
    r_ball: np.ndarray,
    theta: float,
    params: NetworkParams,
    kind: str = "exact",
    cfg: QuadratureConfig | None = None,
) -> np.ndarray:
    """Tabulated access probability, clamped to the table range.

    Beyond the ends the curve has plateaued at its asymptotes, so clamping
    is exact to table precision.
    """
    table = _access_table(params, theta, kind, cfg)
    logr = np.log10(np.clip(np.asarray(r_ball, dtype=float), _TABLE_RADII[0], _TABLE_RADII[-1]))
    return np.clip(table(logr), 0.0, 1.0)


# -- access-probability experiments ------------------------------------------


def run_access_prob_experiment(
    params: NetworkParams,
    theta_grid: np.ndarray,
    r_ball: float,
    trials: int,
    seed: int,
    mode: str = "empty-ball",
    window_side: float = 1000.0,
    sensing_mode: str = "mean",
) -> list[Estimate]:
    """Estimate the conditional access probability for every theta.

    "empty-ball" mode realizes the conditioned geometry directly: nearest
    primary on the ball boundary, a PPP field outside, RX at the pair
    distance.  "ppp-conditional" mode samples unconditioned fields, keeps
    trials whose inferred ball radius lands within 2% of r_ball, and
    estimates the within-bin frequency.  One set of trials is shared across
    the theta grid (common random numbers); every point is a full
    trials-sized estimate.
    """
    validate(params)
    if r_ball <= 0.0:
        raise ParameterError(f"r_ball must be positive, got {r_ball}")
    theta = np.asarray(theta_grid, dtype=float)
    if np.any(theta < 0.0):
        raise ParameterError("theta grid must be nonnegative")
    outer = window_side / 2.0
    if outer <= r_ball:
        raise ParameterError("window_side/2 must exceed r_ball")
    p = params
    if mode == "empty-ball":
        lam_area = p.lambda1 * math.pi * (outer**2 - r_ball**2)

        def one_chunk(ci: int) -> np.ndarray:
            rng = _chunk_rng(seed, ci)
            n = sizes[ci]
            counts = rng.poisson(lam_area, n)
            total = int(counts.sum())
            idx = np.repeat(np.arange(n), counts)
            y = np.sqrt(rng.uniform(r_ball**2, outer**2, total))
            phi = rng.uniform(0.0, 2.0 * math.pi, total)
            h = rng.exponential(size=total)
            psi = rng.uniform(0.0, 2.0 * math.pi, n)
            h_near = rng.exponential(size=n)
            h0 = rng.exponential(size=n)
            x_sq = y * y + p.d * p.d - 2.0 * y * p.d * np.cos(phi)
            i_field = np.bincount(idx, weights=p.p1 * h * x_sq ** (-p.alpha / 2.0), minlength=n)
            xn_sq = r_ball**2 + p.d * p.d - 2.0 * r_ball * p.d * np.cos(psi)
            i_rx = i_field + p.p1 * h_near * xn_sq ** (-p.alpha / 2.0)
            signal = p.p2 * h0 * (p.d**-p.alpha if p.d > 0.0 else np.inf)
            return (signal[:, None] > theta[None, :] * i_rx[:, None]).sum(axis=0)

        sizes = _chunk_sizes(trials)
        wins = _map_chunks(one_chunk, len(sizes))
        counts = np.sum(wins, axis=0)
        return [_wilson_estimate(int(k), trials) for k in counts]

    if mode != "ppp-conditional":
        raise ParameterError(f"unknown mode {mode!r}")

    lam_area = p.lambda1 * math.pi * outer**2
    faded = sensing_mode == "faded"

    def one_chunk(ci: int) -> tuple[np.ndarray, int]:
        rng = _chunk_rng(seed, ci)
        n = sizes[ci]
        counts = rng.poisson(lam_area, n)
        total = int(counts.sum())
        idx = np.repeat(np.arange(n), counts)
        y = np.sqrt(rng.uniform(0.0, outer**2, total))
        phi = rng.uniform(0.0, 2.0 * math.pi, total)
        h_sense = rng.exponential(size=total) if faded else np.ones(total)
        i_tx = np.bincount(idx, weights=p.p1 * h_sense * y**-p.alpha, minlength=n)
        radii = analytic.empty_ball_radii(i_tx, p)
        in_bin = np.abs(radii - r_ball) <= 0.02 * r_ball
        pt_mask = in_bin[idx]
        sub_idx = np.cumsum(in_bin) - 1  # bin-local trial index
        h_t = rng.exponential(size=int(pt_mask.sum()))
        n_bin = int(in_bin.sum())
        h0 = rng.exponential(size=n_bin)
        if n_bin == 0:
            return np.zeros(theta.size, dtype=int), 0
        ys, phis = y[pt_mask], phi[pt_mask]
        x_sq = ys * ys + p.d * p.d - 2.0 * ys * p.d * np.cos(phis)
        i_rx = np.bincount(
            sub_idx[idx][pt_mask], weights=p.p1 * h_t * x_sq ** (-p.alpha / 2.0), minlength=n_bin
        )
        signal = p.p2 * h0 * (p.d**-p.alpha if p.d > 0.0 else np.inf)
        wins = (signal[:, None] > theta[None, :] * i_rx[:, None]).sum(axis=0)
        return wins, n_bin

    sizes = _chunk_sizes(trials)
    results = _map_chunks(one_chunk, len(sizes))
    wins = np.sum([r[0] for r in results], axis=0)
    occupancy = int(sum(r[1] for r in results))
    if occupancy < 1000:
        raise InsufficientBinOccupancyError(
            f"only {occupancy} of {trials} trials landed in the radius bin "
            f"(need at least 1000); increase trials"
        )
    return [_wilson_estimate(int(k), occupancy) for k in wins]


# -- full two-network slot engine --------------------------------------------


@dataclass
class _RatioAccumulator:
    """Cluster-robust tallies for a ratio-of-totals estimate."""

    k: float = 0.0
    k_sq: float = 0.0
    kn: float = 0.0
    n: float = 0.0
    n_sq: float = 0.0
    trials: int = 0

    def add(self, other: "_RatioAccumulator") -> None:
        self.k += other.k
        self.k_sq += other.k_sq
        self.kn += other.kn
        self.n += other.n
        self.n_sq += other.n_sq
        self.trials += other.trials

    def estimate(self, scale: float = 1.0) -> Estimate:
        if self.n <= 0.0:
            return Estimate(mean=0.0, half_width_95=0.0, trials=self.trials)
        p = self.k / self.n
        var = self.k_sq - 2.0 * p * self.kn + p * p * self.n_sq
        se = math.sqrt(max(var, 0.0)) / self.n
        return Estimate(mean=scale * p, half_width_95=scale * _Z95 * se, trials=self.trials)


def _access_matrix(
    combos: list[tuple[str, float, float]],
    i_tx: np.ndarray,
    pl_rp: np.ndarray,
    eps_tx: np.ndarray,
    eps_rx: np.ndarray,
    u_access: np.ndarray,
    params: NetworkParams,
    cfg: QuadratureConfig | None,
) -> np.ndarray:
    """Access decisions per TX (rows) for every (protocol, theta, sigma) combo.

    pl_rp holds the path gains from each RX to every primary TX; the
    RX-sensing bound needs the per-interferer levels, not just a total.
    """
    p = params
    n_s = i_tx.shape[0]
    out = np.empty((n_s, len(combos)), dtype=bool)
    predicted = p.p2 * p.d**-p.alpha if p.d > 0.0 else np.inf
    radii_cache: dict[float, np.ndarray] = {}
    rx_cache: dict[tuple[float, float], np.ndarray] = {}
    for j, (protocol, theta, sigma) in enumerate(combos):
        i_tx_meas = i_tx * 10.0 ** (sigma * eps_tx / 10.0) if sigma > 0.0 else i_tx
        if protocol == "AlwaysOn":
            out[:, j] = True
        elif protocol == "TxThreshold":
            with np.errstate(divide="ignore"):
                out[:, j] = predicted / i_tx_meas > theta
        elif protocol == "RxThreshold":
            # no prediction error: access with the true conditional coverage
            # probability given the RX-side interferer field,
            # prod_i 1/(1 + theta (P1/P2) d^alpha x_i^-alpha)
            if (theta, sigma) not in rx_cache:
                scale = theta * (p.p1 / p.p2) * p.d**p.alpha
                if sigma > 0.0:
                    gains = pl_rp * (10.0 ** (sigma * eps_rx / 10.0))[:, None]
                else:
                    gains = pl_rp
                rx_cache[(theta, sigma)] = np.prod(1.0 / (1.0 + scale * gains), axis=-1)
            out[:, j] = u_access <= rx_cache[(theta, sigma)]
        elif protocol in ("SapExact", "SapLowerBound"):
            if sigma not in radii_cache:
                radii_cache[sigma] = analytic.empty_ball_radii(i_tx_meas, p)
            kind = "exact" if protocol == "SapExact" else "lower_bound"
            p_acc = access_probability_lookup(radii_cache[sigma], theta, p, kind, cfg)
            out[:, j] = u_access <= p_acc
        else:
            raise ParameterError(f"unknown protocol {protocol!r}")
    return out


def run_ase_grid(
    params: NetworkParams,
    combos: list[tuple[str, float, float]],
    beta: float,
    window_side: float,
    trials: int,
    seed: int,
    sensing_mode: str = "faded",
    cfg: QuadratureConfig | None = None,
    record_limit: int = 0,
) -> tuple[dict[tuple[str, float, float], dict[str, Estimate]], list[TrialRecord]]:
    """Slot simulation shared across (protocol, theta, error-sigma) combos.

    Every combo is evaluated on the same network/fading realizations
    (common random numbers), so comparisons between protocols and error
    levels are paired.  Returns, per combo, the ASE estimate plus the raw
    access-rate and success-given-access estimates, and up to record_limit
    per-TX TrialRecords for the first combo.  Per-TX samples within one
    realization are correlated, so confidence intervals use a
    cluster-robust (per-trial) variance.
    """
    validate(params)
    if beta <= 0.0:
        raise ParameterError(f"beta must be positive, got {beta}")
    if sensing_mode not in SENSING_MODES:
        raise ParameterError(f"sensing_mode must be one of {SENSING_MODES}")
    for protocol, theta, sigma in combos:
        if protocol not in PROTOCOLS:
            raise ParameterError(f"unknown protocol {protocol!r}")
        if theta < 0.0 or sigma < 0.0:
            raise ParameterError("theta and sigma must be nonnegative")
    p = params
    faded = sensing_mode == "faded"
    # warm the lookup tables before any threading
    for protocol, theta, sigma in combos:
        if protocol == "SapExact":
            _access_table(p, theta, "exact", cfg)
        elif protocol == "SapLowerBound":
            _access_table(p, theta, "lower_bound", cfg)

    sizes = _chunk_sizes(trials)
    records: list[TrialRecord] = []

    def one_chunk(ci: int):
        rng = _chunk_rng(seed, ci)
        acc = [_RatioAccumulator() for _ in combos]
        sga = [_RatioAccumulator() for _ in combos]  # success given access
        ase_acc = [_RatioAccumulator() for _ in combos]
        chunk_records: list[TrialRecord] = []
        for _ in range(sizes[ci]):
            n_p = rng.poisson(p.lambda1 * window_side**2)
            prim = rng.random((n_p, 2)) * window_side
            n_s = rng.poisson(p.lambda2 * window_side**2)
            sec = rng.random((n_s, 2)) * window_side
            ang = rng.uniform(0.0, 2.0 * math.pi, n_s)
            rx = (sec + p.d * np.stack([np.cos(ang), np.sin(ang)], axis=1)) % window_side
            if n_s == 0:
                for a in (*acc, *sga, *ase_acc):
                    a.trials += 1
                continue
            pl_tp = toroidal_distances(sec, prim, window_side) ** -p.alpha
            pl_rp = toroidal_distances(rx, prim, window_side) ** -p.alpha
            sense_h_tx = rng.exponential(size=(n_s, n_p)) if faded else np.ones((n_s, n_p))
            eps_tx = rng.standard_normal(n_s)
            eps_rx = rng.standard_normal(n_s)
            h_prim = rng.exponential(size=(n_s, n_p))
            h_sec = rng.exponential(size=(n_s, n_s))
            h0 = rng.exponential(size=n_s)
            u_access = rng.random(n_s)

            i_tx = p.p1 * (sense_h_tx * pl_tp).sum(axis=1)
            i_prim_rx = p.p1 * (h_prim * pl_rp).sum(axis=1)
            m_sec = p.p2 * h_sec * toroidal_distances(rx, sec, window_side) ** -p.alpha
            np.fill_diagonal(m_sec, 0.0)
            signal = p.p2 * h0 * p.d**-p.alpha if p.d > 0.0 else np.full(n_s, np.inf)

            a_mat = _access_matrix(combos, i_tx, pl_rp, eps_tx, eps_rx,
                                   u_access, p, cfg)
            i_sec_rx = m_sec @ a_mat.astype(float)
            with np.errstate(divide="ignore"):
                sir = signal[:, None] / (i_prim_rx[:, None] + i_sec_rx)
            success = a_mat & (sir > beta)
            k_access = a_mat.sum(axis=0)
            k_as = success.sum(axis=0)
            for j in range(len(combos)):
                acc[j].k += k_access[j]
                acc[j].k_sq += k_access[j] ** 2
                acc[j].kn += k_access[j] * n_s
                acc[j].n += n_s
                acc[j].n_sq += n_s * n_s
                acc[j].trials += 1
                sga[j].k += k_as[j]
                sga[j].k_sq += k_as[j] ** 2
                sga[j].kn += k_as[j] * k_access[j]
                sga[j].n += k_access[j]
                sga[j].n_sq += k_access[j] ** 2
                sga[j].trials += 1
                ase_acc[j].k += k_as[j]
                ase_acc[j].k_sq += k_as[j] ** 2
                ase_acc[j].kn += k_as[j] * n_s
                ase_acc[j].n += n_s
                ase_acc[j].n_sq += n_s * n_s
                ase_acc[j].trials += 1
            if ci == 0 and record_limit and len(chunk_records) < record_limit:
                for i in range(min(n_s, record_limit - len(chunk_records))):
                    sigma0 = combos[0][2]
                    i_meas = i_tx[i] * 10.0 ** (sigma0 * eps_tx[i] / 10.0) if sigma0 > 0.0 else i_tx[i]
                    r_i = float(analytic.empty_ball_radii(np.array([i_meas]), p)[0])
                    chunk_records.append(TrialRecord(
                        measured_i=float(i_meas),
                        r_ball=r_i,
                        access_granted=bool(a_mat[i, 0]),
                        sir_rx=float(sir[i, 0]),
                        success=bool(success[i, 0]),
                    ))
        return acc, sga, ase_acc, chunk_records

    results = _map_chunks(one_chunk, len(sizes))
    scale = p.lambda2 * math.log1p(beta)
    out: dict[tuple[str, float, float], dict[str, Estimate]] = {}
    for j, combo in enumerate(combos):
        tot_acc, tot_sga, tot_ase = _RatioAccumulator(), _RatioAccumulator(), _RatioAccumulator()
        for acc, sga, ase_acc, _chunk_records in results:
            tot_acc.add(acc[j])
            tot_sga.add(sga[j])
            tot_ase.add(ase_acc[j])
        out[combo] = {
            "ase": tot_ase.estimate(scale=scale),
            "access": tot_acc.estimate(),
            "success_given_access": tot_sga.estimate(),
        }
    records.extend(results[0][3])
    return out, records


def run_ase_experiment(
    scenario: Scenario,
    cfg: QuadratureConfig | None = None,
    record_limit: int = 0,
) -> tuple[Estimate, list[TrialRecord]]:
    """ASE estimate (and optional per-TX records) for one scenario."""
    s = scenario.validated()
    combo = (s.protocol, s.policy.theta, s.error_sigma_db)
    res, records = run_ase_grid(
        s.params, [combo], s.policy.beta, s.window_side, s.trials, s.master_seed,
        s.sensing_mode, cfg, record_limit=record_limit,
    )
    return res[combo]["ase"], records


def run_primary_outage_experiment(
    scenario: Scenario,
    theta: float | np.ndarray,
    cfg: QuadratureConfig | None = None,
) -> list[Estimate]:
    """Outage frequency of a typical primary link, per access threshold.

    The typical primary RX sits at the window center and is served by its
    nearest primary TX; interference aggregates the other primaries and the
    secondaries granted access under the scenario's protocol at each theta.
    """
    s = scenario.validated()
    if s.protocol == "RxThreshold":
        raise ParameterError(
            "RxThreshold activity is not supported by the primary-outage experiment"
        )
    thetas = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(thetas < 0.0):
        raise ParameterError("theta must be nonnegative")
    p = s.params
    w = s.window_side
    faded = s.sensing_mode == "faded"
    center = np.array([[w / 2.0, w / 2.0]])
    combos = [(s.protocol, float(t), s.error_sigma_db) for t in thetas]
    for protocol, t, _sigma in combos:
        if protocol == "SapExact":
            _access_table(p, t, "exact", cfg)
        elif protocol == "SapLowerBound":
            _access_table(p, t, "lower_bound", cfg)
    sizes = _chunk_sizes(s.trials)

    def one_chunk(ci: int) -> tuple[np.ndarray, int]:
        rng = _chunk_rng(s.master_seed, ci)
        outages = np.zeros(thetas.size, dtype=int)
        n_used = 0
        for _ in range(sizes[ci]):
            n_p = rng.poisson(p.lambda1 * w * w)
            prim = rng.random((n_p, 2)) * w
            n_s = rng.poisson(p.lambda2 * w * w)
            sec = rng.random((n_s, 2)) * w
            if faded and n_s and n_p:
                sense_h = rng.exponential(size=(n_s, n_p))
            else:
                sense_h = np.ones((n_s, n_p))
            eps_tx = rng.standard_normal(n_s)
            u_access = rng.random(n_s)
            h_p = rng.exponential(size=n_p)
            h_s = rng.exponential(size=n_s)
            if n_p == 0:
                continue
            n_used += 1
            d_pc = toroidal_distances(center, prim, w)[0]
            serve = int(np.argmin(d_pc))
            pl_pc = d_pc**-p.alpha
            i_prim = p.p1 * float(np.sum(h_p * pl_pc)) - p.p1 * float(h_p[serve] * pl_pc[serve])
            sig = p.p1 * float(h_p[serve] * pl_pc[serve])
            if n_s:
                pl_tp = toroidal_distances(sec, prim, w) ** -p.alpha
                i_tx = p.p1 * (sense_h * pl_tp).sum(axis=1)
                a_mat = _access_matrix(combos, i_tx, pl_tp, eps_tx, eps_tx,
                                       u_access, p, cfg)
                pl_sc = toroidal_distances(center, sec, w)[0] ** -p.alpha
                i_sec = (p.p2 * h_s * pl_sc) @ a_mat
            else:
                i_sec = np.zeros(thetas.size)
            with np.errstate(divide="ignore"):
                sir = sig / (i_prim + i_sec)
            outages += sir <= p.gamma
        return outages, n_used

    results = _map_chunks(one_chunk, len(sizes))
    outages = np.sum([r[0] for r in results], axis=0)
    n_used = int(sum(r[1] for r in results))
    return [_wilson_estimate(int(k), n_used) for k in outages]


# -- SIR display experiments --------------------------------------------------


def run_average_sir_experiment(
    params: NetworkParams,
    protocols: tuple[str, ...],
    theta_grid: np.ndarray,
    trials: int,
    seed: int,
    window_side: float = 500.0,
    sensing_mode: str = "faded",
    cfg: QuadratureConfig | None = None,
) -> dict[tuple[str, float], dict[str, float]]:
    """Average RX SIR of a single secondary pair, per protocol and threshold.

    A lone pair senses in a primary field and accesses per protocol; among
    accessing slots the realized RX SIR (primary interference only) is
    averaged both in linear units and in dB, since the right aggregation is
    ambiguous.  Also reports the access rate.
    """
    validate(params)
    p = params
    thetas = np.asarray(theta_grid, dtype=float)
    faded = sensing_mode == "faded"
    combos = [(prot, float(t), 0.0) for prot in protocols for t in thetas]
    for prot, t, _ in combos:
        if prot == "SapExact":
            _access_table(p, t, "exact", cfg)
        elif prot == "SapLowerBound":
            _access_table(p, t, "lower_bound", cfg)
    sizes = _chunk_sizes(trials)
    lam_area = p.lambda1 * math.pi * (window_side / 2.0) ** 2

    def one_chunk(ci: int):
        rng = _chunk_rng(seed, ci)
        n = sizes[ci]
        counts = rng.poisson(lam_area, n)
        total = int(counts.sum())
        idx = np.repeat(np.arange(n), counts)
        y = np.sqrt(rng.uniform(0.0, (window_side / 2.0) ** 2, total))
        phi = rng.uniform(0.0, 2.0 * math.pi, total)
        h_sense_tx = rng.exponential(size=total) if faded else np.ones(total)
        h_trans = rng.exponential(size=total)
        h0 = rng.exponential(size=n)
        u = rng.random(n)
        pl_tx = y**-p.alpha
        x_sq = y * y + p.d * p.d - 2.0 * y * p.d * np.cos(phi)
        pl_rx = x_sq ** (-p.alpha / 2.0)
        i_tx = np.bincount(idx, weights=p.p1 * h_sense_tx * pl_tx, minlength=n)
        i_rx = np.bincount(idx, weights=p.p1 * h_trans * pl_rx, minlength=n)
        with np.errstate(divide="ignore"):
            sir = p.p2 * h0 * p.d**-p.alpha / i_rx
        out = []
        for prot, theta, _sigma in combos:
            if prot == "AlwaysOn":
                mask = np.ones(n, dtype=bool)
            elif prot == "TxThreshold":
                mask = p.p2 * p.d**-p.alpha / i_tx > theta
            elif prot == "RxThreshold":
                # true conditional coverage given the RX-side field
                log_cov = np.bincount(
                    idx,
                    weights=-np.log1p(theta * (p.p1 / p.p2) * p.d**p.alpha * pl_rx),
                    minlength=n,
                )
                mask = u <= np.exp(log_cov)
            else:
                kind = "exact" if prot == "SapExact" else "lower_bound"
                radii = analytic.empty_ball_radii(i_tx, p)
                mask = u <= access_probability_lookup(radii, theta, p, kind, cfg)
            sel = sir[mask]
            out.append((int(mask.sum()), float(sel.sum()),
                        float(np.log10(sel).sum() * 10.0) if sel.size else 0.0))
        return out, n

    results = _map_chunks(one_chunk, len(sizes))
    summary: dict[tuple[str, float], dict[str, float]] = {}
    for j, (prot, theta, _sigma) in enumerate(combos):
        n_access = sum(r[0][j][0] for r in results)
        sir_sum = sum(r[0][j][1] for r in results)
        sir_db_sum = sum(r[0][j][2] for r in results)
        n_total = sum(r[1] for r in results)
        summary[(prot, theta)] = {
            "access_rate": n_access / n_total,
            "mean_sir_linear": sir_sum / n_access if n_access else math.nan,
            "mean_sir_db": sir_db_sum / n_access if n_access else math.nan,
            "n_access": float(n_access),
        }
    return summary


def run_sensing_map(
    params: NetworkParams,
    n_side: int,
    window_side: float,
    seed: int,
    signal_dbm: float,
    cfg: QuadratureConfig | None = None,
) -> list[dict[str, float]]:
    """Sensed-vs-predicted SIR map on an n_side x n_side lattice of TX locations.

    One field realization; at each lattice point the measured interference
    is expressed as an SIR against the fixed reference signal power, and the
    predicted RX-side SIR distribution (through the inferred exclusion ball)
    is summarized by its median and dB mean.
    """
    from dataclasses import replace

    validate(params)
    rng = _chunk_rng(seed, 0)
    primaries = sample_ppp(params.lambda1, window_side, rng)
    signal = 10.0 ** ((signal_dbm - 30.0) / 10.0)
    # prediction uses the fixed display signal in place of the pair link budget
    display = replace(params, p2=signal * params.d**params.alpha)
    theta_db = np.arange(-30.0, 50.0 + 0.25, 0.5)
    theta_lin = 10.0 ** (theta_db / 10.0)
    rows = []
    for ix in range(n_side):
        for iy in range(n_side):
            loc = np.array([
                window_side * (ix + 0.5) / n_side,
                window_side * (iy + 0.5) / n_side,
            ])
            i_meas = measure_interference(loc, primaries, params, window_side, rng, "mean")
            if i_meas <= 0.0:
                continue
            ball = analytic.empty_ball_radius(i_meas, params)
            ccdf = np.array([
                analytic.access_probability(ball.radius, t, display, cfg) for t in theta_lin
            ])
            mass = np.empty_like(ccdf)
            mass[:-1] = ccdf[:-1] - ccdf[1:]
            mass[-1] = ccdf[-1]
            mass[0] += 1.0 - ccdf[0]
            mean_db = float(np.dot(theta_db, mass) / mass.sum())
            above = np.nonzero(ccdf >= 0.5)[0]
            median_db = float(theta_db[above[-1]]) if above.size else float(theta_db[0])
            rows.append({
                "x_m": float(loc[0]),
                "y_m": float(loc[1]),
                "i_dbm": 10.0 * math.log10(i_meas) + 30.0,
                "sensed_sir_db": 10.0 * math.log10(signal / i_meas),
                "predicted_sir_db_mean": mean_db,
                "predicted_sir_db_median": median_db,
                "r_ball_m": ball.radius,
            })
    return rows
