"""Experiment runner.

Subcommands: analyze | optimize | simulate | reproduce.  Configs are flat
``key = value`` text files; densities arrive per km2, powers in dBm and
thresholds in dB, and are converted to SI units at this boundary.  Every
CSV starts with a provenance comment (artifact version, config hash, seed)
and reruns with identical config and seed are byte-identical.

Exit codes: 0 success, 2 config/validation error, 3 infeasible protection,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__, analytic, optimizer, simulator
from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    InfeasibleProtectionError,
    ParameterError,
)
from .model import (
    NetworkParams,
    db_to_linear,
    dbm_to_watts,
    linear_to_db,
    per_km2_to_per_m2,
    validate,
    watts_to_dbm,
)

_FIGURES = ("fig5", "fig6", "fig7", "fig8", "fig9", "fig10")


# -- config handling ----------------------------------------------------------


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat ``key = value`` lines; '#' starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value.strip()
    return out


def _as_float(cfg: dict[str, str], key: str, default: float | None = None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    try:
        return float(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"config key {key!r} is not a number: {cfg[key]!r}") from exc


def _as_int(cfg: dict[str, str], key: str, default: int | None = None) -> int:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    try:
        return int(cfg[key])
    except ValueError as exc:
        raise ConfigError(f"config key {key!r} is not an integer: {cfg[key]!r}") from exc


def _as_str(cfg: dict[str, str], key: str, default: str | None = None) -> str:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required config key {key!r}")
        return default
    return cfg[key]


def _as_grid(cfg: dict[str, str], key: str, default: str | None = None) -> np.ndarray:
    """A grid value: either 'start:stop:step' (inclusive) or a comma list."""
    raw = cfg.get(key, default)
    if raw is None:
        raise ConfigError(f"missing required config key {key!r}")
    try:
        if ":" in raw:
            start, stop, step = (float(tok) for tok in raw.split(":"))
            if step <= 0:
                raise ValueError
            n = int(math.floor((stop - start) / step + 1e-9)) + 1
            return start + step * np.arange(n)
        return np.array([float(tok) for tok in raw.split(",") if tok.strip()])
    except ValueError as exc:
        raise ConfigError(f"config key {key!r} is not a grid: {raw!r}") from exc


def params_from_config(cfg: dict[str, str]) -> NetworkParams:
    """Build SI-unit network parameters from boundary-unit config keys."""
    params = NetworkParams(
        lambda1=per_km2_to_per_m2(_as_float(cfg, "lambda1_per_km2")),
        lambda2=per_km2_to_per_m2(_as_float(cfg, "lambda2_per_km2", 0.0)),
        p1=dbm_to_watts(_as_float(cfg, "p1_dbm")),
        p2=dbm_to_watts(_as_float(cfg, "p2_dbm")),
        alpha=_as_float(cfg, "alpha"),
        d=_as_float(cfg, "d_m"),
        tau=_as_float(cfg, "tau", 0.5),
        gamma=db_to_linear(_as_float(cfg, "gamma_db", 0.0)),
    )
    return validate(params)


def _config_hash(cfg: dict[str, str]) -> str:
    canon = "\n".join(f"{k}={cfg[k]}" for k in sorted(cfg))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, provenance: str, header: list[str], rows: list[list]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(f"# {provenance}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _provenance(cfg: dict[str, str], seed: int | None) -> str:
    return f"sap-lab {__version__} config_sha256={_config_hash(cfg)} seed={seed}"


# -- commands -----------------------------------------------------------------


def cmd_analyze(cfg: dict[str, str], out_dir: Path) -> None:
    """Access-probability curves versus threshold and versus measured level."""
    params = params_from_config(cfg)
    if "r_ball_m" in cfg:
        r_ref = _as_float(cfg, "r_ball_m")
        if r_ref <= 0.0:
            raise ConfigError("r_ball_m must be positive")
    else:
        r_ref = analytic.empty_ball_radius(dbm_to_watts(_as_float(cfg, "i_dbm_ref")), params).radius
    theta_db = _as_grid(cfg, "theta_db", "-10:20:2")
    i_dbm = _as_grid(cfg, "i_dbm", "-40:10:2")
    theta_ref = db_to_linear(_as_float(cfg, "theta_ref_db", 0.0))
    prov = _provenance(cfg, None)

    i_ref_dbm = watts_to_dbm(analytic.mean_interference(r_ref, params))
    header = ["theta_db", "i_dbm", "ps_exact", "ps_lb", "ps_small_i", "ps_large_i"]
    rows = []
    for t_db in theta_db:
        t = db_to_linear(float(t_db))
        rows.append([
            float(t_db), i_ref_dbm,
            analytic.access_probability(r_ref, t, params),
            analytic.access_probability_lower_bound(r_ref, t, params),
            analytic.access_probability_small_interference(r_ref, t, params),
            analytic.access_probability_large_interference(t, params),
        ])
    write_csv(out_dir / "access_prob_vs_theta.csv", prov, header, rows)

    rows = []
    large_i = analytic.access_probability_large_interference(theta_ref, params)
    for level in i_dbm:
        r = analytic.empty_ball_radius(dbm_to_watts(float(level)), params).radius
        rows.append([
            linear_to_db(theta_ref) if theta_ref > 0 else -math.inf, float(level),
            analytic.access_probability(r, theta_ref, params),
            analytic.access_probability_lower_bound(r, theta_ref, params),
            analytic.access_probability_small_interference(r, theta_ref, params),
            large_i,
        ])
    write_csv(out_dir / "access_prob_vs_i.csv", prov, header, rows)


def cmd_optimize(cfg: dict[str, str], out_dir: Path) -> None:
    """Joint threshold optimization; JSON optimum plus the ASE surface grid."""
    params = params_from_config(cfg)
    theta_db = _as_grid(cfg, "theta_db", "-20:30:0.5")
    beta_db = _as_grid(cfg, "beta_db", "-20:30:0.5")
    variant_key = _as_str(cfg, "variant", "linear")
    reading = _as_str(cfg, "outage", "corrected")
    backend = _as_str(cfg, "backend", "lower_bound")
    variants = ("printed", "linear") if variant_key == "both" else (variant_key,)
    prov = _provenance(cfg, None)
    result: dict[str, dict] = {}
    for variant in variants:
        opt = optimizer.optimize(
            params, variant, theta_db, beta_db, backend=backend, reading=reading
        )
        result[variant] = {
            "theta_star_db": linear_to_db(opt.theta_star),
            "beta_star_db": linear_to_db(opt.beta_star),
            "theta_bar_db": linear_to_db(opt.theta_bar) if opt.theta_bar > 0 else None,
            "theta_bar_linear": opt.theta_bar,
            "ase_nat_per_s_hz_m2": opt.ase,
            "lambda2_star_per_km2": opt.lambda2_star * 1e6,
        }
        surface, _phi = optimizer.ase_surface(
            params,
            10.0 ** (theta_db / 10.0),
            10.0 ** (beta_db / 10.0),
            variant,
            backend=backend,
        )
        rows = [
            [float(t), float(b), float(surface[i, j])]
            for i, t in enumerate(theta_db)
            for j, b in enumerate(beta_db)
        ]
        write_csv(out_dir / f"ase_surface_{variant}.csv", prov,
                  ["theta_db", "beta_db", "ase"], rows)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "optimum.json", "w") as fh:
        json.dump({"provenance": prov, "results": result}, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_simulate(cfg: dict[str, str], out_dir: Path) -> None:
    """Monte Carlo estimates per protocol per grid point, replay-ready."""
    params = params_from_config(cfg)
    theta_db = _as_grid(cfg, "theta_db", "-5:15:2.5")
    beta = db_to_linear(_as_float(cfg, "beta_db", 0.0))
    trials = _as_int(cfg, "trials", 20000)
    seed = _as_int(cfg, "seed", 1)
    window = _as_float(cfg, "window_m", 500.0)
    sensing = _as_str(cfg, "sensing", "faded")
    sigma_grid = _as_grid(cfg, "error_sigma_db", "0")
    protocols = tuple(
        tok.strip() for tok in _as_str(cfg, "protocols", "SapExact,TxThreshold").split(",")
        if tok.strip()
    )
    for prot in protocols:
        if prot not in simulator.PROTOCOLS:
            raise ConfigError(f"unknown protocol {prot!r} in config key 'protocols'")
    record_limit = _as_int(cfg, "records", 0)
    combos = [
        (prot, db_to_linear(float(t)), float(sig))
        for prot in protocols for t in theta_db for sig in sigma_grid
    ]
    results, records = simulator.run_ase_grid(
        params, combos, beta, window, trials, seed, sensing, record_limit=record_limit
    )
    prov = _provenance(cfg, seed)
    header = ["experiment", "protocol", "sweep_name", "sweep_value", "sigma_db",
              "estimand", "value", "ci_low", "ci_high", "trials", "seed"]
    rows = []
    for (prot, theta, sigma) in combos:
        for estimand in ("ase", "access", "success_given_access"):
            est = results[(prot, theta, sigma)][estimand]
            rows.append([
                "simulate", prot, "theta_db", linear_to_db(theta) if theta > 0 else -math.inf,
                sigma, estimand, est.mean, est.ci_low, est.ci_high, est.trials, seed,
            ])
    write_csv(out_dir / "simulate.csv", prov, header, rows)
    if record_limit:
        rec_rows = [
            [r.measured_i, r.r_ball, r.access_granted, r.sir_rx, r.success]
            for r in records
        ]
        write_csv(out_dir / "simulate_records.csv", prov,
                  ["measured_i_watt", "r_ball_m", "access", "sir_rx", "success"], rec_rows)


# -- figure scenario presets --------------------------------------------------

_PRESETS: dict[str, dict[str, str]] = {
    # sensed-vs-predicted SIR map, sparse primary field
    "fig5": {
        "lambda1_per_km2": "10", "lambda2_per_km2": "0", "p1_dbm": "43",
        "p2_dbm": "23", "alpha": "4", "d_m": "2", "window_m": "1000",
        "seed": "20240105", "signal_dbm": "10", "n_side": "5",
    },
    # average RX SIR vs threshold for the three sensing rules
    "fig6": {
        "lambda1_per_km2": "500", "lambda2_per_km2": "0", "p1_dbm": "43",
        "p2_dbm": "23", "alpha": "4", "d_m": "2", "window_m": "500",
        "theta_db": "-10:20:2", "trials": "20000", "seed": "20240106",
        "sensing": "faded",
    },
    # access probability vs threshold, dense indoor-style field
    "fig7": {
        "lambda1_per_km2": "7000", "lambda2_per_km2": "0", "p1_dbm": "11.3",
        "p2_dbm": "5", "alpha": "3", "r_ball_m": "3.6", "d_m_list": "1.2,2",
        "theta_db": "-10:20:2", "trials": "200000", "seed": "20240107",
        "window_m": "500",
    },
    # ASE vs threshold for all protocols, plus the analytic curve; the pair
    # distance sits where TX-side prediction errors are material
    "fig8": {
        "lambda1_per_km2": "500", "lambda2_per_km2": "200", "p1_dbm": "43",
        "p2_dbm": "23", "alpha": "4", "d_m": "7", "beta_db": "0",
        "theta_db": "-5:15:2.5", "trials": "200000", "seed": "20240108",
        "window_m": "500", "sensing": "mean",
    },
    # optimal thresholds vs secondary density: grid search and root shortcut
    "fig9": {
        "lambda1_per_km2": "500", "p1_dbm": "43", "p2_dbm": "23", "alpha": "4",
        "d_m": "2", "tau": "0.5", "gamma_db": "0",
        "lambda2_per_km2_list": "50,100,200,400",
        "theta_db": "-20:30:0.5", "beta_db": "-20:30:0.5",
    },
    # ASE vs measurement-error level for predictive and direct sensing
    "fig10": {
        "lambda1_per_km2": "500", "lambda2_per_km2": "200", "p1_dbm": "43",
        "p2_dbm": "23", "alpha": "4", "d_m": "7", "beta_db": "0",
        "theta_db": "0", "error_sigma_db": "0,1,2,3,4,5,6", "trials": "100000",
        "seed": "20240110", "window_m": "500", "sensing": "mean",
    },
}


def cmd_reproduce(figure: str, cfg: dict[str, str], out_dir: Path) -> None:
    """Run a built-in scenario preset and write plot-ready CSV files."""
    if figure not in _FIGURES:
        raise ConfigError(f"unknown figure id {figure!r}; choose from {_FIGURES}")
    merged = dict(_PRESETS[figure])
    merged.update(cfg)
    prov = _provenance(merged, _as_int(merged, "seed", 0) if "seed" in merged else None)

    if figure == "fig5":
        params = params_from_config(merged)
        rows_raw = simulator.run_sensing_map(
            params, _as_int(merged, "n_side"), _as_float(merged, "window_m"),
            _as_int(merged, "seed"), _as_float(merged, "signal_dbm"),
        )
        header = list(rows_raw[0].keys())
        write_csv(out_dir / "fig5_sensing_map.csv", prov, header,
                  [[r[k] for k in header] for r in rows_raw])
        return

    if figure == "fig6":
        params = params_from_config(merged)
        theta_db = _as_grid(merged, "theta_db")
        protocols = ("TxThreshold", "SapExact", "RxThreshold")
        summary = simulator.run_average_sir_experiment(
            params, protocols, 10.0 ** (theta_db / 10.0),
            _as_int(merged, "trials"), _as_int(merged, "seed"),
            _as_float(merged, "window_m"), _as_str(merged, "sensing"),
        )
        for prot in protocols:
            rows = []
            for t_db in theta_db:
                s = summary[(prot, float(db_to_linear(float(t_db))))]
                rows.append([float(t_db), s["access_rate"], s["mean_sir_linear"],
                             s["mean_sir_db"], int(s["n_access"])])
            write_csv(out_dir / f"fig6_avg_sir_{prot}.csv", prov,
                      ["theta_db", "access_rate", "mean_sir_linear", "mean_sir_db",
                       "n_access"], rows)
        return

    if figure == "fig7":
        theta_db = _as_grid(merged, "theta_db")
        trials = _as_int(merged, "trials")
        seed = _as_int(merged, "seed")
        r_ball = _as_float(merged, "r_ball_m")
        for d in _as_grid(merged, "d_m_list"):
            local = dict(merged)
            local["d_m"] = repr(float(d))
            params = params_from_config(local)
            rows = []
            for t_db in theta_db:
                t = db_to_linear(float(t_db))
                rows.append([
                    float(t_db),
                    analytic.access_probability(r_ball, t, params),
                    analytic.access_probability_lower_bound(r_ball, t, params),
                ])
            tag = repr(float(d)).replace(".", "p")
            write_csv(out_dir / f"fig7_analytic_d{tag}.csv", prov,
                      ["theta_db", "ps_exact", "ps_lb"], rows)
            estimates = simulator.run_access_prob_experiment(
                params, 10.0 ** (theta_db / 10.0), r_ball, trials, seed,
                mode="empty-ball", window_side=_as_float(merged, "window_m"),
            )
            rows = [
                [float(t_db), est.mean, est.ci_low, est.ci_high, est.trials, seed]
                for t_db, est in zip(theta_db, estimates)
            ]
            write_csv(out_dir / f"fig7_mc_d{tag}.csv", prov,
                      ["theta_db", "estimate", "ci_low", "ci_high", "trials", "seed"], rows)
        return

    if figure == "fig8":
        params = params_from_config(merged)
        theta_db = _as_grid(merged, "theta_db")
        beta = db_to_linear(_as_float(merged, "beta_db"))
        seed = _as_int(merged, "seed")
        combos = [
            (prot, db_to_linear(float(t)), 0.0)
            for prot in simulator.PROTOCOLS for t in theta_db
        ]
        results, _records = simulator.run_ase_grid(
            params, combos, beta, _as_float(merged, "window_m"),
            _as_int(merged, "trials"), seed, _as_str(merged, "sensing"),
        )
        for prot in simulator.PROTOCOLS:
            rows = []
            for t_db in theta_db:
                est = results[(prot, db_to_linear(float(t_db)), 0.0)]["ase"]
                rows.append([float(t_db), est.mean, est.ci_low, est.ci_high,
                             est.trials, seed])
            write_csv(out_dir / f"fig8_mc_{prot}.csv", prov,
                      ["theta_db", "ase", "ci_low", "ci_high", "trials", "seed"], rows)
        rows = []
        for t_db in theta_db:
            t = db_to_linear(float(t_db))
            rows.append([float(t_db), optimizer.ase(t, beta, params, "linear")])
        write_csv(out_dir / "fig8_analytic.csv", prov, ["theta_db", "ase"], rows)
        return

    if figure == "fig9":
        theta_db = _as_grid(merged, "theta_db")
        beta_db = _as_grid(merged, "beta_db")
        grid_rows = []
        asym_rows = []
        for lam2 in _as_grid(merged, "lambda2_per_km2_list"):
            local = dict(merged)
            local["lambda2_per_km2"] = repr(float(lam2))
            params = params_from_config(local)
            opt = optimizer.optimize(params, "linear", theta_db, beta_db,
                                     backend="lower_bound")
            grid_rows.append([
                float(lam2), linear_to_db(opt.theta_star), linear_to_db(opt.beta_star),
                opt.ase, opt.theta_bar, opt.lambda2_star * 1e6,
            ])
            theta_bar, beta_star = optimizer.solve_beta_asymptotic(params, "linear")
            asym_rows.append([float(lam2), theta_bar, linear_to_db(beta_star)])
        write_csv(out_dir / "fig9_grid_search.csv", prov,
                  ["lambda2_per_km2", "theta_star_db", "beta_star_db", "ase",
                   "theta_bar_linear", "lambda2_star_per_km2"], grid_rows)
        write_csv(out_dir / "fig9_asymptotic.csv", prov,
                  ["lambda2_per_km2", "theta_bar_linear", "beta_star_db"], asym_rows)
        return

    # fig10
    params = params_from_config(merged)
    theta = db_to_linear(float(_as_grid(merged, "theta_db")[0]))
    beta = db_to_linear(_as_float(merged, "beta_db"))
    seed = _as_int(merged, "seed")
    sigma_grid = _as_grid(merged, "error_sigma_db")
    protocols = ("SapExact", "TxThreshold")
    combos = [(prot, theta, float(s)) for prot in protocols for s in sigma_grid]
    results, _records = simulator.run_ase_grid(
        params, combos, beta, _as_float(merged, "window_m"),
        _as_int(merged, "trials"), seed, _as_str(merged, "sensing"),
    )
    for prot in protocols:
        rows = []
        for s in sigma_grid:
            est = results[(prot, theta, float(s))]["ase"]
            rows.append([float(s), est.mean, est.ci_low, est.ci_high, est.trials, seed])
        write_csv(out_dir / f"fig10_{prot}.csv", prov,
                  ["sigma_db", "ase", "ci_low", "ci_high", "trials", "seed"], rows)


# -- entry point ---------------------------------------------------------------


def _apply_overrides(cfg: dict[str, str], args: argparse.Namespace) -> dict[str, str]:
    if getattr(args, "seed", None) is not None:
        cfg["seed"] = str(args.seed)
    if getattr(args, "trials", None) is not None:
        cfg["trials"] = str(args.trials)
    if getattr(args, "variant", None) is not None:
        cfg["variant"] = args.variant
    if getattr(args, "sensing", None) is not None:
        cfg["sensing"] = args.sensing
    if getattr(args, "outage", None) is not None:
        cfg["outage"] = args.outage
    return cfg


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sap-lab",
        description="Analytic and Monte Carlo laboratory for the sense-and-predict MAC",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("analyze", "optimize", "simulate"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, type=Path)
        p.add_argument("--out", required=True, type=Path)
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        p.add_argument("--variant", choices=("printed", "linear", "both"))
        p.add_argument("--sensing", choices=simulator.SENSING_MODES)
        p.add_argument("--outage", choices=optimizer.READINGS)
    p = sub.add_parser("reproduce")
    p.add_argument("figure", choices=_FIGURES)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--seed", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--variant", choices=("printed", "linear", "both"))
    p.add_argument("--sensing", choices=simulator.SENSING_MODES)
    p.add_argument("--outage", choices=optimizer.READINGS)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "reproduce":
            cfg = _apply_overrides({}, args)
            cmd_reproduce(args.figure, cfg, args.out)
        else:
            cfg = parse_config_text(Path(args.config).read_text())
            cfg = _apply_overrides(cfg, args)
            if args.command == "analyze":
                cmd_analyze(cfg, args.out)
            elif args.command == "optimize":
                cmd_optimize(cfg, args.out)
            else:
                cmd_simulate(cfg, args.out)
    except (ConfigError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleProtectionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (BracketError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    return 0


if __name__ == "__main__":
    sys.exit(main())
