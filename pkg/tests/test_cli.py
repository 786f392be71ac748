import json
from pathlib import Path

import pytest

from sap_lab import cli
from sap_lab.errors import ConfigError

BASE_CONFIG = """
# minimal network description
lambda1_per_km2 = 500
lambda2_per_km2 = 200
p1_dbm = 43
p2_dbm = 23
alpha = 4
d_m = 7
tau = 0.5
gamma_db = 0
"""


def _write(tmp_path: Path, text: str, name: str = "exp.cfg") -> Path:
    path = tmp_path / name
    path.write_text(text)
    return path


def test_parse_config_text():
    cfg = cli.parse_config_text("a = 1\n# comment\nb = x y  # trailing\n\n")
    assert cfg == {"a": "1", "b": "x y"}
    with pytest.raises(ConfigError, match="line 1"):
        cli.parse_config_text("not a pair")


def test_grid_parsing():
    cfg = {"g": "-5:15:2.5", "l": "1,2,3"}
    assert list(cli._as_grid(cfg, "g")) == pytest.approx([-5.0, -2.5, 0.0, 2.5, 5.0, 7.5, 10.0, 12.5, 15.0])
    assert list(cli._as_grid(cfg, "l")) == [1.0, 2.0, 3.0]
    with pytest.raises(ConfigError, match="missing"):
        cli._as_grid(cfg, "nope")


def test_analyze_writes_curves(tmp_path):
    config = _write(tmp_path, BASE_CONFIG + "r_ball_m = 3.6\ntheta_db = -10:10:5\ni_dbm = -40:-20:10\n")
    out = tmp_path / "out"
    assert cli.main(["analyze", "--config", str(config), "--out", str(out)]) == 0
    text = (out / "access_prob_vs_theta.csv").read_text()
    lines = text.splitlines()
    assert lines[0].startswith("# sap-lab")
    assert lines[1] == "theta_db,i_dbm,ps_exact,ps_lb,ps_small_i,ps_large_i"
    first = dict(zip(lines[1].split(","), lines[2].split(",")))
    assert 0.0 < float(first["ps_exact"]) <= 1.0
    assert float(first["ps_lb"]) <= float(first["ps_exact"]) + 1e-9
    assert (out / "access_prob_vs_i.csv").exists()


def test_analyze_near_zero_threshold_saturates(tmp_path):
    config = _write(tmp_path, BASE_CONFIG + "r_ball_m = 3.6\ntheta_db = -90:-90:1\ni_dbm = -30:-30:1\n")
    out = tmp_path / "out"
    assert cli.main(["analyze", "--config", str(config), "--out", str(out)]) == 0
    lines = (out / "access_prob_vs_theta.csv").read_text().splitlines()
    row = dict(zip(lines[1].split(","), lines[2].split(",")))
    for col in ("ps_exact", "ps_lb", "ps_small_i", "ps_large_i"):
        assert float(row[col]) == pytest.approx(1.0, abs=1e-3)


def test_analyze_rejects_bad_alpha(tmp_path, capsys):
    config = _write(tmp_path, BASE_CONFIG.replace("alpha = 4", "alpha = 2") + "r_ball_m = 3.6\n")
    code = cli.main(["analyze", "--config", str(config), "--out", str(tmp_path / "o")])
    assert code == 2
    assert "alpha" in capsys.readouterr().err


def test_optimize_writes_json_and_surface(tmp_path):
    config = _write(
        tmp_path,
        BASE_CONFIG + "theta_db = -5:5:5\nbeta_db = 0:10:5\nvariant = both\n",
    )
    out = tmp_path / "out"
    assert cli.main(["optimize", "--config", str(config), "--out", str(out)]) == 0
    payload = json.loads((out / "optimum.json").read_text())
    assert set(payload["results"]) == {"printed", "linear"}
    for variant in ("printed", "linear"):
        assert payload["results"][variant]["ase_nat_per_s_hz_m2"] > 0.0
        assert (out / f"ase_surface_{variant}.csv").exists()


def test_optimize_infeasible_protection_exits_3(tmp_path):
    config = _write(
        tmp_path,
        BASE_CONFIG.replace("tau = 0.5", "tau = 1e-9") + "theta_db = 0:0:1\nbeta_db = 0:0:1\n",
    )
    assert cli.main(["optimize", "--config", str(config), "--out", str(tmp_path / "o")]) == 3


def test_simulate_rows_and_determinism(tmp_path):
    config = _write(
        tmp_path,
        BASE_CONFIG
        + "theta_db = 0:5:5\nbeta_db = 0\ntrials = 300\nseed = 12\nwindow_m = 500\n"
        + "sensing = mean\nprotocols = SapExact,TxThreshold\nrecords = 5\n",
    )
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert cli.main(["simulate", "--config", str(config), "--out", str(out1)]) == 0
    assert cli.main(["simulate", "--config", str(config), "--out", str(out2)]) == 0
    data1 = (out1 / "simulate.csv").read_bytes()
    assert data1 == (out2 / "simulate.csv").read_bytes()
    lines = data1.decode().splitlines()
    assert lines[1].split(",")[:6] == ["experiment", "protocol", "sweep_name", "sweep_value", "sigma_db", "estimand"]
    # two protocols x two grid points x three estimands
    assert len(lines) == 2 + 2 * 2 * 3
    header = lines[1].split(",")
    for line in lines[2:]:
        row = dict(zip(header, line.split(",")))
        assert float(row["ci_low"]) <= float(row["value"]) <= float(row["ci_high"])
    assert (out1 / "simulate_records.csv").read_bytes() == (out2 / "simulate_records.csv").read_bytes()


def test_simulate_single_trial_wide_ci(tmp_path):
    config = _write(
        tmp_path,
        BASE_CONFIG + "theta_db = 0\nbeta_db = 0\ntrials = 1\nseed = 5\nwindow_m = 500\nsensing = mean\nprotocols = AlwaysOn\n",
    )
    out = tmp_path / "o"
    assert cli.main(["simulate", "--config", str(config), "--out", str(out)]) == 0
    lines = (out / "simulate.csv").read_text().splitlines()
    header = lines[1].split(",")
    rows = [dict(zip(header, line.split(","))) for line in lines[2:]]
    access = next(r for r in rows if r["estimand"] == "access")
    assert int(access["trials"]) == 1


def test_cli_seed_override_changes_output(tmp_path):
    config = _write(
        tmp_path,
        BASE_CONFIG + "theta_db = 0\nbeta_db = 0\ntrials = 200\nseed = 12\nwindow_m = 500\nsensing = mean\nprotocols = SapExact\n",
    )
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert cli.main(["simulate", "--config", str(config), "--out", str(out1)]) == 0
    assert cli.main(["simulate", "--config", str(config), "--out", str(out2), "--seed", "13"]) == 0
    assert (out1 / "simulate.csv").read_bytes() != (out2 / "simulate.csv").read_bytes()


def test_reproduce_unknown_figure_exits_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["reproduce", "fig99", "--out", "/tmp/x"])
    assert exc.value.code == 2


def test_reproduce_fig7_small(tmp_path):
    out = tmp_path / "fig7"
    assert cli.main(["reproduce", "fig7", "--out", str(out), "--trials", "400"]) == 0
    for d_tag in ("1p2", "2p0"):
        assert (out / f"fig7_analytic_d{d_tag}.csv").exists()
        mc = (out / f"fig7_mc_d{d_tag}.csv").read_text().splitlines()
        assert mc[1] == "theta_db,estimate,ci_low,ci_high,trials,seed"
        assert len(mc) == 2 + 16


def test_reproduce_fig5_map(tmp_path):
    out = tmp_path / "fig5"
    assert cli.main(["reproduce", "fig5", "--out", str(out)]) == 0
    lines = (out / "fig5_sensing_map.csv").read_text().splitlines()
    assert len(lines) == 2 + 25


def test_reproduce_fig6_small(tmp_path):
    out = tmp_path / "fig6"
    assert cli.main(["reproduce", "fig6", "--out", str(out), "--trials", "500"]) == 0
    for prot in ("TxThreshold", "SapExact", "RxThreshold"):
        lines = (out / f"fig6_avg_sir_{prot}.csv").read_text().splitlines()
        assert lines[1].startswith("theta_db,access_rate,mean_sir_linear")
        assert len(lines) == 2 + 16


def test_reproduce_fig8_small(tmp_path):
    out = tmp_path / "fig8"
    assert cli.main(["reproduce", "fig8", "--out", str(out), "--trials", "300"]) == 0
    assert (out / "fig8_analytic.csv").exists()
    for prot in ("SapExact", "SapLowerBound", "TxThreshold", "RxThreshold", "AlwaysOn"):
        lines = (out / f"fig8_mc_{prot}.csv").read_text().splitlines()
        assert len(lines) == 2 + 9


def test_reproduce_fig9_small(tmp_path):
    out = tmp_path / "fig9"
    cli.cmd_reproduce(
        "fig9",
        {"theta_db": "-10:0:5", "beta_db": "5:15:5", "lambda2_per_km2_list": "50,200"},
        out,
    )
    grid = (out / "fig9_grid_search.csv").read_text().splitlines()
    assert len(grid) == 2 + 2
    assert (out / "fig9_asymptotic.csv").exists()


def test_reproduce_fig10_small(tmp_path):
    out = tmp_path / "fig10"
    cli.cmd_reproduce("fig10", {"trials": "300", "error_sigma_db": "0,6"}, out)
    for prot in ("SapExact", "TxThreshold"):
        lines = (out / f"fig10_{prot}.csv").read_text().splitlines()
        assert lines[1] == "sigma_db,ase,ci_low,ci_high,trials,seed"
        assert len(lines) == 2 + 2


def test_reproduce_deterministic(tmp_path):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["reproduce", "fig7", "--out", str(out1), "--trials", "200"]) == 0
    assert cli.main(["reproduce", "fig7", "--out", str(out2), "--trials", "200"]) == 0
    for name in ("fig7_mc_d1p2.csv", "fig7_mc_d2p0.csv", "fig7_analytic_d1p2.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
