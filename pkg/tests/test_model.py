import dataclasses

import pytest
from hypothesis import given, strategies as st

from sap_lab import model
from sap_lab.errors import ParameterError


def test_dbm_to_watts_anchors():
    assert model.dbm_to_watts(30.0) == pytest.approx(1.0)
    assert model.dbm_to_watts(0.0) == pytest.approx(1e-3)
    # 10^1.3 W
    assert model.dbm_to_watts(43.0) == pytest.approx(19.952623149688797, rel=1e-12)


def test_density_conversion():
    assert model.per_km2_to_per_m2(500.0) == pytest.approx(5e-4)
    assert model.per_km2_to_per_m2(0.0) == 0.0
    assert model.per_km2_to_per_m2(7e3) == pytest.approx(7e-3)
    assert model.per_m2_to_per_km2(5e-4) == pytest.approx(500.0)


def test_db_to_linear_anchors():
    assert model.db_to_linear(0.0) == 1.0
    assert model.db_to_linear(10.0) == pytest.approx(10.0)
    assert model.db_to_linear(-10.0) == pytest.approx(0.1)


@given(st.floats(min_value=1e-6, max_value=1e6))
def test_db_round_trip(x):
    assert model.db_to_linear(model.linear_to_db(x)) == pytest.approx(x, rel=1e-12)


@given(st.floats(min_value=-60.0, max_value=60.0))
def test_dbm_round_trip(x):
    assert model.watts_to_dbm(model.dbm_to_watts(x)) == pytest.approx(x, abs=1e-10)


def _valid() -> model.NetworkParams:
    return model.NetworkParams(
        lambda1=5e-4, lambda2=2e-4, p1=19.95, p2=0.1995, alpha=4.0, d=2.0,
        tau=0.1, gamma=1.0,
    )


def test_validate_accepts_valid_params():
    params = _valid()
    assert model.validate(params) is params


@pytest.mark.parametrize(
    "changes, field",
    [
        ({"alpha": 2.0}, "alpha"),
        ({"alpha": 1.5}, "alpha"),
        ({"tau": 1.5}, "tau"),
        ({"tau": 0.0}, "tau"),
        ({"p1": 0.0}, "p1"),
        ({"p2": -1.0}, "p2"),
        ({"lambda1": 0.0}, "lambda1"),
        ({"lambda2": -1e-9}, "lambda2"),
        ({"d": -1.0}, "d"),
        ({"gamma": 0.0}, "gamma"),
    ],
)
def test_validate_rejects_and_names_field(changes, field):
    params = dataclasses.replace(_valid(), **changes)
    with pytest.raises(ParameterError, match=field):
        model.validate(params)


def test_alpha_boundary_message():
    params = dataclasses.replace(_valid(), alpha=2.0)
    with pytest.raises(ParameterError, match="alpha must exceed 2"):
        model.validate(params)


def test_tau_message():
    params = dataclasses.replace(_valid(), tau=1.5)
    with pytest.raises(ParameterError, match=r"tau must lie in \(0,1\)"):
        model.validate(params)


def test_policy_validation():
    model.validate_policy(model.Policy(theta=0.0, beta=1.0))
    with pytest.raises(ParameterError, match="beta"):
        model.validate_policy(model.Policy(theta=1.0, beta=0.0))
    with pytest.raises(ParameterError, match="theta"):
        model.validate_policy(model.Policy(theta=-0.5, beta=1.0))


def test_sensed_sir_uses_reference_signal():
    # 10 dBm reference over 0 dBm interference is 10 dB
    assert model.sensed_sir(1e-3) == pytest.approx(10.0)
