import pytest

from sap_lab.model import NetworkParams, dbm_to_watts


@pytest.fixture(scope="session")
def fig7_params() -> NetworkParams:
    """Dense indoor-style field used by the access-probability validation."""
    return NetworkParams(
        lambda1=7e-3,
        lambda2=0.0,
        p1=dbm_to_watts(11.3),
        p2=dbm_to_watts(5.0),
        alpha=3.0,
        d=2.0,
        tau=0.5,
        gamma=1.0,
    )


@pytest.fixture(scope="session")
def fig8_params() -> NetworkParams:
    """Sparse outdoor-style field used by the ASE and protection experiments."""
    return NetworkParams(
        lambda1=5e-4,
        lambda2=2e-4,
        p1=dbm_to_watts(43.0),
        p2=dbm_to_watts(23.0),
        alpha=4.0,
        d=7.0,
        tau=0.5,
        gamma=1.0,
    )
