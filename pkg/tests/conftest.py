"""Shared fixtures and the --runslow switch."""

import pytest

from quanto.models import HyperbolicVolParams, QuantoInstrument, QuantoMarket


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run slow MC tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def base_market() -> QuantoMarket:
    """Base parameters L0=6%, X0=1, nu_L=8%, beta_L=0.3, nu_X=15%, beta_X=0.5."""
    return QuantoMarket()


@pytest.fixture
def lognormal_market() -> QuantoMarket:
    return QuantoMarket(
        rho=-0.5,
        libor_vol=HyperbolicVolParams(nu=0.25, beta=1.0),
        fx_vol=HyperbolicVolParams(nu=0.15, beta=1.0),
    )


@pytest.fixture
def atm_caplet() -> QuantoInstrument:
    return QuantoInstrument(expiry_T=1.0, strike_K=0.06)
