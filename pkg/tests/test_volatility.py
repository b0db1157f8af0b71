"""Tests for local volatility functions."""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from quanto.errors import ParameterError
from quanto.models import HyperbolicVolParams, QuantoMarket
from quanto.volatility import (
    HyperbolicVol,
    fx_drift,
    hyperbolic_vol,
    log_coeffs,
    log_vol_derivs,
    quanto_drift,
)

LIBOR = HyperbolicVolParams(nu=0.08, beta=0.3)
FX = HyperbolicVolParams(nu=0.15, beta=0.5)


def test_hyperbolic_vol_at_base_libor_level():
    """Base LIBOR parameters give about 24.7% vol at 6%."""
    assert hyperbolic_vol(0.06, LIBOR) == pytest.approx(0.247026, abs=1e-5)


@pytest.mark.parametrize("beta", [0.1, 0.3, 0.5, 0.9, 1.0])
def test_hyperbolic_vol_equals_nu_at_one(beta):
    """f_beta(1) = 1 for every skew."""
    params = HyperbolicVolParams(nu=0.15, beta=beta)
    assert hyperbolic_vol(1.0, params) == pytest.approx(0.15, rel=1e-14)


def test_lognormal_limit_is_flat():
    """beta = 1 returns nu at every level."""
    params = HyperbolicVolParams(nu=0.2, beta=1.0)
    levels = np.array([1e-4, 0.06, 1.0, 50.0])
    np.testing.assert_array_equal(hyperbolic_vol(levels, params), np.full(4, 0.2))


def test_vol_decreases_with_level_for_skewed_params():
    """beta < 1 gives a downward skew in the level."""
    levels = np.linspace(0.01, 0.2, 50)
    vols = hyperbolic_vol(levels, LIBOR)
    assert np.all(np.diff(vols) < 0)


def test_array_input_keeps_shape():
    levels = np.full((3, 4), 0.05)
    assert hyperbolic_vol(levels, LIBOR).shape == (3, 4)


@pytest.mark.parametrize("level", [0.0, -0.01, float("nan")])
def test_non_positive_level_raises(level):
    """Levels must be strictly positive and finite."""
    with pytest.raises(ParameterError):
        hyperbolic_vol(level, LIBOR)


@pytest.mark.parametrize("beta", [0.0, -0.2, 1.5])
def test_beta_outside_unit_interval_rejected(beta):
    with pytest.raises(ValidationError):
        HyperbolicVolParams(nu=0.1, beta=beta)


@pytest.mark.parametrize("level", [0.02, 0.06, 0.3, 1.0, 2.5])
def test_level_derivatives_match_finite_differences(level):
    """Analytic level derivatives agree with central differences."""
    vol = HyperbolicVol(FX)
    h = 1e-5 * level
    value, d1, d2 = vol.level_derivatives(level)
    assert value == pytest.approx(vol(level), rel=1e-14)
    fd = (vol(level + h) - vol(level - h)) / (2 * h)
    assert d1 == pytest.approx(fd, rel=1e-6, abs=1e-9)
    h2 = 1e-3 * level
    second = (vol(level + h2) - 2 * vol(level) + vol(level - h2)) / h2**2
    assert d2 == pytest.approx(second, rel=1e-4, abs=1e-6)


@pytest.mark.parametrize("y", [math.log(0.01), math.log(0.06), 0.0, 0.7])
def test_log_vol_derivs_chain_rule(y):
    """Log-space derivatives agree with differences of lambda(exp(y))."""
    h = 1e-5
    value, d1, d2 = log_vol_derivs(y, LIBOR)

    def f(u):
        return hyperbolic_vol(math.exp(u), LIBOR)

    assert value == pytest.approx(f(y), rel=1e-14)
    assert d1 == pytest.approx((f(y + h) - f(y - h)) / (2 * h), rel=1e-6, abs=1e-9)
    h2 = 1e-3
    second = (f(y + h2) - 2 * f(y) + f(y - h2)) / h2**2
    assert d2 == pytest.approx(second, rel=1e-4, abs=1e-6)


def test_log_coeffs_lognormal_has_zero_derivatives():
    market = QuantoMarket(
        libor_vol=HyperbolicVolParams(nu=0.2, beta=1.0),
        fx_vol=HyperbolicVolParams(nu=0.1, beta=1.0),
    )
    c = log_coeffs(market)
    assert (c.lam, c.sig) == (0.2, 0.1)
    assert c.lam_y == c.lam_yy == c.sig_z == c.sig_zz == 0.0


def test_drifts():
    """alpha = -(lambda^2 / 2 + rho lambda sigma), beta = -sigma^2 / 2."""
    market = QuantoMarket(rho=-0.4)
    lam = hyperbolic_vol(market.L0, market.libor_vol)
    sig = hyperbolic_vol(market.X0, market.fx_vol)
    expected = -(0.5 * lam**2 - 0.4 * lam * sig)
    assert quanto_drift(market, market.y0, market.z0) == pytest.approx(expected)
    assert fx_drift(market, market.z0) == pytest.approx(-0.5 * sig**2)
    assert quanto_drift(market.with_rho(0.0), market.y0, market.z0) == pytest.approx(
        -0.5 * lam**2
    )
