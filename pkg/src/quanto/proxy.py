"""Gaussian proxy: moments, closed-form quanto caplet price and Greeks."""

import logging
import math

import numpy as np
from numpy.polynomial.hermite_e import hermeval
from scipy.stats import norm

from quanto.errors import DegenerateVarianceError, ParameterError
from quanto.models import ProxyMoments, QuantoInstrument, QuantoMarket
from quanto.volatility import HyperbolicVol

logger = logging.getLogger(__name__)

MAX_GREEK_ORDER = 8


def hermite(j: int, x: float) -> float:
    """Probabilists' Hermite polynomial H_j(x), j <= 8."""
    if j < 0 or j > MAX_GREEK_ORDER:
        raise ParameterError(f"Hermite order must be in [0, {MAX_GREEK_ORDER}]")
    coef = np.zeros(j + 1)
    coef[j] = 1.0
    return float(hermeval(x, coef))


def proxy_moments(instrument: QuantoInstrument, market: QuantoMarket) -> ProxyMoments:
    """Moments of the proxy with coefficients frozen at (y0, z0)."""
    T = instrument.expiry_T
    lam = HyperbolicVol(market.libor_vol)(market.L0)
    sig = HyperbolicVol(market.fx_vol)(market.X0)
    Lambda_T = lam**2 * T
    Sigma_T = market.rho * lam * sig * T
    return ProxyMoments(
        Lambda_T=Lambda_T,
        Sigma_T=Sigma_T,
        m0_T=market.y0 - 0.5 * Lambda_T - Sigma_T,
        V0_T=Lambda_T,
        horizon_T=T,
    )


def _call_expectation(y: float, k: float, moments: ProxyMoments) -> float:
    """E[(exp(Y0_T) - K)+] for the proxy started at log level y."""
    forward = math.exp(y - moments.Sigma_T)
    if moments.Lambda_T == 0.0:
        return max(forward - math.exp(k), 0.0)
    sd = moments.std
    d1 = (y - k - moments.Sigma_T + 0.5 * moments.Lambda_T) / sd
    d2 = d1 - sd
    return forward * norm.cdf(d1) - math.exp(k) * norm.cdf(d2)


def proxy_expectation(
    instrument: QuantoInstrument, market: QuantoMarket, moments: ProxyMoments
) -> float:
    """Undiscounted proxy expectation E[h(Y0_T)] for call or put."""
    call = _call_expectation(market.y0, instrument.k, moments)
    if instrument.option_type == "call":
        return call
    forward = math.exp(market.y0 - moments.Sigma_T)
    return call - (forward - instrument.strike_K)


def proxy_price(instrument: QuantoInstrument, market: QuantoMarket) -> float:
    """Closed-form quanto caplet price under the log-normal proxy.

    Args:
        instrument: Caplet contract.
        market: Model parameters; vols are frozen at the initial levels.

    Returns:
        delta * B * E[h(Y0_T)]; intrinsic value when Lambda(T) = 0.
    """
    moments = proxy_moments(instrument, market)
    if moments.Lambda_T < 0:
        raise RuntimeError(f"negative proxy variance {moments.Lambda_T}")
    return instrument.scale * proxy_expectation(instrument, market, moments)


def _greeks_from_moments(
    max_order: int,
    instrument: QuantoInstrument,
    market: QuantoMarket,
    moments: ProxyMoments,
) -> np.ndarray:
    if max_order < 0 or max_order > MAX_GREEK_ORDER:
        raise ParameterError(
            f"Greek order {max_order} unsupported (max {MAX_GREEK_ORDER})"
        )
    if moments.Lambda_T <= 0.0:
        raise DegenerateVarianceError("Greeks undefined for Lambda(T) = 0")

    y0 = market.y0
    sd = moments.std
    forward = math.exp(y0 - moments.Sigma_T)
    d1 = (y0 - instrument.k - moments.Sigma_T + 0.5 * moments.Lambda_T) / sd
    cdf, pdf = norm.cdf(d1), norm.pdf(d1)
    put_shift = forward if instrument.option_type == "put" else 0.0

    out = np.empty(max_order + 1)
    out[0] = proxy_expectation(instrument, market, moments)
    for n in range(1, max_order + 1):
        series = sum(
            math.comb(n - 1, j) * (-1) ** (j - 1) * hermite(j - 1, d1) / sd**j
            for j in range(1, n)
        )
        out[n] = forward * (cdf + pdf * series) - put_shift
    return out


def greeks(
    instrument: QuantoInstrument, market: QuantoMarket, max_order: int = 6
) -> np.ndarray:
    """Greeks g_0 .. g_max_order of the proxy expectation.

    g_n is the n-th derivative of E[h(Y0_T + eps)] at eps = 0 with the
    proxy moments held fixed.
    """
    moments = proxy_moments(instrument, market)
    return _greeks_from_moments(max_order, instrument, market, moments)


def greek_g(n: int, instrument: QuantoInstrument, market: QuantoMarket) -> float:
    """Single Greek g_n, 0 <= n <= 8."""
    if n < 0 or n > MAX_GREEK_ORDER:
        raise ParameterError(f"Greek order {n} unsupported (max {MAX_GREEK_ORDER})")
    return float(greeks(instrument, market, max_order=n)[n])


def payoff_gradient_norm(instrument: QuantoInstrument, market: QuantoMarket) -> float:
    """L2 norm of h'(Y0_T) under the proxy.

    h'(y) = +-exp(y) on the exercise region, so the second moment is
    exp(2m + 2V) times a normal probability.
    """
    moments = proxy_moments(instrument, market)
    m, V = moments.m0_T, moments.V0_T
    if V == 0.0:
        in_money = (m > instrument.k) == (instrument.option_type == "call")
        return math.exp(m) if in_money else 0.0
    d = (m + 2.0 * V - instrument.k) / math.sqrt(V)
    if instrument.option_type == "put":
        d = -d
    return math.sqrt(math.exp(2.0 * m + 2.0 * V) * norm.cdf(d))
