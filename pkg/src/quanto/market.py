"""Practitioner quanto formula, Black inversion and model implied vols."""

import logging
import math
from functools import lru_cache
from typing import Literal, Optional

from scipy.optimize import brentq
from scipy.stats import norm

from quanto.errors import ConvergenceError, NoSolutionError
from quanto.expansion import price_order3
from quanto.models import (
    ImpliedVolPoint,
    McConfig,
    PriceResult,
    QuantoInstrument,
    QuantoMarket,
)
from quanto.montecarlo import simulate_quanto

logger = logging.getLogger(__name__)

VOL_LOWER = 1e-6
VOL_UPPER = 5.0
PRICE_TOL = 1e-12
VOL_TOL = 1e-13
MAX_ITER = 200
NEWTON_ITER = 50

Asset = Literal["LIBOR", "FX"]
VolSource = Literal["expansion_rho0", "monte_carlo"]


def black_call(forward: float, strike: float, vol: float, T: float) -> float:
    """Undiscounted Black call price."""
    sd = vol * math.sqrt(T)
    if sd == 0.0:
        return max(forward - strike, 0.0)
    d1 = (math.log(forward / strike) + 0.5 * sd**2) / sd
    return forward * norm.cdf(d1) - strike * norm.cdf(d1 - sd)


def _black_vega(forward: float, strike: float, vol: float, T: float) -> float:
    sd = vol * math.sqrt(T)
    d1 = (math.log(forward / strike) + 0.5 * sd**2) / sd
    return forward * norm.pdf(d1) * math.sqrt(T)


def black_implied_vol(
    price: float, forward: float, strike: float, T: float, scale: float = 1.0
) -> float:
    """Black volatility reproducing ``price / scale``.

    Safeguarded Newton on [1e-6, 5]: a step leaving the current bracket is
    replaced by bisection. If Newton stalls the bracket is handed to brentq.

    Args:
        price: Discounted option price.
        forward: Forward level.
        strike: Strike level.
        T: Expiry in years.
        scale: Accrual times discount factor.

    Returns:
        The implied volatility. A price at or below the lower-bracket Black
        price returns the lower bracket with a warning.

    Raises:
        NoSolutionError: If the price is outside (intrinsic, forward).
        ConvergenceError: If no root is found within 200 iterations.
    """
    target = price / scale
    intrinsic = max(forward - strike, 0.0)
    if not intrinsic < target < forward:
        raise NoSolutionError(
            f"price {target:.6g} outside arbitrage band "
            f"({intrinsic:.6g}, {forward:.6g})"
        )

    def objective(vol: float) -> float:
        return black_call(forward, strike, vol, T) - target

    lo, hi = VOL_LOWER, VOL_UPPER
    f_lo = objective(lo)
    if f_lo >= 0.0:
        logger.warning(
            f"Implied vol at lower bracket for F={forward} K={strike} T={T}"
        )
        return VOL_LOWER
    if objective(hi) <= 0.0:
        raise NoSolutionError(f"price {target:.6g} above Black price at vol {hi}")

    vol = min(max(math.sqrt(2.0 * abs(math.log(forward / strike)) / T), 0.2), 1.0)
    for iteration in range(NEWTON_ITER):
        diff = objective(vol)
        if diff == 0.0:
            return vol
        if diff < 0.0:
            lo = vol
        else:
            hi = vol
        vega = _black_vega(forward, strike, vol, T)
        step = vol - diff / vega if vega > 0.0 else lo - 1.0
        if abs(diff) <= PRICE_TOL and abs(step - vol) <= VOL_TOL:
            logger.debug(f"Newton converged in {iteration} iterations: vol={step}")
            return step
        vol = step if lo < step < hi else 0.5 * (lo + hi)

    try:
        vol = brentq(
            objective, lo, hi, xtol=1e-15, maxiter=MAX_ITER - NEWTON_ITER
        )
    except (RuntimeError, ValueError) as e:
        raise ConvergenceError(f"implied vol did not converge: {e}") from e
    return float(vol)


def _vanilla_market(asset: Asset, market: QuantoMarket) -> QuantoMarket:
    """Single-asset market whose LIBOR leg is the requested asset at rho = 0."""
    if asset == "LIBOR":
        return market.with_rho(0.0)
    return QuantoMarket(
        L0=market.X0,
        X0=market.X0,
        rho=0.0,
        libor_vol=market.fx_vol,
        fx_vol=market.fx_vol,
    )


@lru_cache(maxsize=4096)
def _cached_implied_vol(
    asset: Asset,
    T: float,
    strike: Optional[float],
    vanilla: QuantoMarket,
    source: VolSource,
    mc_config: Optional[McConfig],
) -> ImpliedVolPoint:
    forward = vanilla.L0
    level = forward if strike is None else strike
    if vanilla.libor_vol.is_lognormal:
        return ImpliedVolPoint(
            asset=asset,
            expiry_T=T,
            strike=level,
            vol=vanilla.libor_vol.nu,
            source=source,
        )

    instrument = QuantoInstrument(expiry_T=T, strike_K=level)
    if source == "expansion_rho0":
        price = price_order3(instrument, vanilla).price
    else:
        price = simulate_quanto(instrument, vanilla, mc_config).price
    vol = black_implied_vol(price, forward, level, T)
    logger.debug(f"Implied vol {asset} T={T} K={level}: {vol:.6f} ({source})")
    return ImpliedVolPoint(
        asset=asset, expiry_T=T, strike=level, vol=vol, source=source
    )


def model_implied_vol(
    asset: Asset,
    T: float,
    strike: Optional[float],
    market: QuantoMarket,
    source: VolSource = "expansion_rho0",
    mc_config: Optional[McConfig] = None,
) -> ImpliedVolPoint:
    """Black implied vol of the model's non-quanto vanilla on one asset.

    LIBOR vanillas use the expansion with rho = 0; FX vanillas reuse the
    same engine with the FX level and vol in the LIBOR slot. ``strike=None``
    means ATM (strike equal to the forward). Results are cached per
    vanilla market, so they are shared across correlations.
    """
    vanilla = _vanilla_market(asset, market)
    return _cached_implied_vol(asset, T, strike, vanilla, source, mc_config)


def market_price(
    instrument: QuantoInstrument,
    market: QuantoMarket,
    source: VolSource = "expansion_rho0",
    mc_config: Optional[McConfig] = None,
) -> PriceResult:
    """Black-type quanto price with drift q = rho * lambda_atm * sigma_atm.

    Exact by construction at rho = 0.
    """
    T = instrument.expiry_T
    K = instrument.strike_K
    vol_k = model_implied_vol("LIBOR", T, K, market, source, mc_config).vol
    vol_atm = model_implied_vol("LIBOR", T, None, market, source, mc_config).vol
    fx_atm = model_implied_vol("FX", T, None, market, source, mc_config).vol

    q = market.rho * vol_atm * fx_atm
    forward = math.exp(market.y0 - q * T)
    call = black_call(forward, K, vol_k, T)
    value = call if instrument.option_type == "call" else call - (forward - K)
    return PriceResult(price=instrument.scale * value, method="market")
