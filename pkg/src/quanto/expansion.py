"""Second and third order expansion prices around the Gaussian proxy."""

import logging
from typing import Literal, Optional, Sequence

import numpy as np

from quanto.coefficients import build_coefficients, evaluate_weights, factor_values
from quanto.errors import CorrelationError
from quanto.models import ErrorScale, PriceResult, QuantoInstrument, QuantoMarket
from quanto.omega import DEFAULT_NODES, OmegaSpec, omega_quad
from quanto.proxy import greeks, payoff_gradient_norm
from quanto.volatility import log_coeffs, log_vol_derivs

logger = logging.getLogger(__name__)

ERROR_GRID_BOUNDS = (0.1, 10.0)
ERROR_GRID_POINTS = 401


def expansion_series(
    gamma: Sequence[Sequence[float]], g: Sequence[float], rho: float
) -> float:
    """Correction sum_i rho^i sum_j gamma[i][j] g_j for fixed Greeks."""
    total = 0.0
    for power, row in enumerate(gamma):
        total += rho**power * sum(c * g[j] for j, c in enumerate(row) if c != 0.0)
    return total


def order2_gamma(market: QuantoMarket, T: float) -> tuple[tuple[float, ...], ...]:
    """rho-grouped second order weights, gamma[i][j] for rho^i * g_j."""
    weights = evaluate_weights(factor_values(log_coeffs(market)), T)
    A = weights["A"]
    return (
        (0.0, 0.5 * A[1], -1.5 * A[1], A[1]),
        (0.0, A[7] + 0.5 * (A[8] + A[9]), -(A[7] + A[8]), 0.0),
        (0.0, A[4], -A[6], 0.0),
    )


def _error_scale_or_none(
    order: Literal[2, 3], instrument: QuantoInstrument, market: QuantoMarket
) -> Optional[ErrorScale]:
    if abs(market.rho) >= 1.0:
        logger.warning(f"Error scale undefined for |rho| = {abs(market.rho)}")
        return None
    norm = payoff_gradient_norm(instrument, market)
    return error_scale(order, market, instrument.expiry_T, norm)


def price_order2(instrument: QuantoInstrument, market: QuantoMarket) -> PriceResult:
    """Second order expansion price.

    Proxy price plus a correction quadratic in rho built from six two-fold
    omega weights and the Greeks g_1..g_3.

    Raises:
        DegenerateVarianceError: If Lambda(T) = 0.
    """
    g = greeks(instrument, market, max_order=3)
    gamma = order2_gamma(market, instrument.expiry_T)
    correction = expansion_series(gamma, g, market.rho)
    price = instrument.scale * (g[0] + correction)
    logger.debug(
        f"order2 T={instrument.expiry_T} K={instrument.strike_K} rho={market.rho}: "
        f"proxy={g[0]:.8f} correction={correction:.3e}"
    )
    return PriceResult(
        price=price,
        method="order2",
        error_scale=_error_scale_or_none(2, instrument, market),
    )


def price_order3(instrument: QuantoInstrument, market: QuantoMarket) -> PriceResult:
    """Third order expansion price.

    Proxy price plus sum_j gamma_0j g_j + sum_i gamma_i rho^i with all
    A/B/C weights frozen at (y0, z0).

    Raises:
        DegenerateVarianceError: If Lambda(T) = 0.
    """
    g = greeks(instrument, market, max_order=6)
    coefficients = build_coefficients(market, instrument.expiry_T)
    correction = expansion_series(coefficients.gamma, g, market.rho)
    price = instrument.scale * (g[0] + correction)
    logger.debug(
        f"order3 T={instrument.expiry_T} K={instrument.strike_K} rho={market.rho}: "
        f"proxy={g[0]:.8f} correction={correction:.3e}"
    )
    return PriceResult(
        price=price,
        method="order3",
        error_scale=_error_scale_or_none(3, instrument, market),
    )


def order2_correction_from_drift(
    instrument: QuantoInstrument,
    market: QuantoMarket,
    nodes_per_level: int = DEFAULT_NODES,
) -> float:
    """Undiscounted second order correction written with the drifts.

    Evaluates E[h'(Y0_T) Y1_T] from omega(alpha, alpha_y), omega(beta, alpha_z),
    omega(lambda^2, alpha_y), omega(lambda sigma, alpha_z) and
    omega(alpha, lambda_y lambda) before they are expanded in rho.
    """
    c = log_coeffs(market)
    rho = market.rho
    alpha = -(0.5 * c.lam**2 + rho * c.lam * c.sig)
    alpha_y = -(c.lam * c.lam_y + rho * c.lam_y * c.sig)
    alpha_z = -rho * c.lam * c.sig_z
    beta = -0.5 * c.sig**2
    T = instrument.expiry_T

    def omega(*values: float) -> float:
        integrands = [lambda t, v=v: v for v in values]
        spec = OmegaSpec(integrands=integrands, horizon_T=T)
        return omega_quad(spec, nodes_per_level)

    g = greeks(instrument, market, max_order=3)
    g1_weight = omega(alpha, alpha_y) + omega(beta, alpha_z)
    g2_weight = (
        omega(c.lam**2, alpha_y)
        + rho * omega(c.sig * c.lam, alpha_z)
        + omega(alpha, c.lam_y * c.lam)
    )
    g3_weight = omega(c.lam**2, c.lam_y * c.lam)
    return g1_weight * g[1] + g2_weight * g[2] + g3_weight * g[3]


def _model_bounds(
    market: QuantoMarket, bounds: tuple[float, float], points: int
) -> tuple[float, float, float]:
    """M0, M1 and lambda_inf over level grids around L0 and X0."""
    grid = np.geomspace(bounds[0], bounds[1], points)
    libor = log_vol_derivs(np.log(market.L0 * grid), market.libor_vol)
    fx = log_vol_derivs(np.log(market.X0 * grid), market.fx_vol)
    lam, lam_y, lam_yy = (np.abs(np.asarray(v)) for v in libor)
    sig, sig_z, sig_zz = (np.abs(np.asarray(v)) for v in fx)
    M0 = float(max(lam.max(), sig.max()))
    M1 = float(max(lam_y.max(), lam_yy.max(), sig_z.max(), sig_zz.max()))
    lambda_inf = float(lam.min())
    return M0, M1, lambda_inf


def error_scale(
    order: Literal[2, 3],
    market: QuantoMarket,
    T: float,
    payoff_norm: float,
    grid_bounds: tuple[float, float] = ERROR_GRID_BOUNDS,
    grid_points: int = ERROR_GRID_POINTS,
) -> ErrorScale:
    """Size of the expansion error bound with the generic constant set to 1.

    A scaling diagnostic, not a certified bound.

    Args:
        order: 2 or 3.
        market: Model; vol bounds are sampled on [lo * L0, hi * L0] and
            [lo * X0, hi * X0].
        T: Expiry in years.
        payoff_norm: L2 norm of the payoff derivative under the proxy.
        grid_bounds: Relative level grid bounds (lo, hi).
        grid_points: Number of grid levels.

    Raises:
        CorrelationError: If |rho| >= 1.
    """
    if abs(market.rho) >= 1.0:
        raise CorrelationError(f"error scale requires |rho| < 1, got {market.rho}")
    M0, M1, lambda_inf = _model_bounds(market, grid_bounds, grid_points)
    ellipticity = lambda_inf * (1.0 - market.rho**2)
    if order == 2:
        scale = payoff_norm * M0**3 * M1 * T**1.5 / ellipticity
    elif order == 3:
        scale = payoff_norm * M0**5 * M1 * T**2 / ellipticity**2
    else:
        raise ValueError(f"error scale order must be 2 or 3, got {order}")
    return ErrorScale(
        order=order,
        scale=scale,
        payoff_norm=payoff_norm,
        M0=M0,
        M1=M1,
        lambda_inf=lambda_inf,
        rho=market.rho,
        T=T,
    )

