"""Local volatility functions, log-space derivatives and the quanto drift."""

import logging
from typing import Protocol, Union

import numpy as np

from quanto.errors import ParameterError
from quanto.models import HyperbolicVolParams, LogCoeffBundle, QuantoMarket

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]


class LocalVolatility(Protocol):
    """Time-homogeneous local vol given as a function of the level."""

    def __call__(self, level: ArrayLike) -> ArrayLike: ...

    def level_derivatives(
        self, level: ArrayLike
    ) -> tuple[ArrayLike, ArrayLike, ArrayLike]: ...


def _as_output(value: np.ndarray) -> ArrayLike:
    return float(value) if np.ndim(value) == 0 else value


class HyperbolicVol:
    """Hyperbolic local volatility nu * f_beta(level).

    Behaves like CEV with skew ``beta`` but keeps zero unattainable.
    ``beta = 1`` is the log-normal limit with constant vol ``nu``.
    Calls are unchecked so the Monte Carlo hot loop can use them;
    ``hyperbolic_vol`` is the validated entry point.
    """

    def __init__(self, params: HyperbolicVolParams):
        self.nu = params.nu
        self.beta = params.beta
        self._a = (1.0 - self.beta + self.beta**2) / self.beta
        self._c = (self.beta - 1.0) / self.beta

    def __call__(self, level: ArrayLike) -> ArrayLike:
        x = np.asarray(level, dtype=float)
        if self.beta == 1.0:
            return _as_output(np.full_like(x, self.nu))
        b = self.beta
        root = np.sqrt(x**2 + b**2 * (1.0 - x) ** 2)
        return _as_output(self.nu * (self._a + self._c * (root - b) / x))

    def level_derivatives(
        self, level: ArrayLike
    ) -> tuple[ArrayLike, ArrayLike, ArrayLike]:
        """Value, first and second derivative in the level."""
        x = np.asarray(level, dtype=float)
        if self.beta == 1.0:
            zero = np.zeros_like(x)
            return (
                _as_output(np.full_like(x, self.nu)),
                _as_output(zero),
                _as_output(zero.copy()),
            )
        b = self.beta
        s = np.sqrt(x**2 + b**2 * (1.0 - x) ** 2)
        s1 = (x * (1.0 + b**2) - b**2) / s
        s2 = (1.0 + b**2 - s1**2) / s
        u = s - b
        g = u / x
        g1 = s1 / x - u / x**2
        g2 = s2 / x - 2.0 * s1 / x**2 + 2.0 * u / x**3
        scale = self.nu * self._c
        return (
            _as_output(self.nu * self._a + scale * g),
            _as_output(scale * g1),
            _as_output(scale * g2),
        )


def _check_level(level: ArrayLike) -> None:
    x = np.asarray(level, dtype=float)
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ParameterError(f"level must be finite and > 0, got {level}")


def hyperbolic_vol(level: ArrayLike, params: HyperbolicVolParams) -> ArrayLike:
    """Evaluate the hyperbolic local volatility at a positive level.

    Args:
        level: Rate or FX level (scalar or array), strictly positive.
        params: Volatility level ``nu`` and skew ``beta``.

    Returns:
        Local volatility, same shape as ``level``.

    Raises:
        ParameterError: If any level is not strictly positive.
    """
    _check_level(level)
    return HyperbolicVol(params)(level)


def log_vol_derivs(
    log_level: ArrayLike, params: HyperbolicVolParams
) -> tuple[ArrayLike, ArrayLike, ArrayLike]:
    """Log-space vol and its first two derivatives by the chain rule.

    With L = exp(y): d/dy = f'(L) L and d2/dy2 = f''(L) L^2 + f'(L) L.

    Args:
        log_level: Log level y (scalar or array), finite.
        params: Hyperbolic vol parameters.

    Returns:
        Tuple (value, d1, d2) in log space.
    """
    y = np.asarray(log_level, dtype=float)
    if not np.all(np.isfinite(y)):
        raise ParameterError(f"log level must be finite, got {log_level}")
    level = np.exp(y)
    value, f1, f2 = HyperbolicVol(params).level_derivatives(level)
    if params.is_lognormal:
        return value, f1, f2
    d1 = f1 * level
    d2 = f2 * level**2 + f1 * level
    return _as_output(np.asarray(value)), _as_output(d1), _as_output(d2)


def quanto_drift(market: QuantoMarket, y: ArrayLike, z: ArrayLike) -> ArrayLike:
    """LIBOR log drift alpha(y, z) = -(lambda^2 / 2 + rho * lambda * sigma)."""
    lam = HyperbolicVol(market.libor_vol)(np.exp(y))
    sig = HyperbolicVol(market.fx_vol)(np.exp(z))
    return -(0.5 * lam**2 + market.rho * lam * sig)


def fx_drift(market: QuantoMarket, z: ArrayLike) -> ArrayLike:
    """FX log drift beta(z) = -sigma^2 / 2."""
    sig = HyperbolicVol(market.fx_vol)(np.exp(z))
    return -0.5 * sig**2


def log_coeffs(market: QuantoMarket) -> LogCoeffBundle:
    """Freeze lambda, sigma and their log-space derivatives at (y0, z0)."""
    lam, lam_y, lam_yy = log_vol_derivs(market.y0, market.libor_vol)
    sig, sig_z, sig_zz = log_vol_derivs(market.z0, market.fx_vol)
    bundle = LogCoeffBundle(
        lam=lam, lam_y=lam_y, lam_yy=lam_yy, sig=sig, sig_z=sig_z, sig_zz=sig_zz
    )
    logger.debug(f"Frozen coefficients at (y0, z0): {bundle}")
    return bundle
