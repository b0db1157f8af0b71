"""Euler Monte Carlo benchmark for the log LIBOR / log FX quanto system."""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from quanto.errors import BudgetExhaustedError, ParameterError
from quanto.models import McConfig, McEstimate, QuantoInstrument, QuantoMarket
from quanto.volatility import HyperbolicVol

logger = logging.getLogger(__name__)

Z_95 = 1.96
# Smallest run worth reporting when the budget truncates the request.
MIN_PATHS = 1000


def rng_stream(seed: int, stream_id: int) -> np.random.Generator:
    """Counter-based normal stream for one batch.

    Philox keyed by a SeedSequence spawned at ``stream_id``; streams with
    different ids are independent and reproducible across platforms.
    """
    sequence = np.random.SeedSequence(entropy=seed, spawn_key=(stream_id,))
    return np.random.Generator(np.random.Philox(sequence))


def thread_cap() -> int:
    """Worker cap from QUANTO_THREADS, else the CPU count."""
    env = os.environ.get("QUANTO_THREADS")
    if not env:
        return os.cpu_count() or 1
    try:
        cap = int(env)
    except ValueError:
        raise ParameterError(f"QUANTO_THREADS must be an integer, got {env!r}")
    if cap < 1:
        raise ParameterError(f"QUANTO_THREADS must be at least 1, got {cap}")
    return cap


def _worker_count(config: McConfig) -> int:
    cap = thread_cap()
    requested = config.workers or cap
    return max(1, min(requested, cap))


def _simulate_batch(
    instrument: QuantoInstrument,
    market: QuantoMarket,
    n_paths: int,
    n_steps: int,
    antithetic: bool,
    rng: np.random.Generator,
) -> tuple[float, float, int]:
    """Sum, sum of squares and count of payoff samples for one batch.

    With antithetic variates each sample is the average of a path and
    its mirror, so ``n_paths`` paths give ``n_paths // 2`` samples.
    """
    lam_fn = HyperbolicVol(market.libor_vol)
    sig_fn = HyperbolicVol(market.fx_vol)
    rho = market.rho
    rho_bar = math.sqrt(max(1.0 - rho**2, 0.0))
    dt = instrument.expiry_T / n_steps
    sqrt_dt = math.sqrt(dt)

    n_draws = n_paths // 2 if antithetic else n_paths
    width = 2 * n_draws if antithetic else n_draws
    y = np.full(width, market.y0)
    z = np.full(width, market.z0)

    for _ in range(n_steps):
        xi = rng.standard_normal((2, n_draws))
        if antithetic:
            xi = np.concatenate([xi, -xi], axis=1)
        dw_x = sqrt_dt * xi[0]
        dw_l = sqrt_dt * (rho * xi[0] + rho_bar * xi[1])
        lam = lam_fn(np.exp(y))
        sig = sig_fn(np.exp(z))
        y = y - (0.5 * lam**2 + rho * lam * sig) * dt + lam * dw_l
        z = z - 0.5 * sig**2 * dt + sig * dw_x

    level = np.exp(y)
    if instrument.option_type == "call":
        payoff = np.maximum(level - instrument.strike_K, 0.0)
    else:
        payoff = np.maximum(instrument.strike_K - level, 0.0)
    payoff *= instrument.scale
    if antithetic:
        payoff = 0.5 * (payoff[:n_draws] + payoff[n_draws:])
    return float(payoff.sum()), float(np.dot(payoff, payoff)), payoff.size


def _batch_sizes(paths: int, batch_paths: int) -> list[int]:
    full, rest = divmod(paths, batch_paths)
    return [batch_paths] * full + ([rest] if rest else [])


def _run_batches(
    instrument: QuantoInstrument,
    market: QuantoMarket,
    config: McConfig,
    n_steps: int,
    sizes: list[int],
    first_stream: int,
) -> list[tuple[float, float, int]]:
    """Simulate batches in parallel; results come back in batch order."""

    def run(index: int) -> tuple[float, float, int]:
        rng = rng_stream(config.seed, first_stream + index)
        return _simulate_batch(
            instrument, market, sizes[index], n_steps, config.antithetic, rng
        )

    workers = _worker_count(config)
    if workers == 1 or len(sizes) == 1:
        return [run(i) for i in range(len(sizes))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, range(len(sizes))))


def _estimate(
    partials: list[tuple[float, float, int]], antithetic: bool
) -> McEstimate:
    """Pooled estimate; ``paths_used`` counts the paths actually simulated."""
    total = sum(p[0] for p in partials)
    total_sq = sum(p[1] for p in partials)
    count = sum(p[2] for p in partials)
    mean = total / count
    variance = max(total_sq / count - mean**2, 0.0) * count / max(count - 1, 1)
    stderr = math.sqrt(variance / count)
    simulated = 2 * count if antithetic else count
    return McEstimate(
        price=mean, ci_halfwidth=Z_95 * stderr, paths_used=simulated, stderr=stderr
    )


def simulate_quanto(
    instrument: QuantoInstrument,
    market: QuantoMarket,
    config: Optional[McConfig] = None,
) -> McEstimate:
    """Monte Carlo price of the quanto caplet.

    Log-space Euler on (Y, Z) with correlated increments
    dW^X = sqrt(dt) xi1, dW^L = sqrt(dt) (rho xi1 + sqrt(1 - rho^2) xi2).
    Paths are split into fixed-size batches, batch i drawing from stream i,
    so the estimate does not depend on the number of workers. With a CI
    target the path count doubles until the target or the budget is hit.

    Args:
        instrument: Caplet contract.
        market: Model parameters.
        config: Monte Carlo settings, defaults when omitted.

    Returns:
        McEstimate with 95% normal confidence half-width.

    Raises:
        ParameterError: If the budget affords fewer than 1000 paths.
        BudgetExhaustedError: If the requested paths or the CI target do not
            fit the budget. The error carries the largest affordable estimate.
    """
    config = config or McConfig()
    n_steps = max(1, math.ceil(config.steps_per_year * instrument.expiry_T))
    paths = config.paths
    truncated = paths * n_steps > config.budget
    if truncated:
        affordable = int(config.budget // n_steps)
        if affordable < MIN_PATHS:
            raise ParameterError(
                f"{paths} paths x {n_steps} steps exceeds budget "
                f"{config.budget:.3g}, which affords only {affordable} paths"
            )
        logger.warning(
            f"MC at T={instrument.expiry_T}: budget {config.budget:.3g} affords "
            f"{affordable} of {paths} paths"
        )
        paths = affordable

    sizes = _batch_sizes(paths, config.batch_paths)
    partials = _run_batches(instrument, market, config, n_steps, sizes, 0)
    estimate = _estimate(partials, config.antithetic)
    logger.debug(
        f"MC T={instrument.expiry_T} K={instrument.strike_K} rho={market.rho}: "
        f"{estimate.price:.8f} +/- {estimate.ci_halfwidth:.2e} ({paths} paths)"
    )
    if truncated:
        raise BudgetExhaustedError(
            f"requested {config.paths} paths not affordable within budget, "
            f"ran {estimate.paths_used}",
            estimate,
        )

    target = config.target_ci_halfwidth
    while target is not None and estimate.ci_halfwidth > target:
        if 2 * paths * n_steps > config.budget:
            logger.warning(
                f"MC budget exhausted at {paths} paths, "
                f"CI {estimate.ci_halfwidth:.2e} > target {target:.2e}"
            )
            raise BudgetExhaustedError(
                f"CI target {target:.2e} not reached within budget", estimate
            )
        extra = _batch_sizes(paths, config.batch_paths)
        partials += _run_batches(
            instrument, market, config, n_steps, extra, len(partials)
        )
        paths *= 2
        estimate = _estimate(partials, config.antithetic)
        logger.debug(f"MC grown to {paths} paths, CI {estimate.ci_halfwidth:.2e}")

    return estimate
