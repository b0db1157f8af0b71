"""Tests for the Monte Carlo benchmark."""

import math

import numpy as np
import pytest

from quanto.errors import BudgetExhaustedError, ParameterError
from quanto.expansion import price_order3
from quanto.models import McConfig, McEstimate, QuantoInstrument
from quanto.montecarlo import MIN_PATHS, rng_stream, simulate_quanto, thread_cap
from quanto.proxy import proxy_price

FAST = McConfig(paths=100_000, steps_per_year=24, seed=12345, batch_paths=16_384)


def test_rng_stream_is_deterministic():
    a = rng_stream(42, 3).standard_normal(1000)
    b = rng_stream(42, 3).standard_normal(1000)
    np.testing.assert_array_equal(a, b)


def test_rng_stream_moments():
    draws = rng_stream(2024, 0).standard_normal(1_000_000)
    assert abs(draws.mean()) < 4.0 / np.sqrt(1e6)
    assert draws.var() == pytest.approx(1.0, rel=0.01)


def test_rng_streams_are_independent():
    a = rng_stream(2024, 0).standard_normal(1_000_000)
    b = rng_stream(2024, 1).standard_normal(1_000_000)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.005


def test_lognormal_mc_matches_proxy(lognormal_market):
    """Log-Euler is exact for constant vols, so only sampling noise remains."""
    instrument = QuantoInstrument(expiry_T=1.0, strike_K=0.06)
    estimate = simulate_quanto(instrument, lognormal_market, FAST)
    exact = proxy_price(instrument, lognormal_market)
    assert abs(estimate.price - exact) < 4 * estimate.stderr


def test_lognormal_mc_put(lognormal_market):
    put = QuantoInstrument(expiry_T=2.0, strike_K=0.07, option_type="put")
    estimate = simulate_quanto(put, lognormal_market, FAST)
    exact = proxy_price(put, lognormal_market)
    assert abs(estimate.price - exact) < 4 * estimate.stderr


def test_zero_correlation_is_martingale(base_market):
    """With rho = 0 the log-Euler step preserves E[exp(Y)] = L0."""
    instrument = QuantoInstrument(expiry_T=5.0, strike_K=1e-8)
    estimate = simulate_quanto(instrument, base_market, FAST)
    assert abs(estimate.price + 1e-8 - base_market.L0) < 4 * estimate.stderr


def test_far_out_of_the_money_is_zero(base_market):
    instrument = QuantoInstrument(expiry_T=1.0, strike_K=10.0)
    config = McConfig(paths=4000, steps_per_year=12)
    estimate = simulate_quanto(instrument, base_market.with_rho(0.3), config)
    assert estimate.price == 0.0
    assert estimate.ci_halfwidth == 0.0


def test_estimate_reports_normal_ci(base_market, atm_caplet):
    estimate = simulate_quanto(atm_caplet, base_market, FAST)
    assert isinstance(estimate, McEstimate)
    assert estimate.ci_halfwidth == pytest.approx(1.96 * estimate.stderr)
    assert estimate.paths_used == FAST.paths


def test_fixed_seed_is_bitwise_reproducible(base_market, atm_caplet):
    market = base_market.with_rho(-0.3)
    first = simulate_quanto(atm_caplet, market, FAST)
    second = simulate_quanto(atm_caplet, market, FAST)
    assert first == second


def test_result_does_not_depend_on_worker_count(base_market, atm_caplet, monkeypatch):
    monkeypatch.setenv("QUANTO_THREADS", "4")
    market = base_market.with_rho(0.5)
    single_cfg = FAST.model_copy(update={"workers": 1})
    pooled_cfg = FAST.model_copy(update={"workers": 4})
    single = simulate_quanto(atm_caplet, market, single_cfg)
    pooled = simulate_quanto(atm_caplet, market, pooled_cfg)
    assert single.price == pooled.price
    assert single.stderr == pooled.stderr


def test_different_seeds_differ(base_market, atm_caplet):
    other = FAST.model_copy(update={"seed": 99})
    assert simulate_quanto(atm_caplet, base_market, FAST).price != simulate_quanto(
        atm_caplet, base_market, other
    ).price


def test_antithetic_reduces_stderr(base_market, atm_caplet):
    market = base_market.with_rho(-0.5)
    plain = simulate_quanto(
        atm_caplet, market, FAST.model_copy(update={"antithetic": False})
    )
    anti = simulate_quanto(atm_caplet, market, FAST)
    assert anti.stderr < plain.stderr


def test_unit_correlation_uses_single_driver(base_market, atm_caplet):
    estimate = simulate_quanto(atm_caplet, base_market.with_rho(1.0), FAST)
    assert np.isfinite(estimate.price) and estimate.price > 0


def test_agrees_with_third_order_expansion(base_market, atm_caplet):
    """Short-dated ATM benchmark within CI plus a basis point of the expansion."""
    market = base_market.with_rho(-0.5)
    config = McConfig(paths=400_000, steps_per_year=50, seed=7)
    estimate = simulate_quanto(atm_caplet, market, config)
    expansion = price_order3(atm_caplet, market).price
    assert abs(estimate.price - expansion) < estimate.ci_halfwidth + 1e-4


def test_budget_exceeded_up_front(base_market, atm_caplet):
    config = McConfig(paths=10_000, steps_per_year=250, budget=1e5)
    with pytest.raises(ParameterError):
        simulate_quanto(atm_caplet, base_market, config)


def test_budget_exhausted_carries_estimate(base_market, atm_caplet):
    config = McConfig(
        paths=2000,
        steps_per_year=12,
        target_ci_halfwidth=1e-9,
        budget=100_000,
        batch_paths=1024,
    )
    with pytest.raises(BudgetExhaustedError) as info:
        simulate_quanto(atm_caplet, base_market, config)
    estimate = info.value.estimate
    assert isinstance(estimate, McEstimate)
    assert estimate.paths_used == 8000


def test_ci_target_grows_paths(base_market, atm_caplet):
    base = McConfig(paths=2000, steps_per_year=12, batch_paths=1024)
    first = simulate_quanto(atm_caplet, base_market, base)
    goal = first.ci_halfwidth / 1.5
    target = base.model_copy(update={"target_ci_halfwidth": goal})
    grown = simulate_quanto(atm_caplet, base_market, target)
    assert grown.paths_used >= 4000
    assert grown.paths_used % 2000 == 0
    assert grown.ci_halfwidth <= goal


def test_truncated_run_reports_affordable_estimate(base_market, atm_caplet):
    config = McConfig(paths=4096, steps_per_year=12, budget=30_000, batch_paths=1024)
    with pytest.raises(BudgetExhaustedError) as info:
        simulate_quanto(atm_caplet, base_market, config)
    estimate = info.value.estimate
    assert estimate.paths_used == 2500
    assert estimate.ci_halfwidth > 0


def test_default_budget_covers_longest_maturity():
    config = McConfig()
    steps = math.ceil(config.steps_per_year * 15.0)
    assert config.paths * steps <= config.budget
    assert config.budget // steps >= MIN_PATHS


@pytest.mark.parametrize("antithetic,expected", [(True, 1000), (False, 1001)])
def test_odd_path_count_reports_simulated_paths(
    base_market, atm_caplet, antithetic, expected
):
    config = McConfig(paths=1001, steps_per_year=12, antithetic=antithetic)
    estimate = simulate_quanto(atm_caplet, base_market, config)
    assert estimate.paths_used == expected


def test_halving_the_step_stays_within_noise(base_market, atm_caplet):
    market = base_market.with_rho(-0.5)
    coarse = simulate_quanto(
        atm_caplet, market, McConfig(paths=200_000, steps_per_year=50, seed=3)
    )
    fine = simulate_quanto(
        atm_caplet, market, McConfig(paths=200_000, steps_per_year=100, seed=3)
    )
    assert abs(fine.price - coarse.price) < coarse.ci_halfwidth + fine.ci_halfwidth


@pytest.mark.parametrize("value", ["many", "0", "-2"])
def test_bad_thread_setting_is_a_parameter_error(
    base_market, atm_caplet, monkeypatch, value
):
    monkeypatch.setenv("QUANTO_THREADS", value)
    with pytest.raises(ParameterError, match="QUANTO_THREADS"):
        thread_cap()
    config = McConfig(paths=2000, steps_per_year=12)
    with pytest.raises(ParameterError):
        simulate_quanto(atm_caplet, base_market, config)


def test_thread_cap_reads_environment(monkeypatch):
    monkeypatch.setenv("QUANTO_THREADS", "3")
    assert thread_cap() == 3
    monkeypatch.delenv("QUANTO_THREADS")
    assert thread_cap() >= 1
