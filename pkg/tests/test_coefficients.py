"""Tests for the weight tables and gamma assemblies."""

import numpy as np
import pytest

from quanto.coefficients import (
    A_TABLE,
    B_TABLE,
    C_TABLE,
    FACTORS,
    GAMMA_TERMS,
    MISSING_ROWS,
    assemble_gamma,
    build_coefficients,
    evaluate_weights,
    factor_values,
    unused_rows,
)
from quanto.errors import ParameterError
from quanto.models import HyperbolicVolParams, QuantoMarket
from quanto.volatility import log_coeffs

UNIT_FACTORS = {key: 1.0 for key in FACTORS}


def test_table_sizes():
    """Two-, three- and four-layer rows; C13 does not exist."""
    assert len(A_TABLE) == 11
    assert len(B_TABLE) == 42
    assert len(C_TABLE) == 86
    assert "C13" in MISSING_ROWS and 13 not in C_TABLE
    assert all(len(row) == 2 for row in A_TABLE.values())
    assert all(len(row) == 3 for row in B_TABLE.values())
    assert all(len(row) == 4 for row in C_TABLE.values())


def test_rows_use_known_factors():
    for table in (A_TABLE, B_TABLE, C_TABLE):
        for row in table.values():
            assert set(row) <= set(FACTORS)


def test_every_row_carries_a_derivative_factor():
    """No weight survives in the log-normal model."""
    flat = {"lam2", "lam_sig", "sig2"}
    for table in (A_TABLE, B_TABLE, C_TABLE):
        for row in table.values():
            assert not set(row) <= flat


def test_only_duplicate_rows_are_unused():
    """C72 and C76 repeat C64 and C69 and are not referenced."""
    assert unused_rows() == {"C72", "C76"}
    assert C_TABLE[72] == C_TABLE[64]
    assert C_TABLE[76] == C_TABLE[69]


def test_unit_factor_weights():
    """All factors 1 at T = 1 give 1/2, 1/6 and 1/24."""
    weights = evaluate_weights(UNIT_FACTORS, 1.0)
    assert all(w == pytest.approx(0.5) for w in weights["A"].values())
    assert all(w == pytest.approx(1.0 / 6.0) for w in weights["B"].values())
    assert all(w == pytest.approx(1.0 / 24.0) for w in weights["C"].values())


def test_unit_factor_gamma_entries():
    gamma = assemble_gamma(evaluate_weights(UNIT_FACTORS, 1.0))
    assert gamma[0][5] == pytest.approx(-0.375)
    assert gamma[0][6] == pytest.approx(0.125)
    assert gamma[4][4] == pytest.approx(0.125)
    assert gamma[0][0] == 0.0


def test_gamma_terms_cover_expected_orders():
    """Greek orders per rho power: 1-6, 1-5, 1-5, 1-4, 2-4."""
    expected = {
        0: range(1, 7),
        1: range(1, 6),
        2: range(1, 6),
        3: range(1, 5),
        4: range(2, 5),
    }
    for power, orders in expected.items():
        for order in orders:
            assert (power, order) in GAMMA_TERMS
    assert len(GAMMA_TERMS) == sum(len(o) for o in expected.values())


def test_const_weights_match_quadrature_on_random_factors():
    """Every table row agrees with nested quadrature."""
    rng = np.random.default_rng(11)
    for _ in range(50):
        factors = {key: float(rng.uniform(-1.0, 1.0)) for key in FACTORS}
        T = float(rng.uniform(0.5, 15.0))
        const = evaluate_weights(factors, T, method="const")
        quad = evaluate_weights(factors, T, method="quad", nodes_per_level=8)
        for letter in ("A", "B", "C"):
            for index, value in const[letter].items():
                assert quad[letter][index] == pytest.approx(value, rel=1e-10), (
                    f"{letter}{index}"
                )


def test_time_dependent_factor():
    """A1 with lam2 = t and lam_lamy = 1 equals omega(t, 1) = 1/6 on [0, 1]."""
    factors = dict(UNIT_FACTORS, lam2=lambda t: t)
    weights = evaluate_weights(factors, 1.0, method="quad")
    assert weights["A"][1] == pytest.approx(1.0 / 6.0, rel=1e-12)


def test_evaluate_weights_rejects_missing_factor():
    factors = dict(UNIT_FACTORS)
    del factors["sig_sigz"]
    with pytest.raises(ParameterError):
        evaluate_weights(factors, 1.0)


def test_evaluate_weights_rejects_unknown_method():
    with pytest.raises(ParameterError):
        evaluate_weights(UNIT_FACTORS, 1.0, method="simpson")


def test_lognormal_market_has_zero_gamma():
    market = QuantoMarket(
        rho=0.3,
        libor_vol=HyperbolicVolParams(nu=0.2, beta=1.0),
        fx_vol=HyperbolicVolParams(nu=0.1, beta=1.0),
    )
    coefficients = build_coefficients(market, 5.0)
    assert all(v == 0.0 for row in coefficients.gamma for v in row)


def test_build_coefficients_lookup(base_market):
    coefficients = build_coefficients(base_market, 6.0)
    weights = evaluate_weights(factor_values(log_coeffs(base_market)), 6.0)
    assert coefficients.weight("B28") == weights["B"][28]
    assert coefficients.weight("A1") == weights["A"][1]
    assert len(coefficients.gamma0) == 6
    assert len(coefficients.gamma_rho) == 4


def test_weights_scale_with_horizon(base_market):
    """n-layer weights scale as T^n for frozen coefficients."""
    factors = factor_values(log_coeffs(base_market))
    w1 = evaluate_weights(factors, 1.0)
    w2 = evaluate_weights(factors, 2.0)
    assert w2["A"][4] == pytest.approx(4.0 * w1["A"][4])
    assert w2["B"][10] == pytest.approx(8.0 * w1["B"][10])
    assert w2["C"][33] == pytest.approx(16.0 * w1["C"][33])
