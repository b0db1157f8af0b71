"""Weight tables A/B/C and gamma assemblies of the third order expansion.

Every weight is an iterated omega integral of products of the frozen
coefficients. Rows are stored as data, each a tuple of factor keys
(outermost integrand first), so the tables can be audited row by row.

Factor keys:
    lam2       lambda^2              lam_sig    lambda * sigma
    sig2       sigma^2               lam_lamy   lambda * lambda_y
    lam_lamyy  lambda * lambda_yy    lamy2      lambda_y^2
    lamy_sig   lambda_y * sigma      lamy_sigz  lambda_y * sigma_z
    lam_sigz   lambda * sigma_z      lam_sigzz  lambda * sigma_zz
    lamyy_sig  lambda_yy * sigma     sig_sigz   sigma * sigma_z
"""

import logging
from typing import Callable, Literal, Mapping, Union

import numpy as np

from quanto.errors import ParameterError
from quanto.models import ExpansionCoefficients, LogCoeffBundle, QuantoMarket
from quanto.omega import DEFAULT_NODES, OmegaSpec, omega_const, omega_quad
from quanto.volatility import log_coeffs

logger = logging.getLogger(__name__)

FactorValue = Union[float, Callable[[np.ndarray], Union[float, np.ndarray]]]

FACTORS: dict[str, Callable[[LogCoeffBundle], float]] = {
    "lam2": lambda c: c.lam**2,
    "lam_sig": lambda c: c.lam * c.sig,
    "sig2": lambda c: c.sig**2,
    "lam_lamy": lambda c: c.lam * c.lam_y,
    "lam_lamyy": lambda c: c.lam * c.lam_yy,
    "lamy2": lambda c: c.lam_y**2,
    "lamy_sig": lambda c: c.lam_y * c.sig,
    "lamy_sigz": lambda c: c.lam_y * c.sig_z,
    "lam_sigz": lambda c: c.lam * c.sig_z,
    "lam_sigzz": lambda c: c.lam * c.sig_zz,
    "lamyy_sig": lambda c: c.lam_yy * c.sig,
    "sig_sigz": lambda c: c.sig * c.sig_z,
}

A_TABLE: dict[int, tuple[str, ...]] = {
    1: ("lam2", "lam_lamy"),
    2: ("lam2", "lam_lamyy"),
    3: ("lam2", "lamy2"),
    4: ("lam_sig", "lamy_sig"),
    5: ("lam_sig", "lamy_sigz"),
    6: ("lam_sig", "lam_sigz"),
    7: ("lam_sig", "lam_lamy"),
    8: ("lam2", "lamy_sig"),
    9: ("sig2", "lam_sigz"),
    10: ("lam2", "lamyy_sig"),
    11: ("sig2", "lam_sigzz"),
}

B_TABLE: dict[int, tuple[str, ...]] = {
    1: ("lam2", "lam_lamy", "lam_lamy"),
    2: ("lam2", "lam2", "lam_lamyy"),
    3: ("lam2", "lam2", "lamy2"),
    4: ("lam_sig", "lamy_sig", "lamy_sig"),
    5: ("lam_sig", "lam_sigz", "lamy_sig"),
    6: ("lam_sig", "lam_sigz", "lam_sigz"),
    7: ("lam_sig", "lam_sig", "lamy_sigz"),
    8: ("lam_sig", "lam_sig", "lamyy_sig"),
    9: ("lam_sig", "lam_sig", "lam_sigzz"),
    10: ("lam2", "lamy_sig", "lamy_sig"),
    11: ("lam_sig", "lam_lamy", "lamy_sig"),
    12: ("lam_sig", "lamy_sig", "lam_lamy"),
    13: ("sig2", "lam_sigz", "lamy_sig"),
    14: ("lam_sig", "sig2", "lamy_sigz"),
    15: ("sig2", "lam_sig", "lamy_sigz"),
    16: ("lam2", "lam_sig", "lamyy_sig"),
    17: ("lam_sig", "lam2", "lamyy_sig"),
    18: ("lam_sig", "lam_sig", "lam_lamyy"),
    19: ("lam_sig", "lam_sig", "lamy2"),
    20: ("lam_sig", "lam_sigz", "lam_lamy"),
    21: ("sig2", "lam_sigz", "lam_sigz"),
    22: ("lam_sig", "lam2", "lamy_sigz"),
    23: ("lam2", "lam_sig", "lamy_sigz"),
    24: ("lam_sig", "sig2", "lam_sigzz"),
    25: ("sig2", "lam_sig", "lam_sigzz"),
    26: ("lam2", "lam_lamy", "lamy_sig"),
    27: ("lam2", "lamy_sig", "lam_lamy"),
    28: ("lam_sig", "lam_lamy", "lam_lamy"),
    29: ("lam2", "lam2", "lamyy_sig"),
    30: ("lam2", "lam_sig", "lam_lamyy"),
    31: ("lam_sig", "lam2", "lam_lamyy"),
    32: ("sig2", "lam_sigz", "lam_lamy"),
    33: ("lam2", "sig2", "lamy_sigz"),
    34: ("sig2", "lam2", "lamy_sigz"),
    35: ("lam2", "lam_sig", "lamy2"),
    36: ("sig2", "sig_sigz", "lam_sigz"),
    37: ("sig2", "sig2", "lam_sigzz"),
    38: ("lam_sig", "lam_lamy", "lam_sigz"),
    39: ("lam2", "lamy_sig", "lam_sigz"),
    40: ("lam_sig", "lamy_sig", "lam_sigz"),
    41: ("lam_sig", "sig_sigz", "lam_sigz"),
    42: ("lam_sig", "lam2", "lamy2"),
}

# No row 13 exists; no assembly references it.
C_TABLE: dict[int, tuple[str, ...]] = {
    1: ("lam_sig", "lam_sig", "lam_sigz", "lam_sigz"),
    2: ("lam_sig", "lam_sigz", "lam_sig", "lam_sigz"),
    3: ("lam_sig", "lam_sig", "lamy_sig", "lam_sigz"),
    4: ("lam_sig", "lamy_sig", "lam_sig", "lam_sigz"),
    5: ("lam2", "lam_lamy", "sig2", "lam_sigz"),
    6: ("lam2", "sig2", "lam_lamy", "lam_sigz"),
    7: ("sig2", "lam2", "lam_lamy", "lam_sigz"),
    8: ("lam2", "lamy_sig", "sig2", "lam_sigz"),
    9: ("lam_sig", "lam_lamy", "sig2", "lam_sigz"),
    10: ("sig2", "lam_sigz", "sig2", "lam_sigz"),
    11: ("sig2", "sig2", "lam_sigz", "lam_sigz"),
    12: ("lam2", "sig2", "lamy_sig", "lam_sigz"),
    14: ("sig2", "lam2", "lamy_sig", "lam_sigz"),
    15: ("lam_sig", "sig2", "lam_lamy", "lam_sigz"),
    16: ("sig2", "lam_sig", "lam_lamy", "lam_sigz"),
    17: ("lam2", "lam_lamy", "lam_sig", "lam_sigz"),
    18: ("lam_sig", "lam2", "lam_lamy", "lam_sigz"),
    19: ("lam2", "lam_sig", "lam_lamy", "lam_sigz"),
    20: ("lam_sig", "lamy_sig", "sig2", "lam_sigz"),
    21: ("lam_sig", "sig2", "lamy_sig", "lam_sigz"),
    22: ("sig2", "lam_sig", "lamy_sig", "lam_sigz"),
    23: ("lam_sig", "lam_sigz", "sig2", "lam_sigz"),
    24: ("lam_sig", "sig2", "lam_sigz", "lam_sigz"),
    25: ("sig2", "lam_sig", "lam_sigz", "lam_sigz"),
    26: ("lam_sig", "lam2", "lamy_sig", "lam_sigz"),
    27: ("lam_sig", "lam_sig", "lam_lamy", "lam_sigz"),
    28: ("lam2", "lam_sig", "lamy_sig", "lam_sigz"),
    29: ("sig2", "lam_sigz", "lam_sig", "lam_sigz"),
    30: ("lam2", "lamy_sig", "lam_sig", "lam_sigz"),
    31: ("lam_sig", "lam_lamy", "lam_sig", "lam_sigz"),
    32: ("lam2", "lam_lamy", "lam2", "lam_lamy"),
    33: ("lam2", "lam2", "lam_lamy", "lam_lamy"),
    34: ("lam_sig", "lamy_sig", "lam_sig", "lam_lamy"),
    35: ("lam_sig", "lam_sig", "lamy_sig", "lam_lamy"),
    36: ("lam_sig", "lam_sigz", "lam_sig", "lam_lamy"),
    37: ("lam_sig", "lam_sig", "lam_sigz", "lam_lamy"),
    38: ("lam2", "lamy_sig", "lam_sig", "lam_lamy"),
    39: ("lam_sig", "lam_lamy", "lam_sig", "lam_lamy"),
    40: ("lam_sig", "lamy_sig", "lam2", "lam_lamy"),
    41: ("sig2", "lam_sigz", "lam_sig", "lam_lamy"),
    42: ("lam2", "lam_sig", "lamy_sig", "lam_lamy"),
    43: ("lam_sig", "lam2", "lamy_sig", "lam_lamy"),
    44: ("lam_sig", "lam_sig", "lam_lamy", "lam_lamy"),
    45: ("lam_sig", "sig2", "lam_sigz", "lam_lamy"),
    46: ("sig2", "lam_sig", "lam_sigz", "lam_lamy"),
    47: ("lam_sig", "lam_sigz", "lam2", "lam_lamy"),
    48: ("lam_sig", "lam2", "lam_sigz", "lam_lamy"),
    49: ("lam2", "lam_sig", "lam_sigz", "lam_lamy"),
    50: ("lam2", "lam_lamy", "lam_sig", "lam_lamy"),
    51: ("lam2", "lamy_sig", "lam2", "lam_lamy"),
    52: ("lam_sig", "lam_lamy", "lam2", "lam_lamy"),
    53: ("sig2", "lam_sigz", "lam2", "lam_lamy"),
    54: ("lam2", "lam2", "lamy_sig", "lam_lamy"),
    55: ("lam2", "lam_sig", "lam_lamy", "lam_lamy"),
    56: ("lam_sig", "lam2", "lam_lamy", "lam_lamy"),
    57: ("lam2", "sig2", "lam_sigz", "lam_lamy"),
    58: ("sig2", "lam2", "lam_sigz", "lam_lamy"),
    59: ("lam_sig", "lamy_sig", "lam_sig", "lamy_sig"),
    60: ("lam_sig", "lam_sig", "lamy_sig", "lamy_sig"),
    61: ("lam_sig", "lam_sigz", "lam_sig", "lamy_sig"),
    62: ("lam_sig", "lam_sig", "lam_sigz", "lamy_sig"),
    63: ("lam2", "lamy_sig", "lam_sig", "lamy_sig"),
    64: ("lam_sig", "lam_lamy", "lam_sig", "lamy_sig"),
    65: ("lam_sig", "lamy_sig", "lam2", "lamy_sig"),
    66: ("sig2", "lam_sigz", "lam_sig", "lamy_sig"),
    67: ("lam2", "lam_sig", "lamy_sig", "lamy_sig"),
    68: ("lam_sig", "lam2", "lamy_sig", "lamy_sig"),
    69: ("lam_sig", "lam_sig", "lam_lamy", "lamy_sig"),
    70: ("lam_sig", "sig2", "lam_sigz", "lamy_sig"),
    71: ("sig2", "lam_sig", "lam_sigz", "lamy_sig"),
    72: ("lam_sig", "lam_lamy", "lam_sig", "lamy_sig"),
    73: ("lam_sig", "lam_sigz", "lam2", "lamy_sig"),
    74: ("lam_sig", "lam2", "lam_sigz", "lamy_sig"),
    75: ("lam2", "lam_sig", "lam_sigz", "lamy_sig"),
    76: ("lam_sig", "lam_sig", "lam_lamy", "lamy_sig"),
    77: ("lam2", "lam_lamy", "lam2", "lamy_sig"),
    78: ("lam2", "lam2", "lam_lamy", "lamy_sig"),
    79: ("lam2", "lam_lamy", "lam_sig", "lamy_sig"),
    80: ("lam2", "lamy_sig", "lam2", "lamy_sig"),
    81: ("lam_sig", "lam_lamy", "lam2", "lamy_sig"),
    82: ("sig2", "lam_sigz", "lam2", "lamy_sig"),
    83: ("lam2", "lam2", "lamy_sig", "lamy_sig"),
    84: ("lam2", "lam_sig", "lam_lamy", "lamy_sig"),
    85: ("lam_sig", "lam2", "lam_lamy", "lamy_sig"),
    86: ("lam2", "sig2", "lam_sigz", "lamy_sig"),
    87: ("sig2", "lam2", "lam_sigz", "lamy_sig"),
}

TABLES: dict[str, dict[int, tuple[str, ...]]] = {
    "A": A_TABLE,
    "B": B_TABLE,
    "C": C_TABLE,
}

MISSING_ROWS = {"C13"}


def _combo(*groups: tuple[float, str]) -> dict[str, float]:
    """Linear combination from (coefficient, space separated names) groups."""
    terms: dict[str, float] = {}
    for coef, names in groups:
        for name in names.split():
            terms[name] = terms.get(name, 0.0) + coef
    return terms


# (power of rho, Greek order) -> weights and their coefficients
GAMMA_TERMS: dict[tuple[int, int], dict[str, float]] = {
    (0, 1): _combo((0.5, "A1"), (-0.5, "A2 A3"), (-0.5, "B1"), (-0.25, "B2 B3")),
    (0, 2): _combo(
        (-1.5, "A1"), (0.5, "A2 A3"), (3.5, "B1"), (1.25, "B3 B2"),
        (0.5, "C33"), (0.25, "C32"),
    ),
    (0, 3): _combo(
        (1.0, "A1"), (-6.0, "B1"), (-2.0, "B3 B2"), (-1.5, "C32"), (-3.0, "C33")
    ),
    (0, 4): _combo(
        (3.0, "B1"), (1.0, "B2 B3"), (3.25, "C32"), (6.5, "C33")
    ),
    (0, 5): _combo((-3.0, "C32"), (-6.0, "C33")),
    (0, 6): _combo((1.0, "C32"), (2.0, "C33")),
    (1, 1): _combo(
        (1.0, "A7"), (0.5, "A8 A9"), (-0.5, "A10 A11"), (-1.0, "B28"),
        (-0.5, "B26 B27 B32 B36 B35 B31 B42"),
        (-0.25, "B33 B34 B29 B37"),
    ),
    (1, 2): _combo(
        (-1.0, "A7 A8"), (1.0, "B29"), (2.5, "B27"), (3.0, "B28 B26"),
        (0.5, "B32 B33 B34"), (1.5, "B31 B30 B42 B35"),
        (1.0, "C56 C55"), (0.5, "C50 C52 C54 C78"),
        (0.25, "C5 C6 C7 C51 C53 C57 C58 C77"),
    ),
    (1, 3): _combo(
        (-3.0, "B26"), (-2.0, "B27 B28"), (-1.0, "B29 B30 B31 B35 B42"),
        (-0.75, "C5 C6 C7 C53 C57 C58"), (-4.0, "C55 C56"),
        (-2.0, "C50 C52"), (-2.5, "C54 C78"), (-1.25, "C51 C77"),
    ),
    (1, 4): _combo(
        (0.5, "C5 C6 C7 C57 C58 C53"), (2.0, "C51 C77"), (4.0, "C54 C78"),
        (5.0, "C55 C56"), (2.5, "C50 C52"),
    ),
    (1, 5): _combo((-1.0, "C50 C51 C52 C77"), (-2.0, "C54 C55 C56 C78")),
    (2, 1): _combo(
        (1.0, "A4"), (-1.0, "A5"), (-0.5, "B10 B13 B14 B15 B16 B17"),
        (-1.0, "B11 B12 B18 B19"),
    ),
    (2, 2): _combo(
        (-1.0, "A6"), (2.0, "B10 B20 B11"),
        (1.0, "B12 B41 B16 B17 B18 B19 B38"), (1.5, "B21"),
        (0.5, "B22 B23 B24 B25 B39"),
        (1.0, "C39 C42 C43 C84 C85"), (2.0, "C44"),
        (0.25, "C8 C10 C12 C14 C80 C82 C86 C87"),
        (0.5, "C9 C11 C15 C16 C38 C40 C41 C45 C46 C79 C81 C83"),
    ),
    (2, 3): _combo(
        (-1.0, "B23 B22 B38 B39"), (-2.0, "B20"), (-1.0, "C80"),
        (-2.0, "C83 C39"), (-3.0, "C42 C43 C84 C85"), (-4.0, "C44"),
        (-0.5, "C8 C9 C17 C15 C16 C12 C14 C18 C19"),
        (-1.5, "C38 C40 C79 C81"),
        (-0.5, "C41 C45 C46 C47 C48 C49 C86 C87 C82"),
    ),
    (2, 4): _combo(
        (1.0, "C38 C39 C40 C79 C80 C81"),
        (2.0, "C44 C42 C43 C85 C83 C84"),
        (1.5, "C17 C19 C18 C47 C48 C49"),
    ),
    (2, 5): _combo((-1.0, "C17 C19 C18 C49 C48 C47")),
    (3, 1): _combo((-1.0, "B4 B8")),
    (3, 2): _combo(
        (2.0, "B5 B7 B40"), (1.0, "C64 C67 C68 C34"), (2.0, "C69 C35"),
        (0.5, "C20 C21 C22 C63 C65 C66 C70 C71"),
    ),
    (3, 3): _combo(
        (-1.0, "B6 B9"), (-1.0, "C31 C24 C25 C34 C63 C64 C65 C36"),
        (-2.0, "C27 C35 C69 C67 C68 C37"),
        (-0.5, "C26 C23 C28 C29 C30 C73 C74 C75"),
    ),
    (3, 4): _combo(
        (1.0, "C28 C26 C30 C31 C75 C74 C73 C36"), (2.0, "C27 C37")
    ),
    (4, 2): _combo((1.0, "C59"), (2.0, "C60")),
    (4, 3): _combo((-1.0, "C4 C61"), (-2.0, "C62 C3")),
    (4, 4): _combo((2.0, "C1"), (1.0, "C2")),
}

MAX_RHO_POWER = 4
MAX_GREEK = 6


def unused_rows() -> set[str]:
    """Table rows that no gamma assembly references."""
    used = {name for terms in GAMMA_TERMS.values() for name in terms}
    rows = {f"{t}{i}" for t, table in TABLES.items() for i in table}
    return rows - used


def evaluate_weights(
    factors: Mapping[str, FactorValue],
    T: float,
    method: Literal["const", "quad"] = "const",
    nodes_per_level: int = DEFAULT_NODES,
) -> dict[str, dict[int, float]]:
    """Evaluate every A/B/C row.

    Args:
        factors: Value of each factor key; constants for ``"const"``,
            constants or vectorised time functions for ``"quad"``.
        T: Horizon in years.
        method: ``"const"`` uses the closed form, ``"quad"`` nested quadrature.
        nodes_per_level: Quadrature nodes for ``"quad"``.

    Returns:
        Mapping table letter -> row index -> weight.
    """
    missing = set(FACTORS) - set(factors)
    if missing:
        raise ParameterError(f"missing factor values: {sorted(missing)}")

    weights: dict[str, dict[int, float]] = {}
    for letter, table in TABLES.items():
        weights[letter] = {}
        for index, row in table.items():
            if method == "const":
                value = omega_const([float(factors[key]) for key in row], T)
            elif method == "quad":
                integrands = [_as_integrand(factors[key]) for key in row]
                value = omega_quad(
                    OmegaSpec(integrands=integrands, horizon_T=T), nodes_per_level
                )
            else:
                raise ParameterError(f"unknown omega method: {method}")
            weights[letter][index] = value
    return weights


def _as_integrand(value: FactorValue) -> Callable:
    if callable(value):
        return value
    constant = float(value)
    return lambda t: constant


def assemble_gamma(
    weights: Mapping[str, Mapping[int, float]],
) -> tuple[tuple[float, ...], ...]:
    """Combine weights into gamma[i][j] multiplying rho^i * g_j."""
    gamma = np.zeros((MAX_RHO_POWER + 1, MAX_GREEK + 1))
    for (power, order), terms in GAMMA_TERMS.items():
        gamma[power, order] = sum(
            coef * weights[name[0]][int(name[1:])] for name, coef in terms.items()
        )
    return tuple(tuple(float(v) for v in row) for row in gamma)


def factor_values(coeffs: LogCoeffBundle) -> dict[str, float]:
    """Factor key -> frozen value."""
    return {key: fn(coeffs) for key, fn in FACTORS.items()}


def build_coefficients(market: QuantoMarket, T: float) -> ExpansionCoefficients:
    """All A/B/C weights and gamma assemblies for a market and horizon.

    Coefficients are frozen at (y0, z0) and integrated with the constant
    closed form.
    """
    weights = evaluate_weights(factor_values(log_coeffs(market)), T)
    coefficients = ExpansionCoefficients(
        A=weights["A"],
        B=weights["B"],
        C=weights["C"],
        gamma=assemble_gamma(weights),
    )
    logger.debug(f"Expansion coefficients T={T}: gamma0={coefficients.gamma0}")
    return coefficients
