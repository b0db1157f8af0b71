"""Iterated time integral operator omega(l_1, ..., l_n)_0^T."""

import logging
import math
from typing import Callable, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from quanto.errors import ParameterError

logger = logging.getLogger(__name__)

MAX_ARITY = 4
MIN_NODES = 8
DEFAULT_NODES = 32

Integrand = Callable[[np.ndarray], Union[float, np.ndarray]]


class OmegaSpec(BaseModel):
    """Ordered integrands (outermost first) and the horizon T."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    integrands: list[Integrand]
    horizon_T: float = Field(gt=0)

    @field_validator("integrands")
    @classmethod
    def check_arity(cls, v: list[Integrand]) -> list[Integrand]:
        if not 1 <= len(v) <= MAX_ARITY:
            raise ValueError(f"omega takes 1 to {MAX_ARITY} integrands, got {len(v)}")
        return v


def omega_const(coeffs: Sequence[float], T: float) -> float:
    """omega of constant integrands: prod(coeffs) * T^n / n!.

    Args:
        coeffs: One to four constant integrand values.
        T: Horizon in years, > 0.

    Raises:
        ParameterError: On empty or too long coefficient lists, or T <= 0.
    """
    n = len(coeffs)
    if not 1 <= n <= MAX_ARITY:
        raise ParameterError(f"omega takes 1 to {MAX_ARITY} integrands, got {n}")
    if T <= 0:
        raise ParameterError(f"horizon must be > 0, got {T}")
    return math.prod(coeffs) * T**n / math.factorial(n)


def _nested(
    integrands: Sequence[Integrand],
    lower: np.ndarray,
    T: float,
    x: np.ndarray,
    w: np.ndarray,
) -> np.ndarray:
    """omega(l_1, ..., l_n)_t^T for every t in ``lower``.

    The inner layer is evaluated exactly at the outer Gauss-Legendre nodes,
    so no interpolation between levels is needed.
    """
    half = 0.5 * (T - lower)[..., None]
    nodes = lower[..., None] + half * (x + 1.0)
    values = np.broadcast_to(
        np.asarray(integrands[0](nodes), dtype=float), nodes.shape
    )
    if len(integrands) > 1:
        values = values * _nested(integrands[1:], nodes, T, x, w)
    return np.sum(half * values * w, axis=-1)


def omega_quad(spec: OmegaSpec, nodes_per_level: int = DEFAULT_NODES) -> float:
    """Evaluate omega by nested Gauss-Legendre quadrature.

    Integrands must accept numpy arrays of times; constants may be returned
    as scalars.

    Args:
        spec: Integrands and horizon.
        nodes_per_level: Gauss-Legendre nodes on every level, >= 8.

    Returns:
        The iterated integral from 0 to T.
    """
    if nodes_per_level < MIN_NODES:
        raise ParameterError(
            f"nodes_per_level must be >= {MIN_NODES}, got {nodes_per_level}"
        )
    x, w = np.polynomial.legendre.leggauss(nodes_per_level)
    value = _nested(spec.integrands, np.zeros(()), spec.horizon_T, x, w)
    return float(value)
