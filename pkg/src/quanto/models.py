"""Data models for Quanto-LV."""

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


class QuantoInstrument(BaseModel):
    """European quanto caplet (or floorlet) on a foreign LIBOR rate."""

    model_config = ConfigDict(frozen=True)

    expiry_T: float = Field(gt=0)
    strike_K: float = Field(gt=0)
    accrual_delta: float = Field(default=1.0, gt=0)
    discount_B: float = Field(default=1.0, gt=0, le=1.5)
    option_type: Literal["call", "put"] = "call"

    @property
    def k(self) -> float:
        """Log strike."""
        return math.log(self.strike_K)

    @property
    def scale(self) -> float:
        """Payment scaling delta * B(0, T_{i+1})."""
        return self.accrual_delta * self.discount_B


class HyperbolicVolParams(BaseModel):
    """Parameters of the hyperbolic local volatility function."""

    model_config = ConfigDict(frozen=True)

    nu: float = Field(gt=0)
    beta: float = Field(gt=0, le=1)

    @property
    def is_lognormal(self) -> bool:
        return self.beta == 1.0


class QuantoMarket(BaseModel):
    """Initial forward levels, local vol parameters and LIBOR/FX correlation."""

    model_config = ConfigDict(frozen=True)

    L0: float = Field(default=0.06, gt=0)
    X0: float = Field(default=1.0, gt=0)
    rho: float = Field(default=0.0, ge=-1, le=1)
    libor_vol: HyperbolicVolParams = Field(
        default_factory=lambda: HyperbolicVolParams(nu=0.08, beta=0.3)
    )
    fx_vol: HyperbolicVolParams = Field(
        default_factory=lambda: HyperbolicVolParams(nu=0.15, beta=0.5)
    )

    @property
    def y0(self) -> float:
        return math.log(self.L0)

    @property
    def z0(self) -> float:
        return math.log(self.X0)

    def with_rho(self, rho: float) -> "QuantoMarket":
        """Same market with a different correlation."""
        return QuantoMarket(
            L0=self.L0,
            X0=self.X0,
            rho=rho,
            libor_vol=self.libor_vol,
            fx_vol=self.fx_vol,
        )


class LogCoeffBundle(BaseModel):
    """Log-space vol coefficients frozen at (y0, z0)."""

    model_config = ConfigDict(frozen=True)

    lam: float
    lam_y: float
    lam_yy: float
    sig: float
    sig_z: float
    sig_zz: float


class ProxyMoments(BaseModel):
    """Moments of the Gaussian proxy Y^0_T."""

    model_config = ConfigDict(frozen=True)

    Lambda_T: float = Field(ge=0)
    Sigma_T: float
    m0_T: float
    V0_T: float = Field(ge=0)
    horizon_T: float = Field(gt=0)

    @property
    def lambda_bar(self) -> float:
        """Root-mean-square LIBOR vol sqrt(Lambda(T) / T)."""
        return math.sqrt(self.Lambda_T / self.horizon_T)

    @property
    def std(self) -> float:
        return math.sqrt(self.Lambda_T)


class ErrorScale(BaseModel):
    """Magnitude of the expansion error bound with the generic constant set to 1."""

    order: Literal[2, 3]
    scale: float = Field(ge=0)
    payoff_norm: float = Field(ge=0)
    M0: float
    M1: float
    lambda_inf: float
    rho: float
    T: float


class PriceResult(BaseModel):
    """Price returned by any pricing method."""

    price: float
    method: Literal["proxy", "order2", "order3", "market", "mc"]
    error_scale: Optional[ErrorScale] = None
    ci_halfwidth: Optional[float] = None


class ExpansionCoefficients(BaseModel):
    """A/B/C weights and the gamma assemblies of the third order expansion.

    ``gamma[i][j]`` multiplies ``rho**i * g_j``; row 0 holds gamma_0.
    """

    A: dict[int, float]
    B: dict[int, float]
    C: dict[int, float]
    gamma: tuple[tuple[float, ...], ...]

    @property
    def gamma0(self) -> tuple[float, ...]:
        return self.gamma[0][1:]

    @property
    def gamma_rho(self) -> tuple[tuple[float, ...], ...]:
        return self.gamma[1:]

    def weight(self, name: str) -> float:
        """Look up a weight by table name such as ``"B28"``."""
        table = {"A": self.A, "B": self.B, "C": self.C}[name[0]]
        return table[int(name[1:])]


class McConfig(BaseModel):
    """Monte Carlo benchmark settings."""

    model_config = ConfigDict(frozen=True)

    paths: int = Field(default=2_000_000, ge=1000)
    steps_per_year: int = Field(default=250, ge=12)
    seed: int = Field(default=20240601, ge=0, lt=2**64)
    target_ci_halfwidth: Optional[float] = Field(default=None, gt=0)
    antithetic: bool = True
    batch_paths: int = Field(default=65_536, ge=256)
    budget: float = Field(default=1.5e10, gt=0)
    workers: Optional[int] = Field(default=None, ge=1)


class McEstimate(BaseModel):
    """Monte Carlo price with its 95% normal confidence half-width."""

    price: float
    ci_halfwidth: float = Field(ge=0)
    paths_used: int
    stderr: float = Field(ge=0)

    @model_validator(mode="after")
    def check_halfwidth(self) -> "McEstimate":
        if not math.isclose(self.ci_halfwidth, 1.96 * self.stderr, rel_tol=1e-12):
            raise ValueError("ci_halfwidth must equal 1.96 * stderr")
        return self


class ImpliedVolPoint(BaseModel):
    """Black implied volatility of a model vanilla price."""

    asset: Literal["LIBOR", "FX"]
    expiry_T: float
    strike: float
    vol: float = Field(gt=1e-7, lt=5.0 + 1e-12)
    source: Literal["expansion_rho0", "monte_carlo"]


def _default_maturities() -> list[float]:
    return [1.0, 6.0, 10.0, 15.0]


def _default_rhos() -> list[float]:
    return [-0.5, -0.2, 0.2, 0.5]


class ExperimentGrid(BaseModel):
    """Maturities, strikes and correlations of the accuracy experiment."""

    maturities: list[float] = Field(default_factory=_default_maturities)
    strikes: dict[float, list[float]] = Field(default_factory=dict)
    rhos: list[float] = Field(default_factory=_default_rhos)
    market: QuantoMarket = Field(default_factory=QuantoMarket)

    @field_validator("strikes")
    @classmethod
    def check_strikes(cls, v: dict[float, list[float]]) -> dict[float, list[float]]:
        """Strikes must be positive and strictly increasing per maturity."""
        for maturity, strikes in v.items():
            if any(k <= 0 for k in strikes):
                raise ValueError(f"non-positive strike for maturity {maturity}")
            if any(b <= a for a, b in zip(strikes, strikes[1:])):
                raise ValueError(f"strikes not increasing for maturity {maturity}")
        return v

    @field_validator("maturities")
    @classmethod
    def check_maturities(cls, v: list[float]) -> list[float]:
        if not v or any(t <= 0 for t in v):
            raise ValueError("maturities must be a non-empty list of positive years")
        return v

    @field_validator("rhos")
    @classmethod
    def check_rhos(cls, v: list[float]) -> list[float]:
        if any(abs(r) > 1 for r in v):
            raise ValueError("correlations must lie in [-1, 1]")
        return v


class DetailRow(BaseModel):
    """Prices of one (T, K, rho) grid point across all methods."""

    T: float
    K: float
    rho: float
    proxy: float
    order2: float
    order3: float
    market: float
    mc: float
    ci: float
    partial: bool = False

    @property
    def abs_2nd(self) -> float:
        return abs(self.order2 - self.mc)

    @property
    def abs_3rd(self) -> float:
        return abs(self.order3 - self.mc)

    @property
    def abs_mkt(self) -> float:
        return abs(self.market - self.mc)


class DiscrepancyStats(BaseModel):
    """Average and maximum absolute discrepancy to the benchmark for one rho."""

    rho: float
    avg_abs_2nd: float = Field(ge=0)
    max_abs_2nd: float = Field(ge=0)
    avg_abs_3rd: float = Field(ge=0)
    max_abs_3rd: float = Field(ge=0)
    avg_abs_mkt: float = Field(ge=0)
    max_abs_mkt: float = Field(ge=0)
    points: int = 0
    partial_benchmark: bool = False

    @model_validator(mode="after")
    def check_avg_below_max(self) -> "DiscrepancyStats":
        for method in ("2nd", "3rd", "mkt"):
            avg = getattr(self, f"avg_abs_{method}")
            peak = getattr(self, f"max_abs_{method}")
            if avg > peak * (1 + 1e-12):
                raise ValueError(f"average exceeds maximum for {method}")
        return self
