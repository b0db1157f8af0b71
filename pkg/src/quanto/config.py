"""Configuration handling for Quanto-LV."""

import json
import sys
from pathlib import Path
from typing import Literal, Optional

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from pydantic import BaseModel, Field, field_validator

from quanto.models import (
    ExperimentGrid,
    HyperbolicVolParams,
    McConfig,
    QuantoInstrument,
    QuantoMarket,
)


class MarketConfig(BaseModel):
    """Initial levels, local vol parameters and correlation."""

    L0: float = Field(default=0.06, gt=0)
    X0: float = Field(default=1.0, gt=0)
    rho: float = Field(default=0.0, ge=-1, le=1)
    nu_L: float = Field(default=0.08, gt=0)
    beta_L: float = Field(default=0.3, gt=0, le=1)
    nu_X: float = Field(default=0.15, gt=0)
    beta_X: float = Field(default=0.5, gt=0, le=1)

    def to_market(self) -> QuantoMarket:
        return QuantoMarket(
            L0=self.L0,
            X0=self.X0,
            rho=self.rho,
            libor_vol=HyperbolicVolParams(nu=self.nu_L, beta=self.beta_L),
            fx_vol=HyperbolicVolParams(nu=self.nu_X, beta=self.beta_X),
        )


class InstrumentConfig(BaseModel):
    """Caplet contract; a missing strike means ATM (K = L0)."""

    expiry_T: float = Field(default=1.0, gt=0)
    strike_K: Optional[float] = Field(default=None, gt=0)
    accrual_delta: float = Field(default=1.0, gt=0)
    discount_B: float = Field(default=1.0, gt=0, le=1.5)
    option_type: Literal["call", "put"] = "call"


class McSettings(BaseModel):
    """Monte Carlo section, mirrors McConfig."""

    paths: int = Field(default=2_000_000, ge=1000)
    steps_per_year: int = Field(default=250, ge=12)
    seed: int = Field(default=20240601, ge=0, lt=2**64)
    target_ci_halfwidth: Optional[float] = Field(default=None, gt=0)
    antithetic: bool = True
    budget: float = Field(default=1.5e10, gt=0)


class GridConfig(BaseModel):
    """Experiment grid; strikes keyed by maturity as strings in TOML."""

    maturities: list[float] = Field(default_factory=lambda: [1.0, 6.0, 10.0, 15.0])
    strikes: dict[str, list[float]] = Field(default_factory=dict)
    rhos: list[float] = Field(default_factory=lambda: [-0.5, -0.2, 0.2, 0.5])


class LoggingConfig(BaseModel):
    """Logging configuration."""

    level: str = "INFO"
    file: str = "logs/quanto.log"

    @field_validator("file")
    @classmethod
    def normalize_path(cls, v: str) -> str:
        """Normalize Windows/Unix paths."""
        return str(Path(v).as_posix())


class QuantoConfig(BaseModel):
    """Main Quanto-LV configuration."""

    market: MarketConfig = Field(default_factory=MarketConfig)
    instrument: InstrumentConfig = Field(default_factory=InstrumentConfig)
    mc: McSettings = Field(default_factory=McSettings)
    grid: GridConfig = Field(default_factory=GridConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)

    def build_market(self) -> QuantoMarket:
        return self.market.to_market()

    def build_instrument(self) -> QuantoInstrument:
        strike = self.instrument.strike_K or self.market.L0
        return QuantoInstrument(
            expiry_T=self.instrument.expiry_T,
            strike_K=strike,
            accrual_delta=self.instrument.accrual_delta,
            discount_B=self.instrument.discount_B,
            option_type=self.instrument.option_type,
        )

    def build_mc(self) -> McConfig:
        return McConfig(**self.mc.model_dump())

    def experiment_grid(self) -> ExperimentGrid:
        """Grid with strike keys converted to maturities in years."""
        strikes = {float(t): ks for t, ks in self.grid.strikes.items()}
        return ExperimentGrid(
            maturities=self.grid.maturities,
            strikes=strikes,
            rhos=self.grid.rhos,
            market=self.build_market(),
        )


def load_config(path: Optional[str] = None) -> QuantoConfig:
    """Load configuration from a TOML or JSON file, or use defaults.

    Args:
        path: Optional path to a ``.toml`` or ``.json`` config file.

    Returns:
        QuantoConfig with loaded or default settings.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        pydantic.ValidationError: If a value fails validation.
    """
    if not path:
        return QuantoConfig()

    config_path = Path(path)
    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {path}")

    content = config_path.read_text(encoding="utf-8")
    if config_path.suffix.lower() == ".json":
        config_dict = json.loads(content)
    else:
        config_dict = tomllib.loads(content)
    return QuantoConfig(**config_dict)
