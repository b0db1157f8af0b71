"""Tests for configuration module."""

import json

import pytest
from pydantic import ValidationError

from quanto.config import QuantoConfig, load_config


def test_load_config_defaults():
    """Test loading default configuration."""
    config = load_config()

    assert config.market.L0 == 0.06
    assert config.market.beta_L == 0.3
    assert config.market.nu_X == 0.15
    assert config.instrument.strike_K is None
    assert config.mc.paths == 2_000_000
    assert config.mc.antithetic is True
    assert config.grid.rhos == [-0.5, -0.2, 0.2, 0.5]
    assert config.logging.level == "INFO"


def test_load_config_from_toml(tmp_path):
    """Test loading configuration from TOML file."""
    toml_content = """
[market]
rho = -0.5
nu_L = 0.1

[instrument]
expiry_T = 6.0
strike_K = 0.07
option_type = "put"

[mc]
paths = 50000
seed = 7

[grid]
maturities = [1.0, 6.0]
rhos = [0.2]

[grid.strikes]
"1.0" = [0.05, 0.06]
"""
    config_path = tmp_path / "config.toml"
    config_path.write_text(toml_content)

    config = load_config(str(config_path))

    assert config.market.rho == -0.5
    assert config.market.nu_L == 0.1
    assert config.instrument.expiry_T == 6.0
    assert config.instrument.option_type == "put"
    assert config.mc.paths == 50000
    assert config.grid.strikes == {"1.0": [0.05, 0.06]}


def test_load_config_from_json(tmp_path):
    config_path = tmp_path / "config.json"
    config_path.write_text(
        json.dumps({"market": {"beta_X": 1.0}, "logging": {"level": "DEBUG"}})
    )

    config = load_config(str(config_path))

    assert config.market.beta_X == 1.0
    assert config.logging.level == "DEBUG"
    assert config.build_market().fx_vol.is_lognormal


def test_load_config_file_not_found():
    """Test that FileNotFoundError is raised for missing config."""
    with pytest.raises(FileNotFoundError):
        load_config("/nonexistent/config.toml")


@pytest.mark.parametrize(
    "section,values",
    [
        ("market", {"beta_L": 1.5}),
        ("market", {"rho": -1.2}),
        ("market", {"L0": 0.0}),
        ("instrument", {"option_type": "digital"}),
        ("mc", {"steps_per_year": 4}),
    ],
)
def test_invalid_values_are_rejected(section, values):
    with pytest.raises(ValidationError):
        QuantoConfig(**{section: values})


def test_build_instrument_defaults_to_atm():
    config = QuantoConfig(market={"L0": 0.05})
    instrument = config.build_instrument()
    assert instrument.strike_K == 0.05
    assert instrument.expiry_T == 1.0
    assert instrument.scale == 1.0


def test_build_mc_carries_settings():
    config = QuantoConfig(mc={"paths": 4000, "seed": 11, "antithetic": False})
    mc = config.build_mc()
    assert mc.paths == 4000
    assert mc.seed == 11
    assert mc.antithetic is False


def test_experiment_grid_converts_strike_keys():
    config = QuantoConfig(
        grid={"maturities": [1.0, 6.0], "strikes": {"6": [0.04, 0.08]}}
    )
    grid = config.experiment_grid()
    assert grid.strikes == {6.0: [0.04, 0.08]}
    assert grid.market == config.build_market()


def test_logging_path_is_normalized():
    config = QuantoConfig(logging={"file": "logs/./run.log"})
    assert config.logging.file == "logs/run.log"
