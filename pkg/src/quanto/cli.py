"""Command-line interface for Quanto-LV."""

import logging
import sys
from pathlib import Path
from typing import Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

from quanto.config import QuantoConfig, load_config
from quanto.errors import ParameterError, QuantoError
from quanto.experiments import (
    METHODS,
    config_hash,
    discrepancy_stats,
    price_with,
    rho_sweep,
    run_table,
    vol_surface,
    write_csv,
    write_detail_csv,
    write_stats_csv,
    write_vol_csv,
)

app = typer.Typer(
    name="quanto",
    help="Quanto-LV - quanto caplet pricing under local volatility",
    add_completion=False,
)
console = Console()

EXIT_INVALID = 2
EXIT_NUMERICAL = 3


def setup_logging(level: str = "INFO", log_file: Optional[str] = None):
    """Configure logging for Quanto-LV."""
    log_level = getattr(logging, level.upper(), logging.INFO)

    handlers = [logging.StreamHandler(sys.stdout)]

    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))

    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        handlers=handlers,
    )


def _validation_message(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        loc = ".".join(str(p) for p in item["loc"])
        parts.append(f"{loc}: {item['msg']}")
    return "; ".join(parts)


def _load(
    config: Optional[str],
    seed: Optional[int] = None,
    paths: Optional[int] = None,
    steps_per_year: Optional[int] = None,
    rho: Optional[float] = None,
    strike: Optional[float] = None,
    maturity: Optional[float] = None,
    option_type: Optional[str] = None,
    grid_rhos: Optional[list[float]] = None,
    grid_maturities: Optional[list[float]] = None,
    grid_strikes: Optional[list[float]] = None,
) -> QuantoConfig:
    """Load the config, apply flag overrides and set up logging.

    Repeated grid flags replace the grid lists; ``grid_strikes`` applies to
    every grid maturity.

    Exits with code 2 on a missing or invalid config.
    """
    try:
        cfg = load_config(config)
        overrides = {
            ("mc", "seed"): seed,
            ("mc", "paths"): paths,
            ("mc", "steps_per_year"): steps_per_year,
            ("market", "rho"): rho,
            ("instrument", "strike_K"): strike,
            ("instrument", "expiry_T"): maturity,
            ("instrument", "option_type"): option_type,
            ("grid", "rhos"): grid_rhos or None,
            ("grid", "maturities"): grid_maturities or None,
        }
        data = cfg.model_dump()
        for (section, key), value in overrides.items():
            if value is not None:
                data[section][key] = value
        if grid_strikes:
            data["grid"]["strikes"] = {
                str(t): list(grid_strikes) for t in data["grid"]["maturities"]
            }
        cfg = QuantoConfig(**data)
    except FileNotFoundError as e:
        console.print(f"[red]Error loading config: {e}[/red]")
        raise typer.Exit(EXIT_INVALID)
    except ValidationError as e:
        console.print(f"[red]Invalid config: {_validation_message(e)}[/red]")
        raise typer.Exit(EXIT_INVALID)

    setup_logging(cfg.logging.level, cfg.logging.file)
    return cfg


def _fail(error: QuantoError) -> None:
    console.print(f"[red]{type(error).__name__}: {error}[/red]")
    if isinstance(error, ParameterError):
        raise typer.Exit(EXIT_INVALID)
    raise typer.Exit(EXIT_NUMERICAL)


@app.command()
def price(
    method: str = typer.Option(
        "proxy,order2,order3,market", "--method", "-m",
        help=f"Comma-separated methods from {', '.join(METHODS)}",
    ),
    config: Optional[str] = typer.Option(
        None, "--config", "-c", help="Path to TOML or JSON config file"
    ),
    rho: Optional[float] = typer.Option(None, "--rho", help="LIBOR/FX correlation"),
    strike: Optional[float] = typer.Option(None, "--strike", help="Strike K"),
    maturity: Optional[float] = typer.Option(None, "--maturity", help="Expiry T"),
    option_type: Optional[str] = typer.Option(
        None, "--option-type", help="call or put"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="MC seed"),
    paths: Optional[int] = typer.Option(None, "--paths", help="MC paths"),
    steps_per_year: Optional[int] = typer.Option(
        None, "--steps-per-year", help="MC Euler steps per year"
    ),
):
    """Price one quanto caplet with the requested methods."""
    methods = [m.strip() for m in method.split(",") if m.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        console.print(f"[red]Unknown method(s) {unknown}, expected {METHODS}[/red]")
        raise typer.Exit(EXIT_INVALID)

    cfg = _load(config, seed, paths, steps_per_year, rho, strike, maturity, option_type)
    instrument = cfg.build_instrument()
    market = cfg.build_market()

    table = Table(
        title=f"Quanto {instrument.option_type} T={instrument.expiry_T} "
        f"K={instrument.strike_K} rho={market.rho}"
    )
    table.add_column("Method", style="cyan")
    table.add_column("Price", justify="right", style="green")
    table.add_column("CI half-width", justify="right", style="yellow")
    table.add_column("Error scale", justify="right", style="magenta")

    mc_config = cfg.build_mc()
    try:
        for name in methods:
            result = price_with(name, instrument, market, mc_config)
            table.add_row(
                name,
                f"{result.price:.10f}",
                "" if result.ci_halfwidth is None else f"{result.ci_halfwidth:.2e}",
                "" if result.error_scale is None else f"{result.error_scale.scale:.3e}",
            )
    except QuantoError as e:
        _fail(e)

    console.print(table)


@app.command()
def table(
    out: str = typer.Option(
        "results/table.csv", "--out", "-o", help="Summary CSV path"
    ),
    config: Optional[str] = typer.Option(
        None, "--config", "-c", help="Path to TOML or JSON config file"
    ),
    seed: Optional[int] = typer.Option(None, "--seed", help="MC seed"),
    paths: Optional[int] = typer.Option(None, "--paths", help="MC paths"),
    steps_per_year: Optional[int] = typer.Option(
        None, "--steps-per-year", help="MC Euler steps per year"
    ),
    rho: Optional[list[float]] = typer.Option(
        None, "--rho", help="Grid correlation, repeatable"
    ),
    maturity: Optional[list[float]] = typer.Option(
        None, "--maturity", help="Grid maturity in years, repeatable"
    ),
    strike: Optional[list[float]] = typer.Option(
        None, "--strike", help="Strike for every grid maturity, repeatable"
    ),
):
    """Discrepancy statistics of each method against the MC benchmark."""
    cfg = _load(
        config,
        seed,
        paths,
        steps_per_year,
        grid_rhos=rho,
        grid_maturities=maturity,
        grid_strikes=strike,
    )
    digest = config_hash(cfg)

    try:
        grid = cfg.experiment_grid()
        rows = run_table(grid, cfg.build_mc())
    except ValidationError as e:
        console.print(f"[red]Invalid grid: {_validation_message(e)}[/red]")
        raise typer.Exit(EXIT_INVALID)
    except QuantoError as e:
        _fail(e)

    stats = discrepancy_stats(rows)
    out_path = Path(out)
    detail_path = out_path.with_name(f"{out_path.stem}_detail{out_path.suffix}")
    write_stats_csv(stats, str(out_path), digest)
    write_detail_csv(rows, str(detail_path), digest)

    summary = Table(title="Absolute discrepancy to Monte Carlo")
    summary.add_column("rho", style="cyan")
    for label in ("2nd", "3rd", "mkt"):
        summary.add_column(f"avg {label}", justify="right", style="green")
        summary.add_column(f"max {label}", justify="right", style="yellow")
    summary.add_column("partial", style="red")
    for s in stats:
        summary.add_row(
            f"{s.rho:+.2f}",
            f"{s.avg_abs_2nd:.5f}", f"{s.max_abs_2nd:.5f}",
            f"{s.avg_abs_3rd:.5f}", f"{s.max_abs_3rd:.5f}",
            f"{s.avg_abs_mkt:.5f}", f"{s.max_abs_mkt:.5f}",
            "yes" if s.partial_benchmark else "",
        )
    console.print(summary)
    console.print(f"\nSummary: {out_path}\nDetail: {detail_path}")


@app.command()
def volsurface(
    asset: str = typer.Option("LIBOR", "--asset", "-a", help="LIBOR or FX"),
    out: str = typer.Option(
        "results/volsurface.csv", "--out", "-o", help="Output CSV path"
    ),
    maturity: Optional[list[float]] = typer.Option(
        None, "--maturity", help="Maturity in years, repeatable"
    ),
    strike: Optional[list[float]] = typer.Option(
        None, "--strike", help="Strike for every maturity, repeatable"
    ),
    config: Optional[str] = typer.Option(
        None, "--config", "-c", help="Path to TOML or JSON config file"
    ),
):
    """Model implied volatilities from the rho = 0 expansion."""
    asset = asset.upper()
    if asset not in ("LIBOR", "FX"):
        console.print(f"[red]Unknown asset '{asset}', expected LIBOR or FX[/red]")
        raise typer.Exit(EXIT_INVALID)

    cfg = _load(config)
    maturities = maturity or cfg.grid.maturities
    if strike:
        strikes = {T: sorted(strike) for T in maturities}
    else:
        strikes = cfg.experiment_grid().strikes if asset == "LIBOR" else None
    try:
        points = vol_surface(asset, maturities, cfg.build_market(), strikes)
    except QuantoError as e:
        _fail(e)

    write_vol_csv(points, out, config_hash(cfg))
    console.print(f"[green]Wrote {len(points)} implied vols to {out}[/green]")


@app.command("rho-sweep")
def rho_sweep_cmd(
    out: str = typer.Option(
        "results/rho_sweep.csv", "--out", "-o", help="Output CSV path"
    ),
    maturity: float = typer.Option(6.0, "--maturity", help="Expiry T"),
    strike: Optional[list[float]] = typer.Option(
        None, "--strike", help="Strike, repeatable (default 0.04, 0.06, 0.08)"
    ),
    rho: Optional[list[float]] = typer.Option(
        None, "--rho", help="Correlation, repeatable (default -0.5 to 0.5 by 0.1)"
    ),
    config: Optional[str] = typer.Option(
        None, "--config", "-c", help="Path to TOML or JSON config file"
    ),
):
    """Third order prices over a correlation grid for a few strikes."""
    if rho and any(abs(r) > 1 for r in rho):
        console.print(f"[red]Correlations must lie in [-1, 1], got {rho}[/red]")
        raise typer.Exit(EXIT_INVALID)

    cfg = _load(config)
    strikes = strike or [0.04, 0.06, 0.08]
    try:
        rows = rho_sweep(cfg.build_market(), maturity, strikes, rho or None)
    except QuantoError as e:
        _fail(e)

    write_csv(rows, ["K", "rho", "price"], out, config_hash(cfg))
    console.print(f"[green]Wrote {len(rows)} prices to {out}[/green]")


if __name__ == "__main__":
    app()
