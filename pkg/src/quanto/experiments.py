"""Grid runners and CSV writers for the accuracy experiments."""

import csv
import hashlib
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Any, Iterable, Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel
from tqdm import tqdm

from quanto.errors import BudgetExhaustedError, ParameterError
from quanto.expansion import price_order2, price_order3
from quanto.market import VolSource, market_price, model_implied_vol
from quanto.models import (
    DetailRow,
    DiscrepancyStats,
    ExperimentGrid,
    ImpliedVolPoint,
    McConfig,
    PriceResult,
    QuantoInstrument,
    QuantoMarket,
)
from quanto.montecarlo import simulate_quanto, thread_cap
from quanto.proxy import proxy_price

logger = logging.getLogger(__name__)

Method = Literal["proxy", "order2", "order3", "market", "mc"]
METHODS: tuple[str, ...] = ("proxy", "order2", "order3", "market", "mc")

BASE_LIBOR = 0.06
# Strike grids at the base forward, rescaled for other centres.
_STRIKE_GRIDS = {
    1.0: np.linspace(0.03, 0.09, 13),
    6.0: np.linspace(0.02, 0.12, 11),
    10.0: np.linspace(0.015, 0.14, 11),
    15.0: np.linspace(0.01, 0.16, 11),
}

DETAIL_COLUMNS = [
    "T", "K", "rho", "proxy", "order2", "order3", "market", "mc", "ci",
    "abs_2nd", "abs_3rd", "abs_mkt", "partial",
]
STATS_COLUMNS = [
    "rho", "avg_abs_2nd", "max_abs_2nd", "avg_abs_3rd", "max_abs_3rd",
    "avg_abs_mkt", "max_abs_mkt", "points", "partial_benchmark",
]


def default_strikes(T: float, center: float = BASE_LIBOR) -> list[float]:
    """Strike range widening with maturity, centred at ``center``."""
    grid = _STRIKE_GRIDS.get(float(T))
    if grid is None:
        lo = max(0.5 - 0.025 * T, 0.1)
        grid = np.linspace(lo * BASE_LIBOR, (1.5 + 0.08 * T) * BASE_LIBOR, 11)
    return [round(float(k) * center / BASE_LIBOR, 10) for k in grid]


def strikes_for(grid: ExperimentGrid, T: float) -> list[float]:
    return grid.strikes.get(T) or default_strikes(T, grid.market.L0)


def price_with(
    method: str,
    instrument: QuantoInstrument,
    market: QuantoMarket,
    mc_config: Optional[McConfig] = None,
) -> PriceResult:
    """Price one instrument with the named method."""
    if method == "proxy":
        return PriceResult(price=proxy_price(instrument, market), method="proxy")
    if method == "order2":
        return price_order2(instrument, market)
    if method == "order3":
        return price_order3(instrument, market)
    if method == "market":
        return market_price(instrument, market)
    if method == "mc":
        estimate = simulate_quanto(instrument, market, mc_config)
        return PriceResult(
            price=estimate.price, method="mc", ci_halfwidth=estimate.ci_halfwidth
        )
    raise ParameterError(f"unknown pricing method '{method}', expected {METHODS}")


def detail_row(
    T: float,
    K: float,
    rho: float,
    market: QuantoMarket,
    mc_config: McConfig,
) -> DetailRow:
    """All prices of one grid point; a budget-limited MC marks the row partial."""
    instrument = QuantoInstrument(expiry_T=T, strike_K=K)
    point_market = market.with_rho(rho)
    partial = False
    try:
        estimate = simulate_quanto(instrument, point_market, mc_config)
    except BudgetExhaustedError as e:
        logger.warning(f"Partial benchmark at T={T} K={K} rho={rho}: {e}")
        estimate = e.estimate
        partial = True
    return DetailRow(
        T=T,
        K=K,
        rho=rho,
        proxy=proxy_price(instrument, point_market),
        order2=price_order2(instrument, point_market).price,
        order3=price_order3(instrument, point_market).price,
        market=market_price(instrument, point_market).price,
        mc=estimate.price,
        ci=estimate.ci_halfwidth,
        partial=partial,
    )


def run_table(
    grid: ExperimentGrid,
    mc_config: McConfig,
    workers: Optional[int] = None,
    show_progress: bool = True,
) -> list[DetailRow]:
    """Price the full (rho, T, K) grid.

    Points run in parallel; each point's MC runs single-threaded. Rows come
    back in grid order whatever the completion order.
    """
    points = [
        (T, K, rho)
        for rho in grid.rhos
        for T in grid.maturities
        for K in strikes_for(grid, T)
    ]
    point_mc = mc_config.model_copy(update={"workers": 1})
    logger.info(f"Pricing {len(points)} grid points")

    def run(point: tuple[float, float, float]) -> DetailRow:
        T, K, rho = point
        return detail_row(T, K, rho, grid.market, point_mc)

    with ThreadPoolExecutor(max_workers=workers or thread_cap()) as pool:
        rows = list(
            tqdm(
                pool.map(run, points),
                total=len(points),
                desc="Pricing grid",
                disable=not show_progress,
            )
        )
    logger.info(f"Priced {len(rows)} points, {sum(r.partial for r in rows)} partial")
    return rows


def discrepancy_stats(rows: Iterable[DetailRow]) -> list[DiscrepancyStats]:
    """Average and maximum absolute discrepancies per rho, in first-seen order."""
    by_rho: dict[float, list[DetailRow]] = {}
    for row in rows:
        by_rho.setdefault(row.rho, []).append(row)

    stats = []
    for rho, group in by_rho.items():
        values = {
            method: [getattr(r, f"abs_{method}") for r in group]
            for method in ("2nd", "3rd", "mkt")
        }
        fields = {}
        for method, errs in values.items():
            fields[f"avg_abs_{method}"] = sum(errs) / len(errs)
            fields[f"max_abs_{method}"] = max(errs)
        stats.append(
            DiscrepancyStats(
                rho=rho,
                points=len(group),
                partial_benchmark=any(r.partial for r in group),
                **fields,
            )
        )
    return stats


def config_hash(config: Any) -> str:
    """Short sha256 of the JSON dump of a config model or plain dict."""
    if isinstance(config, BaseModel):
        config = config.model_dump(mode="json")
    payload = json.dumps(config, sort_keys=True, default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def _fmt(value: Any) -> str:
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(
    rows: Sequence[Sequence[Any]],
    columns: Sequence[str],
    output_path: str,
    digest: str,
) -> None:
    """Write a header comment with the config hash, a header row and rows."""
    output_file = Path(output_path)
    output_file.parent.mkdir(parents=True, exist_ok=True)
    with open(output_file, "w", newline="", encoding="utf-8") as f:
        f.write(f"# config-hash={digest}\n")
        writer = csv.writer(f)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    logger.info(f"Wrote {len(rows)} rows to {output_path}")


def write_detail_csv(rows: Sequence[DetailRow], output_path: str, digest: str) -> None:
    data = [
        [r.T, r.K, r.rho, r.proxy, r.order2, r.order3, r.market, r.mc, r.ci,
         r.abs_2nd, r.abs_3rd, r.abs_mkt, r.partial]
        for r in rows
    ]
    write_csv(data, DETAIL_COLUMNS, output_path, digest)


def write_stats_csv(
    stats: Sequence[DiscrepancyStats], output_path: str, digest: str
) -> None:
    data = [[getattr(s, c) for c in STATS_COLUMNS] for s in stats]
    write_csv(data, STATS_COLUMNS, output_path, digest)


def _read_rows(path: str) -> list[dict[str, str]]:
    with open(path, newline="", encoding="utf-8") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


def load_detail_csv(path: str) -> list[DetailRow]:
    """Read a detail CSV back into rows."""
    rows = []
    for record in _read_rows(path):
        rows.append(
            DetailRow(
                **{c: float(record[c]) for c in DETAIL_COLUMNS[:9]},
                partial=record["partial"] == "1",
            )
        )
    return rows


def load_stats_csv(path: str) -> list[DiscrepancyStats]:
    stats = []
    for record in _read_rows(path):
        stats.append(
            DiscrepancyStats(
                **{c: float(record[c]) for c in STATS_COLUMNS[:7]},
                points=int(record["points"]),
                partial_benchmark=record["partial_benchmark"] == "1",
            )
        )
    return stats


def vol_surface(
    asset: Literal["LIBOR", "FX"],
    maturities: Sequence[float],
    market: QuantoMarket,
    strikes: Optional[dict[float, list[float]]] = None,
    source: VolSource = "expansion_rho0",
    mc_config: Optional[McConfig] = None,
) -> list[ImpliedVolPoint]:
    """Implied vol smile per maturity for one asset."""
    center = market.L0 if asset == "LIBOR" else market.X0
    points = []
    for T in maturities:
        grid = (strikes or {}).get(T) or default_strikes(T, center)
        for K in grid:
            points.append(model_implied_vol(asset, T, K, market, source, mc_config))
    logger.info(f"Computed {len(points)} {asset} implied vols")
    return points


def write_vol_csv(
    points: Sequence[ImpliedVolPoint], output_path: str, digest: str
) -> None:
    data = [[p.asset, p.expiry_T, p.strike, p.vol, p.source] for p in points]
    write_csv(data, ["asset", "T", "strike", "vol", "source"], output_path, digest)


def rho_sweep(
    market: QuantoMarket,
    T: float,
    strikes: Sequence[float] = (0.04, 0.06, 0.08),
    rhos: Optional[Sequence[float]] = None,
) -> list[tuple[float, float, float]]:
    """Third order prices (K, rho, price) over a correlation grid."""
    if rhos is None:
        rhos = [round(float(r), 10) for r in np.linspace(-0.5, 0.5, 11)]
    rows = []
    for K in strikes:
        instrument = QuantoInstrument(expiry_T=T, strike_K=K)
        for rho in rhos:
            price = price_order3(instrument, market.with_rho(rho)).price
            rows.append((K, rho, price))
    return rows
