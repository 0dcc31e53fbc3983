"""Trace ingestion from CSV files and seeded synthetic generation.

File formats (hourly, aligned timestamps):

* price CSV: header ``timestamp,price``; ISO-8601 timestamps, price in
  currency/MWh.
* wind CSV:  header ``timestamp,wind_mw``; same timestamp grid, decimal MW
  (slot energy in MWh equals MW x 1 h).
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from datetime import datetime, timedelta
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import TraceParseError, ValidationError
from .market import PriceBounds, Trace


def _read_series(path: str | Path, value_column: str) -> tuple[list[str], list[float]]:
    path = Path(path)
    timestamps: list[str] = []
    values: list[float] = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["timestamp", value_column]:
            raise TraceParseError(
                f"{path}:1: expected header 'timestamp,{value_column}', got {header}"
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 2:
                raise TraceParseError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
            stamp, raw = row
            try:
                datetime.fromisoformat(stamp)
            except ValueError:
                raise TraceParseError(
                    f"{path}:{lineno}: invalid ISO-8601 timestamp {stamp!r}"
                ) from None
            try:
                value = float(raw)
            except ValueError:
                raise TraceParseError(
                    f"{path}:{lineno}: invalid {value_column} value {raw!r}"
                ) from None
            if math.isnan(value) or math.isinf(value):
                raise TraceParseError(f"{path}:{lineno}: non-finite {value_column} value")
            timestamps.append(stamp)
            values.append(value)
    if not values:
        raise TraceParseError(f"{path}: no data rows")
    return timestamps, values


def load_trace(
    price_path: str | Path,
    wind_path: str | Path,
    bounds: PriceBounds | None = None,
    clip: bool = False,
) -> tuple[Trace, PriceBounds]:
    """Load aligned hourly price and wind series.

    With explicit `bounds`, prices outside them fail (or are clipped when
    `clip` is set).  Without bounds, they are derived from the observed
    price range.  Errors name the offending file row.
    """
    price_stamps, prices = _read_series(price_path, "price")
    wind_stamps, winds = _read_series(wind_path, "wind_mw")
    if len(prices) != len(winds):
        raise TraceParseError(
            f"misaligned series: {len(prices)} price rows vs {len(winds)} wind rows"
        )
    for i, (a, b) in enumerate(zip(price_stamps, wind_stamps)):
        if a != b:
            raise TraceParseError(
                f"row {i + 2}: timestamp mismatch, price file has {a!r}, wind file has {b!r}"
            )
    for i, p in enumerate(prices):
        if p <= 0.0:
            raise ValidationError(f"row {i + 2}: price must be positive, got {p}")
    for i, w in enumerate(winds):
        if w < 0.0:
            raise ValidationError(f"row {i + 2}: wind must be non-negative, got {w}")

    if bounds is None:
        bounds = PriceBounds(min(prices), max(prices))
        trace = Trace.from_series(prices, winds)
    elif clip:
        trace = Trace.from_series(
            [min(max(p, bounds.p_min), bounds.p_max) for p in prices], winds
        )
    else:
        for i, p in enumerate(prices):
            if not bounds.p_min <= p <= bounds.p_max:
                raise ValidationError(
                    f"row {i + 2}: price {p} outside bounds "
                    f"[{bounds.p_min}, {bounds.p_max}] and clipping is off"
                )
        trace = Trace.from_series(prices, winds)
    return trace, bounds


@dataclass(frozen=True)
class SyntheticParams:
    """Shape parameters of the synthetic price walk and wind process."""

    price_sigma: float = 0.15  # log-price random-walk step
    wind_mean_frac: float = 0.4  # long-run wind mean as a fraction of capacity
    wind_phi: float = 0.85  # mean-reversion coefficient
    wind_sigma_frac: float = 0.12  # innovation scale as a fraction of capacity


def synthesize(
    rng: np.random.Generator,
    horizon: int,
    bounds: PriceBounds,
    wind_capacity: float = 10.0,
    params: SyntheticParams | None = None,
) -> Trace:
    """Draw one synthetic trace from an already-seeded generator.

    Prices follow a log random walk reflected into [p_min, p_max]; wind is a
    mean-reverting first-order autoregressive process clipped to
    [0, wind_capacity].
    """
    params = params or SyntheticParams()
    lo, hi = math.log(bounds.p_min), math.log(bounds.p_max)
    x = rng.uniform(lo, hi)
    price_steps = rng.standard_normal(horizon)
    prices = []
    for step in price_steps:
        x = min(max(x + params.price_sigma * float(step), lo), hi)
        prices.append(min(max(math.exp(x), bounds.p_min), bounds.p_max))

    mean = params.wind_mean_frac * wind_capacity
    sigma = params.wind_sigma_frac * wind_capacity
    wind_steps = rng.standard_normal(horizon)
    w = mean
    winds = []
    for step in wind_steps:
        w = min(max(mean + params.wind_phi * (w - mean) + sigma * float(step), 0.0), wind_capacity)
        winds.append(w)
    return Trace.from_series(prices, winds)


def gen_synthetic(
    seed: int,
    horizon: int,
    bounds: PriceBounds,
    wind_capacity: float = 10.0,
    params: SyntheticParams | None = None,
) -> Trace:
    """Seeded, reproducible synthetic trace: same seed, same trace."""
    if horizon < 1:
        raise ValidationError(f"horizon must be >= 1, got {horizon}")
    return synthesize(np.random.default_rng(seed), horizon, bounds, wind_capacity, params)


def realize_outputs(
    rng: np.random.Generator, predicted: Sequence[float], error_bound: float
) -> tuple[float, ...]:
    """Draw realized outputs uniformly within the relative error band.

    Each realized value lies in [(1-e) * predicted, (1+e) * predicted].  A
    zero bound reproduces the prediction exactly while consuming the same
    number of draws, so changing the bound never shifts the stream.
    """
    if not 0.0 <= error_bound < 0.5:
        raise ValidationError(f"error bound must be in [0, 0.5), got {error_bound}")
    factors = 1.0 + error_bound * rng.uniform(-1.0, 1.0, size=len(predicted))
    return tuple(float(u * f) for u, f in zip(predicted, factors))


def write_trace_csv(
    trace: Trace,
    price_path: str | Path,
    wind_path: str | Path,
    start: str = "2015-01-01T00:00",
) -> None:
    """Write a trace as the pair of hourly CSV files load_trace accepts."""
    stamps = [
        (datetime.fromisoformat(start) + timedelta(hours=i)).isoformat(timespec="minutes")
        for i in range(trace.horizon)
    ]
    with Path(price_path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "price"])
        for stamp, slot in zip(stamps, trace.slots):
            writer.writerow([stamp, repr(slot.price)])
    with Path(wind_path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["timestamp", "wind_mw"])
        for stamp, slot in zip(stamps, trace.slots):
            writer.writerow([stamp, repr(slot.renewable_output)])
