"""Offering strategies: threshold-based sellers and the simple baselines.

Three threshold strategies share the same curve:

* ``socs_offer``   - next-slot price and output are both known; submits a
  single offer at the clearing price.
* ``ocsmb_offers`` - price unknown; hedges by laddering the sellable energy
  over m offers priced along the threshold curve.
* ``mocsmb_offers`` - output known only within a relative error band; runs
  the ladder on the conservative low end of the band so a short output can
  never leave a commitment unfilled.

Baselines: a fixed-threshold seller (``fonline_offer``) and the no-storage
clairvoyant total (``nostorage_profit``).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ValidationError
from .market import (
    EMPTY_BOOK,
    Offer,
    OfferBook,
    OfferStrategy,
    PriceBounds,
    StorageSpec,
    Trace,
)
from .policy import ThresholdPolicy


@dataclass(frozen=True)
class StrategyConfig:
    """Threshold curve, storage, and the knobs of the laddered strategies."""

    policy: ThresholdPolicy
    spec: StorageSpec
    offers: int = 10  # max offers per slot (m); 1 means the floor offer only
    e_max: float = 0.0  # output forecast error bound, < 0.5

    def __post_init__(self):
        if self.offers < 1:
            raise ValidationError(f"offer count must be >= 1, got {self.offers}")
        if not 0.0 <= self.e_max < 0.5:
            raise ValidationError(f"e_max must be in [0, 0.5), got {self.e_max}")


@dataclass(frozen=True)
class Forecast:
    """Predicted output and the relative error bound it is trusted to."""

    predicted: float
    error_bound: float

    def __post_init__(self):
        if self.predicted < 0.0:
            raise ValidationError(f"predicted output must be >= 0, got {self.predicted}")
        if not 0.0 <= self.error_bound < 0.5:
            raise ValidationError(f"error bound must be in [0, 0.5), got {self.error_bound}")


def socs_offer(cfg: StrategyConfig, price: float, output: float, level: float) -> OfferBook:
    """Single offer for the known-price, known-output setting.

    The candidate price is the threshold at the post-charge level
    min(level + output, capacity).  If the market beats it, sell down to the
    level where the threshold matches the clearing price (never retaining
    more than the storage can hold after charging); otherwise sell only the
    surplus that cannot be charged.  The volume is capped at what is
    physically deliverable, so the commitment can always be met.
    """
    pol, spec = cfg.policy, cfg.spec
    p_min = pol.bounds.p_min
    z_plus = min(level + output, pol.capacity)
    candidate = pol.eval_g(z_plus)
    if candidate > price:
        volume = max(output - spec.charge_rate, 0.0)
    elif price <= p_min:
        volume = level + output - min(pol.c_th, level + spec.charge_rate)
    else:
        volume = level + output - min(pol.eval_g_inverse(price), level + spec.charge_rate)
    volume = min(volume, output + min(level, spec.discharge_rate))
    volume = max(volume, 0.0)
    if volume == 0.0:
        return EMPTY_BOOK
    return OfferBook((Offer(price, volume),))


def ocsmb_offers(cfg: StrategyConfig, output: float, level: float) -> OfferBook:
    """Offer ladder for the unknown-price setting.

    Energy that should be sold at any price goes into one offer at p_min:
    the spill above the threshold level when the (chargeable) supply pushes
    past it, or else the surplus the charger cannot absorb.  The rest of the
    deliverable energy is split into m-1 equal slices priced along the
    threshold curve, so higher clearing prices unlock deeper slices.  The
    book never exceeds deliverable energy, hence an exact-output run never
    over-commits.
    """
    pol, spec = cfg.policy, cfg.spec
    p_min = pol.bounds.p_min
    deliverable = output + min(level, spec.discharge_rate)
    if deliverable <= 0.0:
        return EMPTY_BOOK

    if min(output, spec.charge_rate) + level > pol.c_th:
        floor_volume = min(output + level - pol.c_th, deliverable)
        span = min(pol.c_th, output + spec.discharge_rate, deliverable - floor_volume)
        top = pol.c_th
    else:
        floor_volume = max(output - spec.charge_rate, 0.0)
        span = deliverable - floor_volume
        top = level + output - floor_volume

    offers = []
    if floor_volume > 0.0:
        offers.append(Offer(p_min, floor_volume))
    rungs = cfg.offers - 1
    if rungs > 0 and span > 0.0:
        # cumulative slicing keeps the rung volumes summing to span exactly
        sold = 0.0
        for i in range(1, rungs + 1):
            cum = span * (i / rungs)
            rung_level = max(top - cum, 0.0)
            offers.append(Offer(pol.eval_g(rung_level), cum - sold))
            sold = cum
    return OfferBook(tuple(offers))


def mocsmb_offers(cfg: StrategyConfig, forecast: Forecast, level: float) -> OfferBook:
    """Offer ladder fed with the low end of the output forecast band."""
    if forecast.error_bound > cfg.e_max:
        raise ValidationError(
            f"forecast error bound {forecast.error_bound} exceeds configured "
            f"e_max {cfg.e_max}"
        )
    conservative = (1.0 - forecast.error_bound) * forecast.predicted
    return ocsmb_offers(cfg, conservative, level)


def fonline_offer(
    bounds: PriceBounds, spec: StorageSpec, output: float, level: float
) -> OfferBook:
    """Storage-level-oblivious baseline: everything at sqrt(p_min * p_max)."""
    return fixed_threshold_offer(math.sqrt(bounds.p_min * bounds.p_max), spec, output, level)


def fixed_threshold_offer(
    threshold: float, spec: StorageSpec, output: float, level: float
) -> OfferBook:
    """Offer all deliverable energy at one fixed price."""
    available = output + min(level, spec.discharge_rate)
    if available <= 0.0:
        return EMPTY_BOOK
    return OfferBook((Offer(threshold, available),))


def nostorage_profit(trace: Trace) -> float:
    """Clairvoyant optimum without storage: sell the full output every slot."""
    return sum(s.price * s.renewable_output for s in trace.slots)


# ---------------------------------------------------------------------------
# per-slot callbacks for simulate_run


def socs_strategy(cfg: StrategyConfig) -> OfferStrategy:
    return lambda t, price, output, level: socs_offer(cfg, price, output, level)


def ocsmb_strategy(cfg: StrategyConfig) -> OfferStrategy:
    # ignores the clearing price: the book is fixed before settlement
    return lambda t, price, output, level: ocsmb_offers(cfg, output, level)


def mocsmb_strategy(cfg: StrategyConfig, forecasts: Sequence[Forecast]) -> OfferStrategy:
    # sees only the forecast series, never the realized output
    return lambda t, price, output, level: mocsmb_offers(cfg, forecasts[t], level)


def fonline_strategy(bounds: PriceBounds, spec: StorageSpec) -> OfferStrategy:
    return lambda t, price, output, level: fonline_offer(bounds, spec, output, level)


def fixed_threshold_strategy(threshold: float, spec: StorageSpec) -> OfferStrategy:
    return lambda t, price, output, level: fixed_threshold_offer(threshold, spec, output, level)
