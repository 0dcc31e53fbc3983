"""Hour-ahead market settlement, storage dynamics, and profit accounting.

The producer submits an offer book before each one-hour slot.  Offers whose
price is at or below the clearing price become a binding commitment; energy
the producer cannot deliver (beyond renewable output plus what the storage
can discharge) is the over-commitment and is penalized per MWh.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

from .errors import ValidationError


@dataclass(frozen=True)
class PriceBounds:
    """Clearing-price envelope [p_min, p_max]."""

    p_min: float
    p_max: float

    def __post_init__(self):
        if not 0.0 < self.p_min <= self.p_max:
            raise ValidationError(
                f"price bounds must satisfy 0 < p_min <= p_max, got "
                f"[{self.p_min}, {self.p_max}]"
            )

    @property
    def theta(self) -> float:
        """Price fluctuation ratio p_max / p_min (>= 1)."""
        return self.p_max / self.p_min


@dataclass(frozen=True)
class TraceSlot:
    """One hour of exogenous input: clearing price and renewable output."""

    price: float
    renewable_output: float

    def __post_init__(self):
        if self.price <= 0.0:
            raise ValidationError(f"price must be positive, got {self.price}")
        if self.renewable_output < 0.0:
            raise ValidationError(
                f"renewable output must be non-negative, got {self.renewable_output}"
            )


@dataclass(frozen=True)
class Trace:
    """An input instance: the per-slot price and renewable-output series."""

    slots: tuple[TraceSlot, ...]

    def __post_init__(self):
        if len(self.slots) < 1:
            raise ValidationError("a trace needs at least one slot")

    @classmethod
    def from_series(cls, prices: Sequence[float], outputs: Sequence[float]) -> "Trace":
        if len(prices) != len(outputs):
            raise ValidationError(
                f"price series has {len(prices)} entries but output series has "
                f"{len(outputs)}"
            )
        return cls(tuple(TraceSlot(float(p), float(u)) for p, u in zip(prices, outputs)))

    @property
    def horizon(self) -> int:
        return len(self.slots)

    def prices(self) -> tuple[float, ...]:
        return tuple(s.price for s in self.slots)

    def outputs(self) -> tuple[float, ...]:
        return tuple(s.renewable_output for s in self.slots)

    def check_bounds(self, bounds: PriceBounds, clip: bool = False) -> "Trace":
        """Validate prices against `bounds`; with clip=True return a clipped copy."""
        if clip:
            return Trace(
                tuple(
                    TraceSlot(min(max(s.price, bounds.p_min), bounds.p_max), s.renewable_output)
                    for s in self.slots
                )
            )
        for i, s in enumerate(self.slots):
            if not bounds.p_min <= s.price <= bounds.p_max:
                raise ValidationError(
                    f"slot {i + 1}: price {s.price} outside bounds "
                    f"[{bounds.p_min}, {bounds.p_max}]"
                )
        return self


@dataclass(frozen=True)
class StorageSpec:
    """Storage capacity, rate limits, and the level at the first slot."""

    capacity: float
    charge_rate: float
    discharge_rate: float
    initial_level: float | None = None  # None means full

    def __post_init__(self):
        if self.capacity <= 0.0:
            raise ValidationError(f"capacity must be positive, got {self.capacity}")
        if self.charge_rate < 0.0 or self.discharge_rate < 0.0:
            raise ValidationError("charge/discharge rates must be non-negative")
        if self.initial_level is None:
            object.__setattr__(self, "initial_level", self.capacity)
        if not 0.0 <= self.initial_level <= self.capacity:
            raise ValidationError(
                f"initial level {self.initial_level} outside [0, {self.capacity}]"
            )


@dataclass(frozen=True)
class PenaltyParams:
    """Over-commitment penalty alpha1 * p(t) + alpha2 per MWh undelivered."""

    alpha1: float = 1.2
    alpha2: float = 0.0

    def __post_init__(self):
        if self.alpha1 < 0.0 or self.alpha2 < 0.0:
            raise ValidationError("penalty coefficients must be non-negative")

    def rate(self, price: float) -> float:
        return self.alpha1 * price + self.alpha2


@dataclass(frozen=True)
class Offer:
    """A (price, volume) pair; commits iff the clearing price reaches `price`."""

    price: float
    volume: float

    def __post_init__(self):
        if self.price <= 0.0:
            raise ValidationError(f"offer price must be positive, got {self.price}")
        if self.volume < 0.0:
            raise ValidationError(f"offer volume must be non-negative, got {self.volume}")


@dataclass(frozen=True)
class OfferBook:
    """Offers for one slot, sorted by non-decreasing price."""

    offers: tuple[Offer, ...] = ()

    def __post_init__(self):
        for a, b in zip(self.offers, self.offers[1:]):
            if b.price < a.price:
                raise ValidationError("offer book prices must be non-decreasing")

    def __iter__(self) -> Iterator[Offer]:
        return iter(self.offers)

    def __len__(self) -> int:
        return len(self.offers)

    @property
    def total_volume(self) -> float:
        return sum(o.volume for o in self.offers)


EMPTY_BOOK = OfferBook()


@dataclass(frozen=True)
class SlotOutcome:
    """Settlement result of one slot."""

    commitment: float
    over_commitment: float
    charge: float
    discharge: float
    net_profit: float
    storage_after: float


@dataclass(frozen=True)
class RunResult:
    """Per-slot outcomes of a full simulation plus the accumulated profit."""

    outcomes: tuple[SlotOutcome, ...]
    total_profit: float

    @property
    def horizon(self) -> int:
        return len(self.outcomes)

    def commitments(self) -> tuple[float, ...]:
        return tuple(o.commitment for o in self.outcomes)

    def levels(self) -> tuple[float, ...]:
        return tuple(o.storage_after for o in self.outcomes)

    def min_level(self, initial_level: float) -> float:
        return min((initial_level,) + self.levels())


# A strategy maps (slot index, clearing price, renewable output, storage level)
# to an offer book.  Strategies that must act before the price is revealed
# simply ignore the price argument.
OfferStrategy = Callable[[int, float, float, float], OfferBook]


def settle_offer(book: OfferBook, clearing_price: float) -> float:
    """Commitment volume: total volume of offers priced at or below clearing."""
    return sum(o.volume for o in book if o.price <= clearing_price)


def over_commitment(x: float, u: float, z: float, discharge_rate: float) -> float:
    """Committed volume beyond what output plus discharge can deliver."""
    return max(x - (u + min(z, discharge_rate)), 0.0)


def slot_profit(price: float, x: float, y: float, penalty: PenaltyParams) -> float:
    """Net profit of one slot: sale revenue minus over-commitment penalty."""
    return price * x - penalty.rate(price) * y


def evolve_storage(
    level: float, spec: StorageSpec, u: float, x: float
) -> tuple[float, float, float]:
    """Advance the storage level by one slot.

    Surplus output (u - x) charges up to the charge rate; deficit (x - u)
    discharges up to the discharge rate and the available level.  Charge
    beyond capacity is spilled.  Returns (next_level, charge, discharge).
    """
    charge = min(spec.charge_rate, max(u - x, 0.0))
    discharge = min(spec.discharge_rate, max(x - u, 0.0), level)
    next_level = min(max(level + charge - discharge, 0.0), spec.capacity)
    return next_level, charge, discharge


def simulate_run(
    trace: Trace,
    spec: StorageSpec,
    penalty: PenaltyParams,
    strategy: OfferStrategy,
) -> RunResult:
    """Drive a strategy over a trace and settle every slot.

    Each slot: obtain the offer book, settle it against the clearing price,
    compute the over-commitment, cap physically delivered energy at output
    plus dischargeable storage, evolve the storage on the delivered energy,
    and accumulate the net profit.  Pure: identical inputs give identical
    results.
    """
    level = spec.initial_level
    outcomes = []
    total = 0.0
    for t, slot in enumerate(trace.slots):
        book = strategy(t, slot.price, slot.renewable_output, level)
        x = settle_offer(book, slot.price)
        y = over_commitment(x, slot.renewable_output, level, spec.discharge_rate)
        delivered = min(x, slot.renewable_output + min(level, spec.discharge_rate))
        level, charge, discharge = evolve_storage(level, spec, slot.renewable_output, delivered)
        r = slot_profit(slot.price, x, y, penalty)
        total += r
        outcomes.append(
            SlotOutcome(
                commitment=x,
                over_commitment=y,
                charge=charge,
                discharge=discharge,
                net_profit=r,
                storage_after=level,
            )
        )
    return RunResult(tuple(outcomes), total)
