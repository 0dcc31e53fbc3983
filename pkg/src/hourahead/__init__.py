"""Online offering strategies for a storage-assisted renewable producer.

Library layout:

* ``market``     - data model, settlement, storage dynamics, simulation loop
* ``policy``     - adaptive price threshold over the storage level
* ``strategies`` - the online strategies and the fixed-threshold baselines
* ``oracle``     - clairvoyant optimum (quantized DP + exhaustive check)
* ``adversary``  - worst-case search and step-function ratio numerics
* ``traces``     - CSV ingestion and seeded synthetic generation
* ``experiment`` - multi-run orchestration and report emission
* ``cli``        - the ``hourahead`` command-line interface
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceededError,
    InstanceTooLargeError,
    TraceParseError,
    ValidationError,
)
from .market import (
    EMPTY_BOOK,
    Offer,
    OfferBook,
    PenaltyParams,
    PriceBounds,
    RunResult,
    SlotOutcome,
    StorageSpec,
    Trace,
    TraceSlot,
    evolve_storage,
    over_commitment,
    settle_offer,
    simulate_run,
    slot_profit,
)
from .oracle import (
    UNBOUNDED,
    DiscretizationConfig,
    OptResult,
    UnboundedRatio,
    empirical_cr,
    offline_opt_dp,
    offline_opt_exhaustive,
)
from .policy import CrReport, ThresholdPolicy, c_threshold, cr_table, theoretical_cr
from .strategies import (
    Forecast,
    StrategyConfig,
    fonline_offer,
    mocsmb_offers,
    nostorage_profit,
    ocsmb_offers,
    socs_offer,
)

__all__ = [
    "BudgetExceededError",
    "CrReport",
    "DiscretizationConfig",
    "EMPTY_BOOK",
    "Forecast",
    "InstanceTooLargeError",
    "Offer",
    "OfferBook",
    "OptResult",
    "PenaltyParams",
    "PriceBounds",
    "RunResult",
    "SlotOutcome",
    "StorageSpec",
    "StrategyConfig",
    "Trace",
    "TraceParseError",
    "TraceSlot",
    "ThresholdPolicy",
    "UNBOUNDED",
    "UnboundedRatio",
    "ValidationError",
    "c_threshold",
    "cr_table",
    "empirical_cr",
    "evolve_storage",
    "fonline_offer",
    "mocsmb_offers",
    "nostorage_profit",
    "ocsmb_offers",
    "offline_opt_dp",
    "offline_opt_exhaustive",
    "over_commitment",
    "settle_offer",
    "simulate_run",
    "slot_profit",
    "socs_offer",
    "theoretical_cr",
]
