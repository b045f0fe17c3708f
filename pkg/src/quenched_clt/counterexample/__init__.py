"""Truncated circle-rotation x Rademacher counterexample."""

from .construction import (
    build_truncated_example,
    check_construction,
    conditional_expectation,
    describe,
    observable_value,
    symmetric_difference,
)
from .estimates import bounded_sup_estimate, contrast, divergent_series_estimate, exact_sup_value
from .types import (
    MAX_LEVELS,
    ArcsDontFit,
    CounterexampleError,
    EnumerationTooLarge,
    SeriesEstimate,
    SupEstimate,
    TruncatedExample,
)

__all__ = [
    "MAX_LEVELS",
    "ArcsDontFit",
    "CounterexampleError",
    "EnumerationTooLarge",
    "SeriesEstimate",
    "SupEstimate",
    "TruncatedExample",
    "bounded_sup_estimate",
    "build_truncated_example",
    "check_construction",
    "conditional_expectation",
    "contrast",
    "describe",
    "divergent_series_estimate",
    "exact_sup_value",
    "observable_value",
    "symmetric_difference",
]
