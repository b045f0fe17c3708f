"""Counterexample types - the truncated rotation x Rademacher example and its estimates."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any


# Largest window N_K the CLI accepts (K = 6 with the default rules)
MAX_LEVELS = 6


class CounterexampleError(Exception):
    """Base exception for the truncated counterexample."""
    pass


class ArcsDontFit(CounterexampleError):
    """Raised when the arcs plus their gaps do not fit on the circle."""
    def __init__(self, total: float):
        super().__init__(f"Arcs and gaps need length {total!r} > 1")
        self.total = total


class EnumerationTooLarge(CounterexampleError):
    """Raised when exhaustive sign enumeration would exceed its cap."""
    def __init__(self, window: int, limit: int):
        super().__init__(f"Window {window} needs 2^{window} sign paths; limit is 2^{limit}")
        self.window = window
        self.limit = limit


@dataclass(frozen=True)
class TruncatedExample:
    """
    K levels of f = sum_k e_{-N_k} 1_{A_k} on circle x Rademacher.

    intervals[k-1] = (lo, hi) is arc A_k; the circle rotates by alpha.
    """
    K: int
    a: float
    rho: tuple[float, ...]
    N: tuple[int, ...]
    eps: tuple[float, ...]
    intervals: tuple[tuple[float, float], ...]
    alpha: float
    gap: float
    rademacher_seed: int = 0

    @property
    def window(self) -> int:
        return max(self.N)

    @property
    def lengths(self) -> tuple[float, ...]:
        return tuple(hi - lo for lo, hi in self.intervals)

    def to_dict(self) -> dict[str, Any]:
        return {
            "K": self.K,
            "a": self.a,
            "rho": list(self.rho),
            "N": list(self.N),
            "eps": list(self.eps),
            "intervals": [list(arc) for arc in self.intervals],
            "alpha": self.alpha,
            "gap": self.gap,
            "rademacher_seed": self.rademacher_seed,
        }


@dataclass(frozen=True, slots=True)
class SeriesEstimate:
    """sum_{i <= i_max} E|f E(X_i | F_0)| with its lower bound and epsilon budget."""
    value: float
    lower_bound: float
    error_budget: float
    i_max: int
    per_level: tuple[float, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": self.value,
            "lower_bound": self.lower_bound,
            "error_budget": self.error_budget,
            "i_max": self.i_max,
            "per_level": list(self.per_level),
        }


@dataclass(frozen=True, slots=True)
class SupEstimate:
    """Monte Carlo E sup_n |sum_{i<=n} E(X_i | F_0)| against its upper bound."""
    estimate: float
    standard_error: float
    upper_bound: float
    count: int

    @property
    def holds(self) -> bool:
        return self.estimate <= self.upper_bound + 3.0 * self.standard_error

    def to_dict(self) -> dict[str, Any]:
        return {
            "estimate": self.estimate,
            "standard_error": self.standard_error,
            "upper_bound": self.upper_bound,
            "count": self.count,
            "holds": self.holds,
        }
