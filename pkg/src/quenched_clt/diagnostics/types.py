"""Diagnostics types - condition reports, bound checks and normality tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np


class DiagnosticsError(Exception):
    """Base exception for condition and inequality evaluation errors."""
    pass


class TooLargeForExact(DiagnosticsError):
    """Raised when exact path enumeration is requested beyond its limits."""
    def __init__(self, n: int, paths: int, limit: int):
        super().__init__(f"Exact enumeration of {paths} paths (n={n}) exceeds the limit of {limit}")
        self.n = n
        self.paths = paths
        self.limit = limit


class QuantileDomainError(DiagnosticsError):
    """Raised when a quantile argument falls outside [0, 1]."""
    def __init__(self, u: float):
        super().__init__(f"Quantile argument must lie in [0, 1], got {u!r}")
        self.u = u


class ConditionId(str, Enum):
    """Sufficient conditions that have an evaluator."""
    NEGL_CLT = "NEGL_CLT"        # endpoint remainder negligibility
    NEGL_FCLT = "NEGL_FCLT"      # maximal remainder negligibility
    UI_FMGF = "UI_FMGF"          # uniform integrability of f_m g_f
    STRONG = "STRONG"            # sum_j E|Q^m f Q^j f| -> 0
    LQ_GF = "LQ_GF"              # g_f in L_q
    COBOUNDARY = "COBOUNDARY"    # f = (I - Q) h
    PROJECTIVE = "PROJECTIVE"    # sum_j E|f Q^j f| < inf
    CONJ_DR = "CONJ_DR"          # f sum Q^j f convergent in L_1
    CONJ_KV = "CONJ_KV"          # E(f sum Q^j f) convergent
    MIXING_RIO = "MIXING_RIO"    # sum_j int_0^alpha_j q^2 < inf


class Verdict(str, Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


def _finite(value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise DiagnosticsError(f"Report values must be finite, got {value!r}")
    return value


@dataclass(frozen=True)
class ConditionReport:
    """
    Numeric evaluation of one sufficient condition.

    `sequence` holds (index, value) pairs; what the index means (m, n or j)
    is stated in `index_name`. Verdicts are finite-sample: each evaluator
    documents its rule and records the thresholds it used in `tolerances`.
    """
    condition_id: ConditionId
    sequence: tuple[tuple[float, float], ...]
    verdict: Verdict
    tolerances: dict[str, float] = field(default_factory=dict)
    index_name: str = "m"
    notes: tuple[str, ...] = ()
    extra: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "sequence", tuple((_finite(i), _finite(v)) for i, v in self.sequence)
        )

    @property
    def values(self) -> list[float]:
        return [v for _, v in self.sequence]

    @property
    def last(self) -> float:
        return self.sequence[-1][1] if self.sequence else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "condition_id": self.condition_id.value,
            "verdict": self.verdict.value,
            "index_name": self.index_name,
            "sequence": [[i, v] for i, v in self.sequence],
            "tolerances": dict(self.tolerances),
            "notes": list(self.notes),
            "extra": _jsonable(self.extra),
        }


@dataclass(frozen=True, slots=True)
class QuantileFunction:
    """
    Right-continuous, nonincreasing step function q on [0, 1].

    q(u) = values[i] for knots[i] <= u < knots[i + 1]; q(u) = 0 from the last
    knot on.
    """
    knots: tuple[float, ...]
    values: tuple[float, ...]

    def __call__(self, u: float) -> float:
        if not 0.0 <= u <= 1.0:
            raise QuantileDomainError(u)
        for i, value in enumerate(self.values):
            if self.knots[i] <= u < self.knots[i + 1]:
                return value
        return 0.0

    def integral_sq(self, u: float) -> float:
        """int_0^u q(s)^2 ds, piecewise exact."""
        if not 0.0 <= u <= 1.0:
            raise QuantileDomainError(u)
        total = 0.0
        for i, value in enumerate(self.values):
            lo, hi = self.knots[i], self.knots[i + 1]
            if u <= lo:
                break
            total += value * value * (min(u, hi) - lo)
        return total

    def to_dict(self) -> dict[str, Any]:
        return {"knots": list(self.knots), "values": list(self.values)}


@dataclass(frozen=True)
class MixingProfile:
    """alpha_bar_k for k = 1..len, the quantile function of |f| and int_0^{alpha_bar_k} q^2."""
    alpha_bar: tuple[float, ...]
    quantile: QuantileFunction
    integrals: tuple[float, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "alpha_bar": list(self.alpha_bar),
            "quantile": self.quantile.to_dict(),
            "integrals": list(self.integrals),
        }


@dataclass(frozen=True, slots=True)
class BoundCheck:
    """An inequality lhs <= rhs; Monte Carlo checks carry a standard error."""
    lhs: float
    rhs: float
    holds: bool
    mode: str = "exact"  # exact | monte_carlo
    standard_error: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "lhs": self.lhs,
            "rhs": self.rhs,
            "holds": self.holds,
            "mode": self.mode,
            "standard_error": self.standard_error,
        }


@dataclass(frozen=True)
class MaximalBoundReport:
    """Monte Carlo E^x(max_k S_k^2)/n per horizon against the bound 24 E_pi|f g_f|."""
    n_grid: tuple[int, ...]
    estimates: tuple[float, ...]
    standard_errors: tuple[float, ...]
    bound: float
    holds: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "n_grid": list(self.n_grid),
            "estimates": list(self.estimates),
            "standard_errors": list(self.standard_errors),
            "bound": self.bound,
            "holds": self.holds,
        }


@dataclass(frozen=True, slots=True)
class NormalityTest:
    """One-sample KS test against N(0, sigma^2), or the concentration test when sigma = 0."""
    ks_distance: float
    critical: float
    passed: bool
    degenerate: bool = False
    count: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "ks_distance": self.ks_distance,
            "critical": self.critical,
            "passed": self.passed,
            "degenerate": self.degenerate,
            "count": self.count,
        }


@dataclass(frozen=True)
class FcltReport:
    """Per-time marginals, increment decorrelation and the sup functional of one ensemble."""
    marginals: dict[float, NormalityTest]
    increment_correlation: float
    correlation_limit: float
    sup_probability: float
    sup_target: float
    sup_tolerance: float

    @property
    def increments_ok(self) -> bool:
        return abs(self.increment_correlation) <= self.correlation_limit

    @property
    def sup_ok(self) -> bool:
        return abs(self.sup_probability - self.sup_target) <= self.sup_tolerance

    @property
    def passed(self) -> bool:
        return all(t.passed for t in self.marginals.values()) and self.increments_ok and self.sup_ok

    def to_dict(self) -> dict[str, Any]:
        return {
            "marginals": {repr(t): test.to_dict() for t, test in self.marginals.items()},
            "increment_correlation": self.increment_correlation,
            "correlation_limit": self.correlation_limit,
            "sup_probability": self.sup_probability,
            "sup_target": self.sup_target,
            "sup_tolerance": self.sup_tolerance,
            "passed": self.passed,
        }


@dataclass(frozen=True, slots=True)
class TwoSampleTest:
    """Two-sample KS comparison of endpoint distributions."""
    ks_distance: float
    critical: float
    passed: bool
    sizes: tuple[int, int]

    def to_dict(self) -> dict[str, Any]:
        return {
            "ks_distance": self.ks_distance,
            "critical": self.critical,
            "passed": self.passed,
            "sizes": list(self.sizes),
        }


@dataclass(frozen=True, slots=True)
class AverageCheck:
    """An ergodic average against its limit."""
    average: float
    limit: float
    gap: float

    def to_dict(self) -> dict[str, Any]:
        return {"average": self.average, "limit": self.limit, "gap": self.gap}


@dataclass(frozen=True)
class MartingaleAverageCheck:
    """(1/n) sum_{k <= [nt]} D_k^2 along one path against t sigma_m^2."""
    grid: tuple[float, ...]
    averages: tuple[float, ...]
    targets: tuple[float, ...]
    sigma_m_sq: float

    @property
    def relative_errors(self) -> tuple[float, ...]:
        return tuple(
            abs(a - t) / t if t > 0 else abs(a)
            for a, t in zip(self.averages, self.targets)
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "grid": list(self.grid),
            "averages": list(self.averages),
            "targets": list(self.targets),
            "sigma_m_sq": self.sigma_m_sq,
            "relative_errors": list(self.relative_errors),
        }


@dataclass(frozen=True)
class TransitionFrequencyCheck:
    """Empirical transition rows of one long path against Q."""
    empirical: np.ndarray
    visits: np.ndarray
    max_deviation: float
    max_z: float
    passed: bool

    def to_dict(self) -> dict[str, Any]:
        return {
            "empirical": self.empirical.tolist(),
            "visits": self.visits.tolist(),
            "max_deviation": self.max_deviation,
            "max_z": self.max_z,
            "passed": self.passed,
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, Enum):
        return value.value
    return value
