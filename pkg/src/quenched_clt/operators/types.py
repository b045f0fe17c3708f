"""Operator types - observables, martingale schemes and variance reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np


CENTERING_TOLERANCE = 1e-12


class OperatorError(Exception):
    """Base exception for Markov-operator computations."""
    pass


class NotCentered(OperatorError):
    """Raised when an operation needing E_pi f = 0 gets an uncentered observable."""
    def __init__(self, mean: float):
        super().__init__(f"Observable is not centered under pi (mean={mean!r})")
        self.mean = mean


class NoGeometricCertificate(OperatorError):
    """Raised when a series tail cannot be bounded within the iteration cap."""
    def __init__(self, terms: int, last_ratio: float):
        super().__init__(
            f"No geometric tail certificate after {terms} terms (last ratio {last_ratio:.6g})"
        )
        self.terms = terms
        self.last_ratio = last_ratio


class SolveFailed(OperatorError):
    """Raised when the Poisson equation cannot be solved to tolerance."""
    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class NegativeVariance(OperatorError):
    """Raised when a computed variance is negative beyond the clamp tolerance."""
    def __init__(self, value: float, clamp: float):
        super().__init__(f"Variance {value!r} is below -{clamp}")
        self.value = value
        self.clamp = clamp


def _frozen(values: Any) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class Observable:
    """
    A real value per state, aligned with the kernel's state order.

    `mean_under_pi` is cached at construction; use `Observable.of` to compute
    it from a kernel.
    """
    values: np.ndarray
    mean_under_pi: float

    def __post_init__(self) -> None:
        values = _frozen(self.values)
        if values.ndim != 1:
            raise OperatorError(f"Observable must be one-dimensional, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise OperatorError("Observable contains non-finite values")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "mean_under_pi", float(self.mean_under_pi))

    @classmethod
    def of(cls, values: Any, stationary: np.ndarray) -> Observable:
        array = np.asarray(values, dtype=float)
        if array.shape != stationary.shape:
            raise OperatorError(
                f"Observable has {array.shape[0] if array.ndim else 0} values, kernel has {stationary.shape[0]} states"
            )
        return cls(values=array, mean_under_pi=float(stationary @ array))

    @property
    def centered(self) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.values), initial=0.0)))
        return abs(self.mean_under_pi) <= CENTERING_TOLERANCE * scale

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values), initial=0.0))

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def to_list(self) -> list[float]:
        return self.values.tolist()


@dataclass(frozen=True, eq=False)
class MartingaleScheme:
    """
    The martingale approximation at a fixed m.

    theta = (1/m) sum_{k=1..m} v_k, d_table[x, y] = theta(y) - (Q theta)(x) and
    sigma_m_sq = sum_{x,y} pi(x) Q(x,y) d_table[x, y]^2. `f_m` and `q_theta`
    are carried along because paths need them for the remainder terms.
    """
    m: int
    theta: Observable
    d_table: np.ndarray
    sigma_m_sq: float
    f_m: Observable
    q_theta: Observable

    def __post_init__(self) -> None:
        object.__setattr__(self, "d_table", _frozen(self.d_table))

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "theta": self.theta.to_list(),
            "f_m": self.f_m.to_list(),
            "sigma_m_sq": self.sigma_m_sq,
        }


@dataclass(frozen=True)
class VarianceReport:
    """sigma^2 = E f^2 + 2 sum_{j=1..truncation_j} E(f Q^j f) + declared tail."""
    sigma_sq: float
    series_terms: tuple[float, ...]
    truncation_j: int
    tail_bound: float
    clamped: bool = False
    raw_value: float = field(default=0.0)

    def to_dict(self) -> dict[str, Any]:
        return {
            "sigma_sq": self.sigma_sq,
            "truncation_j": self.truncation_j,
            "tail_bound": self.tail_bound,
            "clamped": self.clamped,
            "raw_value": self.raw_value,
            "series_terms_head": list(self.series_terms[:32]),
        }
