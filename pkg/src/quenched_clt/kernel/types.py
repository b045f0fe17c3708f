"""Kernel types - finite-state transition kernels and their analysis reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable

import numpy as np


# Dense representation soft cap
MAX_STATES = 10_000


class KernelError(Exception):
    """Base exception for kernel construction and analysis errors."""
    pass


class NonStochasticRow(KernelError):
    """Raised when a row has a negative entry or does not sum to one."""
    def __init__(self, row: int, row_sum: float, reason: str = "row sum"):
        super().__init__(f"Row {row} is not stochastic ({reason}; sum={row_sum!r})")
        self.row = row
        self.row_sum = row_sum


class NotErgodic(KernelError):
    """Raised when a kernel is reducible or periodic."""
    def __init__(self, message: str, irreducible: bool = False, period: int = 0):
        super().__init__(message)
        self.irreducible = irreducible
        self.period = period


class NoConvergence(KernelError):
    """Raised when power iteration hits its iteration cap."""
    pass


class ZeroTargetWeight(KernelError):
    """Raised when a Metropolis target assigns zero weight to a state."""
    def __init__(self, state: int):
        super().__init__(f"Target weight of state {state} is not strictly positive")
        self.state = state


class Disconnected(KernelError):
    """Raised when a random-walk weight graph is not connected."""
    def __init__(self, components: int):
        super().__init__(f"Weight graph has {components} connected components")
        self.components = components


class KernelTooLarge(KernelError):
    """Raised above the dense state-count cap."""
    pass


class UnknownState(KernelError):
    """Raised when a state label is not part of the kernel."""
    pass


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class MarkovKernel:
    """
    A validated finite-state transition kernel Q with its stationary law pi.

    Row x of `transition` is Q(x, .). Instances are immutable: arrays are
    read-only and every constructor validates eagerly, so downstream code can
    assume rows are stochastic, pi Q = pi and pi > 0.
    """
    states: tuple[Hashable, ...]
    transition: np.ndarray
    stationary: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "transition", _frozen(self.transition))
        object.__setattr__(self, "stationary", _frozen(self.stationary))

    @property
    def size(self) -> int:
        return len(self.states)

    def index_of(self, state: Hashable) -> int:
        """Position of a state label in the kernel's state order."""
        try:
            return self.states.index(state)
        except ValueError:
            raise UnknownState(f"Unknown state: {state!r}") from None

    def resolve(self, state: Hashable | int) -> int:
        """Accept either a state label or an integer position."""
        if state in self.states:
            return self.states.index(state)
        if isinstance(state, (int, np.integer)) and 0 <= int(state) < self.size:
            return int(state)
        raise UnknownState(f"Unknown state: {state!r}")

    def stationary_residual(self) -> float:
        """max_x |(pi Q)(x) - pi(x)|."""
        return float(np.max(np.abs(self.stationary @ self.transition - self.stationary)))

    def to_dict(self) -> dict[str, Any]:
        return {
            "states": [_jsonable(s) for s in self.states],
            "rows": self.transition.tolist(),
            "stationary": self.stationary.tolist(),
        }


@dataclass(frozen=True, slots=True)
class ErgodicityReport:
    """
    Ergodicity verdicts for a row table.

    spectral_gap_estimate is 1 - |lambda_2| for small kernels and a
    contraction-coefficient lower bound otherwise (see `gap_method`).
    """
    irreducible: bool
    aperiodic: bool
    period: int
    spectral_gap_estimate: float
    gap_method: str = "eigen"  # eigen | dobrushin | doeblin

    @property
    def ergodic(self) -> bool:
        return self.irreducible and self.aperiodic

    def to_dict(self) -> dict[str, Any]:
        return {
            "irreducible": self.irreducible,
            "aperiodic": self.aperiodic,
            "period": self.period,
            "spectral_gap_estimate": self.spectral_gap_estimate,
            "gap_method": self.gap_method,
        }


@dataclass(frozen=True, slots=True)
class ReversibilityCheck:
    """Detailed-balance verdict with the largest violation found."""
    reversible: bool
    max_violation: float
    tolerance: float = field(default=1e-12)

    def __bool__(self) -> bool:
        return self.reversible


def _jsonable(state: Hashable) -> Any:
    if isinstance(state, (np.integer,)):
        return int(state)
    if isinstance(state, (str, int, float, bool)) or state is None:
        return state
    return str(state)
