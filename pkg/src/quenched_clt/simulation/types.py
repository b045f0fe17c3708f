"""Simulation types - sampled paths, ensemble summaries and streaming statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable

import numpy as np


DEFAULT_GRID: tuple[float, ...] = (0.25, 0.5, 0.75, 1.0)


class SimulationError(Exception):
    """Base exception for Monte Carlo generation errors."""
    pass


class PathTooLong(SimulationError):
    """Raised when a full PathSample would exceed the configured length cap."""
    def __init__(self, n: int, cap: int):
        super().__init__(
            f"Path length {n} exceeds the PathSample cap of {cap}; use path_statistics instead"
        )
        self.n = n
        self.cap = cap


@dataclass(frozen=True, slots=True)
class SeedRecord:
    """(master seed, path index) pair a path's random stream is derived from."""
    master_seed: int
    path_index: int

    def to_dict(self) -> dict[str, int]:
        return {"master_seed": self.master_seed, "path_index": self.path_index}


def _frozen(array: Any, dtype: Any = float) -> np.ndarray:
    out = np.array(array, dtype=dtype)
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PathSample:
    """
    One trajectory under P^x with its martingale decomposition.

    Arrays indexed by k = 0..n hold the value after k steps (index 0 is the
    empty sum). `states` holds state positions xi_1 .. xi_{n+1}; xi_{n+1} is
    needed for the last martingale increment D_n = d(xi_n, xi_{n+1}).

    partial_sums  S_k = sum_{i<=k} f(xi_i)
    martingale    M_k = sum_{i<=k} D(xi_i, xi_{i+1})
    remainder     R_k = theta(xi_1) - theta(xi_{k+1}) + rbar_k
    rbar          rbar_k = sum_{i<=k} f_m(xi_i)
    theta_path    theta(xi_{k+1})
    """
    start_state: Hashable
    start_index: int
    n: int
    m: int
    states: np.ndarray
    partial_sums: np.ndarray
    martingale: np.ndarray
    remainder: np.ndarray
    rbar: np.ndarray
    theta_path: np.ndarray
    seed_record: SeedRecord

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", _frozen(self.states, np.int64))
        for name in ("partial_sums", "martingale", "remainder", "rbar", "theta_path"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    def decomposition_error(self) -> float:
        """Largest relative violation of S_k = M_k + theta(xi_1) - theta(xi_{k+1}) + rbar_k."""
        rebuilt = self.martingale + self.theta_path[0] - self.theta_path + self.rbar
        scale = np.maximum(1.0, np.abs(self.partial_sums))
        return float(np.max(np.abs(self.partial_sums - rebuilt) / scale))


@dataclass(frozen=True, eq=False)
class EnsembleSummary:
    """
    Per-path statistics of an ensemble, stored in path-index order.

    normalized_endpoints  S_n / sqrt(n)
    scaled_paths          S_[nt] / sqrt(n), one column per grid time
    max_stats             max_k |S_k| / sqrt(n)
    max_signed            max_k S_k / sqrt(n)
    max_rbar              max_k |rbar_k| / sqrt(n)
    rbar_endpoints        |rbar_n| / sqrt(n)
    start_states          start position of each path
    """
    n: int
    count: int
    m: int
    start: str
    grid: tuple[float, ...]
    normalized_endpoints: np.ndarray
    scaled_paths: np.ndarray
    max_stats: np.ndarray
    max_signed: np.ndarray
    max_rbar: np.ndarray
    rbar_endpoints: np.ndarray
    start_states: np.ndarray
    master_seed: int
    path_offset: int = 0

    def __post_init__(self) -> None:
        for name in (
            "normalized_endpoints", "scaled_paths", "max_stats", "max_signed",
            "max_rbar", "rbar_endpoints",
        ):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "start_states", _frozen(self.start_states, np.int64))

    def column(self, t: float) -> np.ndarray:
        """Scaled-path samples at grid time t."""
        for i, g in enumerate(self.grid):
            if abs(g - t) <= 1e-12:
                return self.scaled_paths[:, i]
        raise KeyError(f"t={t} is not on the ensemble grid {self.grid}")

    def aggregates(self) -> dict[str, Any]:
        endpoints = self.normalized_endpoints
        return {
            "n": self.n,
            "count": self.count,
            "m": self.m,
            "start": self.start,
            "master_seed": self.master_seed,
            "grid": list(self.grid),
            "endpoint_mean": float(endpoints.mean()),
            "endpoint_variance": float(endpoints.var(ddof=1)) if self.count > 1 else 0.0,
            "max_stat_mean": float(self.max_stats.mean()),
            "max_stat_sq_mean": float((self.max_stats**2).mean()),
            "max_rbar_mean": float(self.max_rbar.mean()),
            "grid_variance": [
                float(self.scaled_paths[:, i].var(ddof=1)) if self.count > 1 else 0.0
                for i in range(len(self.grid))
            ],
        }


@dataclass(frozen=True, eq=False)
class PathStatistics:
    """
    Streaming statistics of one long path; raw states are not kept.

    d_sq_grid[i] = sum_{k <= [n t_i]} D_k^2 for the requested grid times.
    """
    n: int
    start_index: int
    endpoint: float
    max_abs: float
    max_signed: float
    max_abs_rbar: float
    transition_counts: np.ndarray
    sum_d_sq: float
    grid: tuple[float, ...]
    d_sq_grid: np.ndarray
    seed_record: SeedRecord = field(default_factory=lambda: SeedRecord(0, 0))

    @property
    def visits(self) -> np.ndarray:
        return self.transition_counts.sum(axis=1)

    def empirical_rows(self) -> np.ndarray:
        visits = self.visits
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(visits[:, None] > 0, self.transition_counts / visits[:, None], 0.0)
