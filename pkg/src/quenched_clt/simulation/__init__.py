"""Reproducible Monte Carlo paths under P^x and P^pi."""

from .engine import ChainEngine, grid_steps
from .ensemble import annealed_ensemble, quenched_by_state, quenched_ensemble
from .sampler import max_abs_partial_sum, path_statistics, sample_path, scaled_path
from .seeding import path_generator, path_key
from .serializer import EnsembleSerializer
from .types import (
    DEFAULT_GRID,
    EnsembleSummary,
    PathSample,
    PathStatistics,
    PathTooLong,
    SeedRecord,
    SimulationError,
)

__all__ = [
    "DEFAULT_GRID",
    "ChainEngine",
    "EnsembleSerializer",
    "EnsembleSummary",
    "PathSample",
    "PathStatistics",
    "PathTooLong",
    "SeedRecord",
    "SimulationError",
    "annealed_ensemble",
    "grid_steps",
    "max_abs_partial_sum",
    "path_generator",
    "path_key",
    "path_statistics",
    "quenched_by_state",
    "quenched_ensemble",
    "sample_path",
    "scaled_path",
]
