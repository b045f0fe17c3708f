"""Single-path sampling under P^x."""

from __future__ import annotations

import logging
from typing import Any, Hashable, Sequence

import numpy as np

from ..kernel.types import MarkovKernel
from ..operators.types import MartingaleScheme, Observable
from .engine import ChainEngine, grid_steps
from .seeding import open_uniforms, path_generator
from .types import DEFAULT_GRID, PathSample, PathStatistics, PathTooLong, SeedRecord, SimulationError


logger = logging.getLogger(__name__)

MAX_PATH_LENGTH = 2_000_000
STREAM_BLOCK = 4096


def _seed_record(seed: SeedRecord | tuple[int, int] | int) -> SeedRecord:
    if isinstance(seed, SeedRecord):
        return seed
    if isinstance(seed, tuple):
        return SeedRecord(int(seed[0]), int(seed[1]))
    return SeedRecord(int(seed), 0)


def observable_values(f: Observable | Any) -> np.ndarray:
    return f.values if isinstance(f, Observable) else np.asarray(f, dtype=float)


def _check_horizon(n: int) -> None:
    if n < 1:
        raise SimulationError(f"Horizon n must be at least 1, got {n}")


def sample_path(
    kernel: MarkovKernel,
    f: Observable | Any,
    scheme: MartingaleScheme,
    start: Hashable,
    n: int,
    seed: SeedRecord | tuple[int, int] | int,
    *,
    engine: ChainEngine | None = None,
    max_path_length: int = MAX_PATH_LENGTH,
) -> PathSample:
    """
    One trajectory from `start` with partial sums and the martingale decomposition.

    Draws n + 1 uniforms from the path's stream to produce xi_1 .. xi_{n+1}.
    Deterministic in (kernel, f, m, start, n, seed).

    Raises:
        PathTooLong: If n exceeds max_path_length (use path_statistics)
    """
    _check_horizon(n)
    if n > max_path_length:
        raise PathTooLong(n, max_path_length)
    record = _seed_record(seed)
    x = kernel.resolve(start)
    engine = engine or ChainEngine(kernel)

    rng = path_generator(record.master_seed, record.path_index)
    states = engine.walk(x, open_uniforms(rng, n + 1))
    visited, following = states[:n], states[1:]

    values = observable_values(f)
    zero = np.zeros(1)
    partial_sums = np.concatenate([zero, np.cumsum(values[visited])])
    martingale = np.concatenate([zero, np.cumsum(scheme.d_table[visited, following])])
    rbar = np.concatenate([zero, np.cumsum(scheme.f_m.values[visited])])
    theta_path = scheme.theta.values[states]
    remainder = theta_path[0] - theta_path + rbar

    return PathSample(
        start_state=kernel.states[x],
        start_index=x,
        n=n,
        m=scheme.m,
        states=states,
        partial_sums=partial_sums,
        martingale=martingale,
        remainder=remainder,
        rbar=rbar,
        theta_path=theta_path,
        seed_record=record,
    )


def check_grid(grid: Sequence[float]) -> tuple[float, ...]:
    values = tuple(float(t) for t in grid)
    if any(t < 0.0 or t > 1.0 for t in values):
        raise ValueError(f"Grid times must lie in [0, 1], got {values}")
    if any(b < a for a, b in zip(values, values[1:])):
        raise ValueError(f"Grid must be sorted, got {values}")
    return values


def scaled_path(sample: PathSample, grid: Sequence[float]) -> np.ndarray:
    """S_[nt] / sqrt(n) for each t in the grid."""
    steps = grid_steps(sample.n, check_grid(grid))
    return sample.partial_sums[steps] / np.sqrt(sample.n)


_SERIES = {
    "partial_sums": "partial_sums",
    "S": "partial_sums",
    "rbar": "rbar",
    "martingale": "martingale",
    "M": "martingale",
    "remainder": "remainder",
    "R": "remainder",
}


def max_abs_partial_sum(sample: PathSample, which: str = "partial_sums") -> float:
    """max_{1<=k<=n} |Z_k| / sqrt(n) for Z = S (default), rbar, M or R."""
    try:
        series = getattr(sample, _SERIES[which])
    except KeyError:
        raise ValueError(f"Unknown series '{which}' (expected one of {sorted(_SERIES)})") from None
    return float(np.max(np.abs(series[1:]))) / np.sqrt(sample.n)


def path_statistics(
    kernel: MarkovKernel,
    f: Observable | Any,
    scheme: MartingaleScheme,
    start: Hashable,
    n: int,
    seed: SeedRecord | tuple[int, int] | int,
    *,
    grid: Sequence[float] = DEFAULT_GRID,
    block_length: int = STREAM_BLOCK,
) -> PathStatistics:
    """
    Streaming statistics of a long path without keeping its states.

    Uses the same stream as sample_path, so for equal seeds the statistics
    describe the same trajectory.
    """
    _check_horizon(n)
    record = _seed_record(seed)
    grid = check_grid(grid)
    steps = grid_steps(n, grid)
    x = kernel.resolve(start)
    engine = ChainEngine(kernel)
    rng = path_generator(record.master_seed, record.path_index)

    values = observable_values(f)
    fm = scheme.f_m.values
    d_table = scheme.d_table
    counts = np.zeros((kernel.size, kernel.size), dtype=np.int64)

    s_total = r_total = d_total = 0.0
    max_abs = max_abs_rbar = 0.0
    max_signed = -np.inf
    d_sq_grid = np.zeros(steps.shape[0])

    prev = x
    first = 1  # global index of the first state in the block
    total_states = n + 1
    while first <= total_states:
        length = min(block_length, total_states - first + 1)
        block = engine.walk(prev, open_uniforms(rng, length))
        seq = np.concatenate([[prev], block])
        np.add.at(counts, (seq[:-1], seq[1:]), 1)

        # X and rbar use xi_1 .. xi_n
        keep = min(length, n - first + 1)
        if keep > 0:
            visited = block[:keep]
            sums = np.cumsum(np.concatenate([[s_total], values[visited]]))[1:]
            rbar = np.cumsum(np.concatenate([[r_total], fm[visited]]))[1:]
            max_abs = max(max_abs, float(np.abs(sums).max()))
            max_signed = max(max_signed, float(sums.max()))
            max_abs_rbar = max(max_abs_rbar, float(np.abs(rbar).max()))
            s_total, r_total = float(sums[-1]), float(rbar[-1])

        # pair i of seq is (xi_k, xi_{k+1}) with k = first - 1 + i; D_k for 1 <= k <= n
        lo = 1 if first == 1 else 0
        hi = min(length, n - first + 2)
        if hi > lo:
            d_sq = d_table[seq[lo:hi], seq[lo + 1:hi + 1]] ** 2
            d_cum = np.cumsum(np.concatenate([[d_total], d_sq]))[1:]
            k_lo = first - 1 + lo
            in_block = (steps >= k_lo) & (steps < k_lo + d_cum.shape[0])
            for gi in np.flatnonzero(in_block):
                d_sq_grid[gi] = d_cum[steps[gi] - k_lo]
            d_total = float(d_cum[-1])

        prev = int(block[-1])
        first += length

    return PathStatistics(
        n=n,
        start_index=x,
        endpoint=s_total,
        max_abs=max_abs,
        max_signed=max_signed,
        max_abs_rbar=max_abs_rbar,
        transition_counts=counts,
        sum_d_sq=d_total,
        grid=grid,
        d_sq_grid=d_sq_grid,
        seed_record=record,
    )
