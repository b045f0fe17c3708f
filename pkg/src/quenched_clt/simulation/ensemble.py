"""Quenched and annealed ensembles, run in parallel batches with per-path streams."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Hashable, Sequence

import numpy as np

from ..config import SimulationConfig
from ..kernel.types import MarkovKernel
from ..operators.calculus import martingale_scheme
from ..operators.types import MartingaleScheme, Observable
from .engine import BatchStatistics, ChainEngine, grid_steps
from .sampler import check_grid, observable_values
from .types import DEFAULT_GRID, EnsembleSummary, SimulationError


logger = logging.getLogger(__name__)


def _batches(count: int, batch_size: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + batch_size, count)) for lo in range(0, count, batch_size)]


def _run(
    kernel: MarkovKernel,
    f: Observable | Any,
    m: int,
    starts: np.ndarray | None,
    n: int,
    count: int,
    master_seed: int,
    grid: Sequence[float],
    config: SimulationConfig | None,
    threads: int | None,
    scheme: MartingaleScheme | None,
    path_offset: int,
    label: str,
) -> EnsembleSummary:
    if count < 1:
        raise SimulationError(f"Path count must be at least 1, got {count}")
    if n < 1:
        raise SimulationError(f"Horizon n must be at least 1, got {n}")
    config = config or SimulationConfig()
    workers = max(1, threads if threads is not None else config.threads)
    grid = check_grid(grid)
    steps = grid_steps(n, grid)
    scheme = scheme or martingale_scheme(kernel, f, m)
    values = observable_values(f)
    fm = scheme.f_m.values
    engine = ChainEngine(kernel)

    batch_size = max(1, config.batch_size)
    block_length = max(1, min(config.block_length, config.memory_cap_values // batch_size))
    indices = np.arange(path_offset, path_offset + count, dtype=np.int64)
    if starts is None:
        starts = np.array([engine.draw_start(master_seed, int(i)) for i in indices], dtype=np.int64)

    def work(bounds: tuple[int, int]) -> tuple[int, BatchStatistics]:
        lo, hi = bounds
        stats = engine.run_batch(
            starts[lo:hi], indices[lo:hi], master_seed, n, values, fm, steps, block_length
        )
        return lo, stats

    began = time.perf_counter()
    endpoints = np.empty(count)
    grid_values = np.empty((count, steps.shape[0]))
    max_abs = np.empty(count)
    max_signed = np.empty(count)
    max_rbar = np.empty(count)
    rbar_end = np.empty(count)

    batches = _batches(count, batch_size)
    if workers == 1 or len(batches) == 1:
        results = [work(b) for b in batches]
    else:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(work, batches))

    for lo, stats in results:
        hi = lo + stats.endpoints.shape[0]
        endpoints[lo:hi] = stats.endpoints
        grid_values[lo:hi] = stats.grid_values
        max_abs[lo:hi] = stats.max_abs
        max_signed[lo:hi] = stats.max_signed
        max_rbar[lo:hi] = stats.max_abs_rbar
        rbar_end[lo:hi] = stats.rbar_endpoints

    root_n = np.sqrt(n)
    summary = EnsembleSummary(
        n=n,
        count=count,
        m=scheme.m,
        start=label,
        grid=grid,
        normalized_endpoints=endpoints / root_n,
        scaled_paths=grid_values / root_n,
        max_stats=max_abs / root_n,
        max_signed=max_signed / root_n,
        max_rbar=max_rbar / root_n,
        rbar_endpoints=rbar_end / root_n,
        start_states=starts,
        master_seed=master_seed,
        path_offset=path_offset,
    )
    logger.info(
        f"Ensemble start={label} n={n} count={count} finished in "
        f"{time.perf_counter() - began:.2f}s ({workers} worker(s))"
    )
    return summary


def quenched_ensemble(
    kernel: MarkovKernel,
    f: Observable | Any,
    m: int,
    x: Hashable,
    n: int,
    count: int,
    master_seed: int,
    *,
    grid: Sequence[float] = DEFAULT_GRID,
    config: SimulationConfig | None = None,
    threads: int | None = None,
    scheme: MartingaleScheme | None = None,
    path_offset: int = 0,
) -> EnsembleSummary:
    """
    `count` independent paths started at x.

    Path i uses the stream of (master_seed, path_offset + i), so path i is the
    trajectory sample_path would give for that seed, whatever the thread count.
    """
    start = kernel.resolve(x)
    starts = np.full(count, start, dtype=np.int64)
    return _run(
        kernel, f, m, starts, n, count, master_seed, grid, config, threads, scheme,
        path_offset, label=str(kernel.states[start]),
    )


def annealed_ensemble(
    kernel: MarkovKernel,
    f: Observable | Any,
    m: int,
    n: int,
    count: int,
    master_seed: int,
    *,
    grid: Sequence[float] = DEFAULT_GRID,
    config: SimulationConfig | None = None,
    threads: int | None = None,
    scheme: MartingaleScheme | None = None,
    path_offset: int = 0,
) -> EnsembleSummary:
    """As quenched_ensemble, with each path's start drawn from pi on its own start stream."""
    return _run(
        kernel, f, m, None, n, count, master_seed, grid, config, threads, scheme,
        path_offset, label="pi",
    )


def quenched_by_state(
    kernel: MarkovKernel,
    f: Observable | Any,
    m: int,
    n: int,
    count: int,
    master_seed: int,
    *,
    grid: Sequence[float] = DEFAULT_GRID,
    config: SimulationConfig | None = None,
    threads: int | None = None,
) -> dict[Hashable, EnsembleSummary]:
    """
    A quenched ensemble for every state.

    State number s uses path indices s * count .. (s + 1) * count - 1, so the
    ensembles never share a stream.
    """
    scheme = martingale_scheme(kernel, f, m)
    return {
        label: quenched_ensemble(
            kernel, f, m, label, n, count, master_seed,
            grid=grid, config=config, threads=threads, scheme=scheme,
            path_offset=position * count,
        )
        for position, label in enumerate(kernel.states)
    }
