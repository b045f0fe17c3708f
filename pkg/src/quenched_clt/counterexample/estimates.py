"""Estimates - the divergent series, the bounded maximal function and their contrast."""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any

import numpy as np

from ..simulation.seeding import path_generator
from .construction import NON_ERGODIC_NOTE, build_truncated_example, conditional_expectation, overlap
from .types import (
    MAX_LEVELS,
    CounterexampleError,
    EnumerationTooLarge,
    SeriesEstimate,
    SupEstimate,
    TruncatedExample,
)


logger = logging.getLogger(__name__)

MIN_DRAWS = 1000
DRAW_BATCH = 1000
ENUMERATION_LIMIT = 16


def divergent_series_estimate(example: TruncatedExample, i_max: int | None = None) -> SeriesEstimate:
    """
    sum_{i <= i_max} E|f E(X_i | F_0)| by interval arithmetic.

    A rotated point c + i alpha lies in at most one arc, so
    |E(X_i | F_0)| = sum_k 1_{i <= N_k} 1_{A_k}(c + i alpha) and each term is a
    sum of arc overlaps.
    """
    window = example.window
    i_max = window if i_max is None else i_max
    if i_max < window:
        raise CounterexampleError(f"i_max must be at least max N_k = {window}, got {i_max}")

    per_level = [0.0] * example.K
    # terms with i > max N_k vanish
    for i in range(1, window + 1):
        shift = i * example.alpha
        for k, (n, arc) in enumerate(zip(example.N, example.intervals)):
            if i > n:
                continue
            per_level[k] += sum(overlap(first, arc, shift) for first in example.intervals)

    budget = sum(n * e for n, e in zip(example.N, example.eps))
    lower = sum(n * length for n, length in zip(example.N, example.lengths)) - budget
    return SeriesEstimate(
        value=float(sum(per_level)),
        lower_bound=lower,
        error_budget=budget,
        i_max=i_max,
        per_level=tuple(per_level),
    )


def sup_upper_bound(example: TruncatedExample) -> float:
    """sum_k sqrt(N_k) rho_k + sum_k N_k eps_k."""
    return sum(math.sqrt(n) * r for n, r in zip(example.N, example.rho)) + sum(
        n * e for n, e in zip(example.N, example.eps)
    )


def _running_sup(example: TruncatedExample, c: np.ndarray, history: np.ndarray) -> np.ndarray:
    """sup_{n <= max N_k} |sum_{i <= n} E(X_i | F_0)| per draw."""
    total = np.zeros(c.shape[0])
    best = np.zeros(c.shape[0])
    for i in range(1, example.window + 1):
        total += conditional_expectation(example, i)(c, history)
        np.maximum(best, np.abs(total), out=best)
    return best


def _draw_batch(example: TruncatedExample, seed: int, batch: int, size: int) -> np.ndarray:
    rng = path_generator(seed, batch)
    c = rng.random(size)
    history = (2 * rng.integers(0, 2, size=(size, example.window + 1)) - 1).astype(np.int8)
    return _running_sup(example, c, history)


def bounded_sup_estimate(
    example: TruncatedExample,
    count: int = 10_000,
    seed: int | None = None,
    *,
    threads: int = 1,
) -> SupEstimate:
    """
    Monte Carlo E sup_n |sum_{i <= n} E(X_i | F_0)| over uniform circle points
    and Rademacher histories.

    Draws come in batches of 1000, batch b from the stream (seed, b), so the
    estimate does not depend on the thread count.
    """
    if count < MIN_DRAWS:
        raise CounterexampleError(f"count must be at least {MIN_DRAWS}, got {count}")
    seed = example.rademacher_seed if seed is None else seed
    batches = [(b, min(DRAW_BATCH, count - b * DRAW_BATCH)) for b in range(math.ceil(count / DRAW_BATCH))]

    def work(spec: tuple[int, int]) -> np.ndarray:
        return _draw_batch(example, seed, *spec)

    if threads <= 1 or len(batches) == 1:
        parts = [work(spec) for spec in batches]
    else:
        with ThreadPoolExecutor(max_workers=threads) as executor:
            parts = list(executor.map(work, batches))

    samples = np.concatenate(parts)
    return SupEstimate(
        estimate=float(samples.mean()),
        standard_error=float(samples.std(ddof=1) / math.sqrt(count)),
        upper_bound=sup_upper_bound(example),
        count=count,
    )


def exact_sup_value(example: TruncatedExample, limit: int = ENUMERATION_LIMIT) -> float:
    """
    E sup_n |sum_{i <= n} E(X_i | F_0)| exactly, by cutting the circle where
    some rotated arc starts or ends and enumerating every sign history on
    each cell. Feasible for small windows only (K = 1 with the default rules).

    Raises:
        EnumerationTooLarge: If max N_k exceeds `limit`
    """
    window = example.window
    if window > limit:
        raise EnumerationTooLarge(window, limit)

    cuts = {0.0, 1.0}
    for i in range(1, window + 1):
        for n, (lo, hi) in zip(example.N, example.intervals):
            if i <= n:
                cuts.add((lo - i * example.alpha) % 1.0)
                cuts.add((hi - i * example.alpha) % 1.0)
    points = sorted(cuts)

    # e_{-j} for j < window is free; column `window` is never read
    signs = np.array(list(itertools.product((-1, 1), repeat=window)), dtype=np.int8)
    history = np.hstack([signs, np.ones((signs.shape[0], 1), dtype=np.int8)])

    value = 0.0
    for lo, hi in zip(points[:-1], points[1:]):
        if hi - lo <= 0.0:
            continue
        c = np.full(history.shape[0], 0.5 * (lo + hi))
        value += (hi - lo) * float(_running_sup(example, c, history).mean())
    return value


def contrast(K: int, count: int, seed: int, *, a: float = 0.25, threads: int = 1) -> dict[str, Any]:
    """
    Divergent-series values for every level 1..K next to the bounded-sup
    estimate at K.
    """
    if not 1 <= K <= MAX_LEVELS:
        raise CounterexampleError(f"K must lie in [1, {MAX_LEVELS}], got {K}")
    levels = []
    for level in range(1, K + 1):
        example = build_truncated_example(level, a=a, seed=seed)
        series = divergent_series_estimate(example)
        levels.append({"K": level, "alpha": example.alpha, **series.to_dict()})
        logger.debug(f"Level {level}: series {series.value:.6f} >= {series.lower_bound:.6f}")

    example = build_truncated_example(K, a=a, seed=seed)
    sup = bounded_sup_estimate(example, count, seed, threads=threads)
    logger.info(
        f"Counterexample K={K}: series {levels[-1]['value']:.4f}, "
        f"sup {sup.estimate:.4f} +/- {sup.standard_error:.4f} (bound {sup.upper_bound:.4f})"
    )
    return {
        "K": K,
        "series": levels,
        "sup": sup.to_dict(),
        "note": NON_ERGODIC_NOTE,
    }
