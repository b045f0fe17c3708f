"""
Construction of the truncated counterexample.

The ambient system is the circle [0, 1) rotated by alpha, times an i.i.d.
Rademacher sequence (e_i). Level k contributes e_{-N_k} on the arc A_k:

    f(c, e) = sum_{k <= K} e_{-N_k} 1_{A_k}(c)

Arcs are left-packed with a gap of alpha * max N_k before each arc, so an arc
rotated back by up to max N_k steps never reaches its left neighbour.
"""

from __future__ import annotations

import logging
import math
from typing import Any, Callable

import numpy as np

from .types import ArcsDontFit, CounterexampleError, TruncatedExample


logger = logging.getLogger(__name__)

NON_ERGODIC_NOTE = (
    "Rational rotation at finite K: the system is not ergodic; the reported "
    "numbers are the finite sums and expectations of the construction only."
)

WindowRule = Callable[[int, float], int]
EpsilonRule = Callable[[int, float], float]


def default_window(k: int, rho: float) -> int:
    """N_k = 1 / rho_k (4^k for a = 1/4)."""
    return int(round(1.0 / rho))


def default_epsilon(k: int, rho: float) -> float:
    """eps_k = rho_k^(3/2) (8^-k for a = 1/4)."""
    return rho * math.sqrt(rho)


def build_truncated_example(
    K: int,
    a: float = 0.25,
    n_rule: WindowRule = default_window,
    eps_rule: EpsilonRule = default_epsilon,
    seed: int = 0,
) -> TruncatedExample:
    """
    Build K levels with rho_k = a^k, arcs of length exactly rho_k and
    alpha = min_k eps_k / (2 N_k).

    Raises:
        CounterexampleError: If K < 1, a is outside (0, 1) or a rule gives a bad value
        ArcsDontFit: If the arcs and their gaps exceed the circle
    """
    if K < 1:
        raise CounterexampleError(f"K must be at least 1, got {K}")
    if not 0.0 < a < 1.0:
        raise CounterexampleError(f"Base a must lie in (0, 1), got {a}")

    rho = tuple(a**k for k in range(1, K + 1))
    windows = tuple(int(n_rule(k, r)) for k, r in zip(range(1, K + 1), rho))
    eps = tuple(float(eps_rule(k, r)) for k, r in zip(range(1, K + 1), rho))
    if any(n < 1 for n in windows) or any(e <= 0.0 for e in eps):
        raise CounterexampleError(f"Rules must give N_k >= 1 and eps_k > 0, got N={windows}, eps={eps}")

    alpha = min(e / (2.0 * n) for e, n in zip(eps, windows))
    gap = alpha * max(windows)
    total = sum(rho) + K * gap
    if total >= 1.0:
        raise ArcsDontFit(total)

    intervals = []
    cursor = 0.0
    for length in rho:
        lo = cursor + gap
        intervals.append((lo, lo + length))
        cursor = lo + length

    example = TruncatedExample(
        K=K,
        a=a,
        rho=rho,
        N=windows,
        eps=eps,
        intervals=tuple(intervals),
        alpha=alpha,
        gap=gap,
        rademacher_seed=seed,
    )
    logger.debug(f"Built truncated example K={K} alpha={alpha!r} window={example.window}")
    return example


def _in_arc(points: np.ndarray, arc: tuple[float, float]) -> np.ndarray:
    lo, hi = arc
    return (points >= lo) & (points < hi)


def observable_value(example: TruncatedExample, c: np.ndarray, history: np.ndarray) -> np.ndarray:
    """
    f(c, e) for circle points c and sign histories; history[:, j] = e_{-j}.
    """
    c = np.asarray(c, dtype=float)
    history = np.asarray(history)
    out = np.zeros(c.shape[0])
    for n, arc in zip(example.N, example.intervals):
        out += history[:, n] * _in_arc(c, arc)
    return out


def conditional_expectation(
    example: TruncatedExample, i: int
) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    """
    E(X_i | F_0) = sum_k e_{i - N_k} 1_{i <= N_k} 1_{A_k}(c + i alpha).

    Returns a vectorized function of (c, history) with history[:, j] = e_{-j}
    for j = 0..max N_k; only indices i - N_k <= 0 are read.
    """
    if i < 1:
        raise CounterexampleError(f"Lag must be at least 1, got {i}")
    levels = [(n, arc) for n, arc in zip(example.N, example.intervals) if i <= n]
    shift = i * example.alpha

    def evaluate(c: np.ndarray, history: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        history = np.asarray(history)
        out = np.zeros(c.shape[0])
        if not levels:
            return out
        rotated = np.mod(c + shift, 1.0)
        for n, arc in levels:
            out += history[:, n - i] * _in_arc(rotated, arc)
        return out

    return evaluate


def overlap(first: tuple[float, float], second: tuple[float, float], shift: float) -> float:
    """Lebesgue measure of first intersected with (second - shift) on the circle."""
    lo, hi = second
    length = hi - lo
    start = (lo - shift) % 1.0
    pieces = [(start, min(start + length, 1.0))]
    if start + length > 1.0:
        pieces.append((0.0, start + length - 1.0))
    total = 0.0
    for p_lo, p_hi in pieces:
        total += max(0.0, min(first[1], p_hi) - max(first[0], p_lo))
    return total


def symmetric_difference(example: TruncatedExample, k: int, i: int, j: int) -> float:
    """Measure of (T^-i A_k) symmetric-difference (T^-j A_k)."""
    lo, hi = example.intervals[k - 1]
    length = hi - lo
    return 2.0 * min(length, abs(i - j) * example.alpha)


def check_construction(example: TruncatedExample) -> dict[str, Any]:
    """
    Direct interval checks of the construction.

    Returns the worst symmetric-difference ratio per level (must be <= 1),
    whether arcs are disjoint, and the total arc length.
    """
    ratios = []
    for k in range(1, example.K + 1):
        n = example.N[k - 1]
        # the symmetric difference is largest at |i - j| = N_k
        ratios.append(symmetric_difference(example, k, 0, n) / example.eps[k - 1])
    disjoint = all(
        example.intervals[p][1] <= example.intervals[p + 1][0] for p in range(example.K - 1)
    )
    lengths_ok = all(
        (2.0 / 3.0) * r <= length <= r + 1e-15 for r, length in zip(example.rho, example.lengths)
    )
    return {
        "difference_ratios": ratios,
        "differences_ok": all(r <= 1.0 + 1e-12 for r in ratios),
        "disjoint": disjoint,
        "lengths_ok": lengths_ok,
        "total_length": float(sum(example.lengths)),
    }


def describe(example: TruncatedExample) -> dict[str, Any]:
    """JSON descriptor of the example and its construction checks."""
    return {
        "example": example.to_dict(),
        "checks": check_construction(example),
        "note": NON_ERGODIC_NOTE,
    }
