"""Corpus of canonical chains used by builder specs and tests."""

from __future__ import annotations

from typing import Any, Callable, Sequence

import numpy as np

from .builder import build_kernel, lazy, metropolis_kernel, random_walk_kernel
from .types import KernelError, MarkovKernel


def two_state(p: float = 0.3, q: float = 0.1) -> MarkovKernel:
    """[[1-p, p], [q, 1-q]]; pi = (q, p) / (p + q), second eigenvalue 1 - p - q."""
    return build_kernel([[1.0 - p, p], [q, 1.0 - q]])


def iid(weights: Sequence[float]) -> MarkovKernel:
    """Every row equals the (normalized) weights, so Qf = E_pi f."""
    r = np.asarray(weights, dtype=float)
    r = r / r.sum()
    return build_kernel(np.tile(r, (r.shape[0], 1)), stationary=r)


def rotation_cycle(n: int) -> np.ndarray:
    """
    Deterministic rotation x -> x + 1 mod n as a raw row table.

    Periodic with period n, so it is returned as a table rather than a kernel.
    """
    if n < 1:
        raise KernelError(f"Cycle length must be positive, got {n}")
    return np.roll(np.eye(n), 1, axis=1)


def biased_cycle(n: int = 3, forward: float = 0.9) -> MarkovKernel:
    """Q(x, x+1) = forward, Q(x, x-1) = 1 - forward. Doubly stochastic; not reversible for forward != 1/2; periodic for even n."""
    if n < 3:
        raise KernelError(f"Biased cycle needs at least 3 states, got {n}")
    table = forward * np.roll(np.eye(n), 1, axis=1) + (1.0 - forward) * np.roll(np.eye(n), -1, axis=1)
    return build_kernel(table, stationary=np.full(n, 1.0 / n))


def block_diagonal(*blocks: Sequence[Sequence[float]]) -> np.ndarray:
    """Reducible row table with the given stochastic blocks on the diagonal."""
    arrays = [np.asarray(b, dtype=float) for b in blocks]
    size = sum(a.shape[0] for a in arrays)
    table = np.zeros((size, size))
    offset = 0
    for a in arrays:
        k = a.shape[0]
        table[offset:offset + k, offset:offset + k] = a
        offset += k
    return table


def lazy_two_cycle(hold: float = 0.5) -> MarkovKernel:
    return lazy(rotation_cycle(2), hold)


def star(leaves: int = 3, hold: float = 0.5) -> MarkovKernel:
    """Random walk on a star with the hub as state 0; pi(hub) = 1/2."""
    weights = np.zeros((leaves + 1, leaves + 1))
    weights[0, 1:] = 1.0
    weights[1:, 0] = 1.0
    return random_walk_kernel(weights, hold=hold)


def triangle() -> MarkovKernel:
    return random_walk_kernel(np.ones((3, 3)) - np.eye(3))


# Builder names accepted by kernel specs ({"builder": name, "params": {...}})
BUILDERS: dict[str, Callable[..., Any]] = {
    "two_state": two_state,
    "iid": iid,
    "biased_cycle": biased_cycle,
    "lazy_two_cycle": lazy_two_cycle,
    "star": star,
    "triangle": triangle,
}


def from_builder(name: str, params: dict[str, Any] | None = None) -> MarkovKernel:
    """Build a corpus kernel by name."""
    try:
        builder = BUILDERS[name]
    except KeyError:
        raise KernelError(
            f"Unknown kernel builder '{name}' (available: {', '.join(sorted(BUILDERS))})"
        ) from None
    return builder(**(params or {}))


def small_corpus() -> dict[str, MarkovKernel]:
    """Ergodic chains with at most four states, for exhaustive checks."""
    return {
        "two_state": two_state(),
        "iid3": iid([0.2, 0.3, 0.5]),
        "biased_cycle": biased_cycle(),
        "lazy_two_cycle": lazy_two_cycle(0.25),
        "star": star(),
        "triangle": triangle(),
        "metropolis": _metropolis_example(),
    }


def _metropolis_example() -> MarkovKernel:
    proposal = np.full((4, 4), 0.25)
    return metropolis_kernel([0.1, 0.2, 0.3, 0.4], proposal)
