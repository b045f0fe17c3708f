"""Kernel builders - validated construction of Markov kernels."""

from __future__ import annotations

import logging
from typing import Hashable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .analysis import check_ergodic, stationary_distribution
from .types import (
    MAX_STATES, Disconnected, KernelError, KernelTooLarge, MarkovKernel,
    NonStochasticRow, NotErgodic, ZeroTargetWeight,
)


logger = logging.getLogger(__name__)

ROW_SUM_TOLERANCE = 1e-9
INVARIANT_TOLERANCE = 1e-12


def _as_table(rows: Sequence[Sequence[float]] | np.ndarray) -> np.ndarray:
    table = np.array(rows, dtype=float)
    if table.ndim != 2 or table.shape[0] != table.shape[1] or table.shape[0] == 0:
        raise KernelError(f"Transition table must be square and nonempty, got shape {table.shape}")
    if table.shape[0] > MAX_STATES:
        raise KernelTooLarge(f"{table.shape[0]} states exceeds the dense cap of {MAX_STATES}")
    if not np.all(np.isfinite(table)):
        raise KernelError("Transition table contains non-finite entries")
    return table


def validate_rows(rows: Sequence[Sequence[float]] | np.ndarray,
                  tolerance: float = ROW_SUM_TOLERANCE) -> np.ndarray:
    """
    Check rows are nonnegative and sum to one, then renormalize exactly.

    Raises:
        NonStochasticRow: On a negative entry or a row sum off by more than tolerance
    """
    table = _as_table(rows)
    for x, row in enumerate(table):
        if np.any(row < 0):
            raise NonStochasticRow(x, float(row.sum()), reason="negative entry")
        total = float(row.sum())
        if abs(total - 1.0) > tolerance:
            raise NonStochasticRow(x, total)
    return table / table.sum(axis=1, keepdims=True)


def build_kernel(
    rows: Sequence[Sequence[float]] | np.ndarray,
    states: Sequence[Hashable] | None = None,
    stationary: Sequence[float] | np.ndarray | None = None,
    *,
    tolerance: float = ROW_SUM_TOLERANCE,
) -> MarkovKernel:
    """
    Build a validated ergodic kernel.

    Args:
        rows: Square table, row x = Q(x, .)
        states: Optional state labels (default 0..n-1)
        stationary: Known stationary law; validated instead of solved for

    Raises:
        NonStochasticRow: If a row is not a probability vector
        NotErgodic: If the chain is reducible or periodic
    """
    table = validate_rows(rows, tolerance)
    size = table.shape[0]
    labels: tuple[Hashable, ...] = tuple(states) if states is not None else tuple(range(size))
    if len(labels) != size:
        raise KernelError(f"{len(labels)} state labels for {size} rows")
    if len(set(labels)) != size:
        raise KernelError("State labels must be unique")

    report = check_ergodic(table)
    if not report.irreducible:
        raise NotErgodic("Kernel is reducible", irreducible=False)
    if not report.aperiodic:
        raise NotErgodic(
            f"Kernel is periodic (period {report.period})",
            irreducible=True,
            period=report.period,
        )

    if stationary is None:
        pi = stationary_distribution(table, check=False)
    else:
        pi = np.array(stationary, dtype=float)
        pi = pi / pi.sum()
        residual = float(np.max(np.abs(pi @ table - pi)))
        if residual > INVARIANT_TOLERANCE:
            raise KernelError(f"Supplied stationary law has residual {residual:.3e}")

    if np.any(pi <= 0):
        zero_states = [labels[i] for i in np.flatnonzero(pi <= 0)]
        raise NotErgodic(f"States with zero stationary mass: {zero_states}", irreducible=False)

    kernel = MarkovKernel(states=labels, transition=table, stationary=pi)
    logger.debug(f"Built kernel with {size} states (gap={report.spectral_gap_estimate:.4g})")
    return kernel


def metropolis_kernel(
    target: Sequence[float] | np.ndarray,
    proposal: Sequence[Sequence[float]] | np.ndarray,
    states: Sequence[Hashable] | None = None,
) -> MarkovKernel:
    """
    Metropolis-Hastings kernel for a target law and a proposal row table.

    Off-diagonal moves are P(x,y) * min(1, pi_y P(y,x) / (pi_x P(x,y))); the
    rejected mass stays on the diagonal, so detailed balance holds exactly
    and the target is stationary.

    Raises:
        ZeroTargetWeight: If some target weight is not strictly positive
    """
    weights = np.array(target, dtype=float)
    for x, w in enumerate(weights):
        if not w > 0:
            raise ZeroTargetWeight(x)
    pi = weights / weights.sum()
    prop = validate_rows(proposal)
    if prop.shape[0] != pi.shape[0]:
        raise KernelError(f"Proposal has {prop.shape[0]} states, target has {pi.shape[0]}")

    flux_forward = pi[:, None] * prop
    flux_backward = flux_forward.T
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(flux_forward > 0, flux_backward / flux_forward, 0.0)
    table = prop * np.minimum(1.0, ratio)
    np.fill_diagonal(table, 0.0)
    np.fill_diagonal(table, 1.0 - table.sum(axis=1))
    return build_kernel(table, states=states, stationary=pi)


def random_walk_kernel(
    weights: Sequence[Sequence[float]] | np.ndarray,
    states: Sequence[Hashable] | None = None,
    hold: float = 0.0,
) -> MarkovKernel:
    """
    Random walk on a symmetric weighted graph: Q(x,y) = w(x,y) / sum_z w(x,z).

    The stationary law is proportional to the weighted degree. `hold` mixes
    in the identity (hold * I + (1 - hold) * Q), which keeps pi and removes
    the period of bipartite graphs.

    Raises:
        Disconnected: If the weight graph is not connected
    """
    w = _as_table(weights)
    if np.any(w < 0):
        raise KernelError("Edge weights must be nonnegative")
    if not np.allclose(w, w.T, rtol=0.0, atol=INVARIANT_TOLERANCE):
        raise KernelError("Edge weights must be symmetric")
    if not 0.0 <= hold < 1.0:
        raise ValueError(f"hold must lie in [0, 1), got {hold}")

    components, _ = connected_components(csr_matrix(w > 0), directed=False)
    degree = w.sum(axis=1)
    if components > 1 or np.any(degree <= 0):
        raise Disconnected(int(components))

    table = w / degree[:, None]
    if hold > 0:
        table = hold * np.eye(w.shape[0]) + (1.0 - hold) * table
    return build_kernel(table, states=states, stationary=degree / degree.sum())


def lazy(kernel: MarkovKernel | Sequence[Sequence[float]] | np.ndarray, hold: float) -> MarkovKernel:
    """
    Lazy version hold * I + (1 - hold) * Q of a kernel.

    Keeps pi and reversibility. Also accepts a raw row table, so periodic
    chains (which are not valid kernels on their own) can be made aperiodic.
    Laziness does not compose additively: lazy(lazy(K, a), b) holds with
    probability a + b - ab.
    """
    if not 0.0 < hold < 1.0:
        raise ValueError(f"hold must lie in (0, 1), got {hold}")
    if isinstance(kernel, MarkovKernel):
        table = hold * np.eye(kernel.size) + (1.0 - hold) * kernel.transition
        return build_kernel(table, states=kernel.states, stationary=kernel.stationary)
    rows = validate_rows(kernel)
    return build_kernel(hold * np.eye(rows.shape[0]) + (1.0 - hold) * rows)
