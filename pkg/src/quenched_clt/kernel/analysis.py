"""Kernel analysis - stationary laws, ergodicity and reversibility."""

from __future__ import annotations

import logging
from functools import reduce
from math import gcd

import numpy as np
import scipy.linalg
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import breadth_first_order, connected_components

from .types import ErgodicityReport, MarkovKernel, NoConvergence, NotErgodic, ReversibilityCheck


logger = logging.getLogger(__name__)

# Dense eigen work is exact enough and cheap up to this many states
DENSE_EIGEN_LIMIT = 64

# Exact Dobrushin coefficient up to this many states, Doeblin bound beyond
DOBRUSHIN_LIMIT = 512

STATIONARY_TARGET = 1e-13
STATIONARY_ACCEPT = 1e-12
POWER_ITERATION_CAP = 1_000_000


def _positive_graph(transition: np.ndarray) -> csr_matrix:
    return csr_matrix((np.asarray(transition) > 0).astype(np.int8))


def _period(graph: csr_matrix) -> int:
    """gcd of level[u] + 1 - level[v] over edges u -> v of a strongly connected graph."""
    size = graph.shape[0]
    order, predecessors = breadth_first_order(graph, 0, directed=True, return_predecessors=True)
    level = np.full(size, -1, dtype=np.int64)
    level[0] = 0
    for node in order[1:]:
        level[node] = level[predecessors[node]] + 1
    coo = graph.tocoo()
    diffs = np.abs(level[coo.row] + 1 - level[coo.col])
    nonzero = [int(d) for d in np.unique(diffs) if d != 0]
    if not nonzero:
        # Only happens for a graph without cycles, which cannot be strongly connected
        return 1
    return reduce(gcd, nonzero)


def _class_period(graph: csr_matrix, labels: np.ndarray, components: int) -> int:
    """gcd of the periods of the communicating classes that contain a cycle."""
    periods = []
    for component in range(components):
        members = np.flatnonzero(labels == component)
        sub = graph[members][:, members]
        if sub.nnz == 0:
            continue
        periods.append(_period(csr_matrix(sub)))
    return reduce(gcd, periods) if periods else 1


def _spectral_gap(transition: np.ndarray) -> tuple[float, str]:
    size = transition.shape[0]
    if size == 1:
        return 1.0, "eigen"
    if size <= DENSE_EIGEN_LIMIT:
        moduli = np.sort(np.abs(scipy.linalg.eigvals(transition)))[::-1]
        return float(np.clip(1.0 - moduli[1], 0.0, 1.0)), "eigen"
    if size <= DOBRUSHIN_LIMIT:
        # 1 - delta(Q), delta(Q) = max_{x,y} TV(Q(x,.), Q(y,.))
        overlap = min(
            float(np.min(np.minimum(transition[x][None, :], transition).sum(axis=1)))
            for x in range(size)
        )
        return float(np.clip(overlap, 0.0, 1.0)), "dobrushin"
    # Doeblin minorization: sum_z min_x Q(x, z)
    return float(np.clip(transition.min(axis=0).sum(), 0.0, 1.0)), "doeblin"


def check_ergodic(transition: np.ndarray) -> ErgodicityReport:
    """
    Irreducibility, period and a spectral-gap estimate for a stochastic row table.

    Irreducibility is strong connectivity of the positive-entry graph; the
    period is the gcd of cycle lengths through BFS levels.
    """
    transition = np.asarray(transition, dtype=float)
    graph = _positive_graph(transition)
    components, labels = connected_components(graph, directed=True, connection="strong")
    irreducible = components == 1
    period = _period(graph) if irreducible else _class_period(graph, labels, components)
    if irreducible:
        gap, method = _spectral_gap(transition)
    else:
        gap, method = 0.0, "eigen"
    report = ErgodicityReport(
        irreducible=bool(irreducible),
        aperiodic=bool(period == 1),
        period=int(period),
        spectral_gap_estimate=float(gap),
        gap_method=method,
    )
    logger.debug(f"Ergodicity check: {report}")
    return report


def _require_ergodic(transition: np.ndarray) -> None:
    report = check_ergodic(transition)
    if not report.irreducible:
        raise NotErgodic("Kernel is reducible", irreducible=False, period=0)
    if not report.aperiodic:
        raise NotErgodic(
            f"Kernel is periodic (period {report.period})",
            irreducible=True,
            period=report.period,
        )


def _residual(pi: np.ndarray, transition: np.ndarray) -> float:
    return float(np.max(np.abs(pi @ transition - pi)))


def _bordered_solve(transition: np.ndarray) -> np.ndarray:
    """Solve pi (I - Q) = 0, sum(pi) = 1 with the last balance equation replaced."""
    size = transition.shape[0]
    system = np.eye(size) - transition.T
    system[-1, :] = 1.0
    rhs = np.zeros(size)
    rhs[-1] = 1.0
    return scipy.linalg.solve(system, rhs)


def _normalize(pi: np.ndarray) -> np.ndarray:
    pi = np.real(pi)
    pi = np.clip(pi / pi.sum(), 0.0, None)
    return pi / pi.sum()


def stationary_distribution(transition: np.ndarray, *, check: bool = True) -> np.ndarray:
    """
    Unique stationary law of an ergodic kernel.

    Dense left-eigen solve up to 64 states, power iteration on the lazy
    operator (I + Q)/2 beyond that. Results are polished with a bordered
    linear solve when the residual misses the 1e-13 target.

    Raises:
        NotErgodic: If the kernel is reducible or periodic
        NoConvergence: If power iteration hits its cap
    """
    transition = np.asarray(transition, dtype=float)
    if check:
        _require_ergodic(transition)
    size = transition.shape[0]
    if size == 1:
        return np.ones(1)

    if size <= DENSE_EIGEN_LIMIT:
        values, vectors = scipy.linalg.eig(transition.T)
        lead = int(np.argmin(np.abs(values - 1.0)))
        pi = _normalize(vectors[:, lead])
    else:
        averaged = 0.5 * (np.eye(size) + transition)
        pi = np.full(size, 1.0 / size)
        for iteration in range(POWER_ITERATION_CAP):
            pi = pi @ averaged
            if iteration % 16 == 0 and _residual(pi, transition) <= STATIONARY_TARGET:
                break
        else:
            raise NoConvergence(
                f"Power iteration did not reach {STATIONARY_TARGET} in {POWER_ITERATION_CAP} steps"
            )
        pi = _normalize(pi)

    if _residual(pi, transition) > STATIONARY_TARGET:
        logger.debug("Polishing stationary vector with bordered solve")
        polished = _normalize(_bordered_solve(transition))
        if _residual(polished, transition) < _residual(pi, transition):
            pi = polished

    residual = _residual(pi, transition)
    if residual > STATIONARY_ACCEPT:
        raise NoConvergence(f"Stationary residual {residual:.3e} exceeds {STATIONARY_ACCEPT}")
    return pi


def check_reversible(kernel: MarkovKernel, tolerance: float = 1e-12) -> ReversibilityCheck:
    """Detailed balance: max_{x,y} |pi(x)Q(x,y) - pi(y)Q(y,x)| <= tolerance."""
    flux = kernel.stationary[:, None] * kernel.transition
    violation = float(np.max(np.abs(flux - flux.T)))
    return ReversibilityCheck(
        reversible=bool(violation <= tolerance),
        max_violation=violation,
        tolerance=tolerance,
    )


def k_step(kernel: MarkovKernel, k: int) -> np.ndarray:
    """Q^k as a dense table."""
    if k < 0:
        raise ValueError(f"k must be nonnegative, got {k}")
    return np.linalg.matrix_power(np.asarray(kernel.transition), k)
