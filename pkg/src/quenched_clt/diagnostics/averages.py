"""Ergodic averages - operator averages, pathwise martingale averages and transition frequencies."""

from __future__ import annotations

from typing import Any, Hashable, Sequence

import numpy as np

from ..kernel.types import MarkovKernel
from ..operators.calculus import martingale_scheme, observable
from ..operators.types import Observable
from ..simulation.sampler import path_statistics
from ..simulation.types import DEFAULT_GRID
from .types import AverageCheck, DiagnosticsError, MartingaleAverageCheck, TransitionFrequencyCheck


def hopf_average_check(kernel: MarkovKernel, h: Observable | Any, x: Hashable, n: int) -> AverageCheck:
    """(1/n) sum_{k=1..n} (Q^k h)(x) against E_pi h."""
    if n < 1:
        raise DiagnosticsError(f"n must be at least 1, got {n}")
    values = observable(h, kernel).values
    position = kernel.resolve(x)
    term = values
    total = 0.0
    for _ in range(n):
        term = kernel.transition @ term
        total += float(term[position])
    average = total / n
    limit = float(kernel.stationary @ values)
    return AverageCheck(average=average, limit=limit, gap=abs(average - limit))


def martingale_average_check(
    kernel: MarkovKernel,
    f: Observable | Any,
    m: int,
    x: Hashable,
    n: int,
    seed: int,
    *,
    grid: Sequence[float] = DEFAULT_GRID,
) -> MartingaleAverageCheck:
    """(1/n) sum_{k<=[nt]} (D_k^m)^2 along one path from x against t sigma_m^2."""
    scheme = martingale_scheme(kernel, f, m)
    stats = path_statistics(kernel, f, scheme, x, n, (seed, 0), grid=grid)
    return MartingaleAverageCheck(
        grid=stats.grid,
        averages=tuple(float(v) / n for v in stats.d_sq_grid),
        targets=tuple(t * scheme.sigma_m_sq for t in stats.grid),
        sigma_m_sq=scheme.sigma_m_sq,
    )


def transition_frequency_check(
    kernel: MarkovKernel,
    x: Hashable,
    n: int,
    seed: int,
    *,
    sigmas: float = 4.0,
) -> TransitionFrequencyCheck:
    """
    Empirical transition rows of one path of length n against Q.

    Passes when every |Qhat(x,y) - Q(x,y)| <= sigmas * sqrt(Q(x,y) / visits(x)).
    """
    zero = np.zeros(kernel.size)
    scheme = martingale_scheme(kernel, zero, 1)
    stats = path_statistics(kernel, zero, scheme, x, n, (seed, 0))
    empirical = stats.empirical_rows()
    visits = stats.visits
    transition = kernel.transition

    deviation = np.abs(empirical - transition)
    deviation[visits == 0] = 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.sqrt(transition / np.maximum(visits, 1)[:, None])
        z = np.where(scale > 0, deviation / scale, 0.0)
    z[visits == 0] = 0.0
    max_z = float(z.max())
    return TransitionFrequencyCheck(
        empirical=empirical,
        visits=visits,
        max_deviation=float(deviation.max()),
        max_z=max_z,
        passed=bool(max_z <= sigmas),
    )
