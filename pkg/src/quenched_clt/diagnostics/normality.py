"""Normality tests - Kolmogorov-Smirnov checks of endpoints, paths and the mixture identity."""

from __future__ import annotations

import math
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy import stats

from ..kernel.types import MarkovKernel
from ..simulation.types import EnsembleSummary
from .types import DiagnosticsError, FcltReport, NormalityTest, TwoSampleTest


DEFAULT_ALPHA = 0.05
MIXTURE_ALPHA = 0.01
BIAS_ALLOWANCE = 0.005
# c in the c / sqrt(steps) allowance for skew, start bias and lattice at a finite horizon
FINITE_N_CONSTANT = 0.75
SUP_TOLERANCE = 0.01
DEGENERATE_VARIANCE = 1e-12

# P(max_{t<=1} W_t <= 1) by the reflection principle
SUP_TARGET = 2.0 * float(stats.norm.cdf(1.0)) - 1.0


def ks_critical(count: int, alpha_level: float) -> float:
    """Asymptotic one-sample KS critical value sqrt(-ln(alpha/2) / 2) / sqrt(count)."""
    if count < 1:
        raise DiagnosticsError("KS test needs at least one sample")
    if not 0.0 < alpha_level < 1.0:
        raise DiagnosticsError(f"alpha_level must lie in (0, 1), got {alpha_level}")
    return math.sqrt(-0.5 * math.log(alpha_level / 2.0)) / math.sqrt(count)


def finite_n_allowance(steps: int | None, bias_allowance: float, finite_n: float) -> float:
    """Distance a sample at a horizon of `steps` may sit from its Gaussian limit on top of sampling error."""
    if not steps:
        return bias_allowance
    return bias_allowance + finite_n / math.sqrt(steps)


def clt_test(
    endpoints: Sequence[float] | np.ndarray,
    sigma_sq: float,
    alpha_level: float = DEFAULT_ALPHA,
    *,
    bias_allowance: float = BIAS_ALLOWANCE,
    n: int | None = None,
    finite_n: float = FINITE_N_CONSTANT,
) -> NormalityTest:
    """
    KS distance between the endpoint sample and N(0, sigma_sq).

    The critical value is the KS quantile plus bias_allowance plus
    finite_n / sqrt(n) when the horizon n is given. At n = 5000 the
    Edgeworth terms of a skewed observable alone reach about 0.01.

    With sigma_sq ~ 0 the limit is a point mass; the test then passes when
    the share of |endpoint| > n^(-1/4) stays within alpha_level.
    """
    sample = np.asarray(endpoints, dtype=float).ravel()
    count = sample.shape[0]
    if count < 1:
        raise DiagnosticsError("KS test needs at least one sample")
    if sigma_sq <= DEGENERATE_VARIANCE:
        threshold = n ** -0.25 if n else 1e-9
        share = float(np.mean(np.abs(sample) > threshold))
        return NormalityTest(
            ks_distance=share, critical=alpha_level, passed=bool(share <= alpha_level), degenerate=True, count=count
        )
    distance = float(stats.kstest(sample, stats.norm(loc=0.0, scale=math.sqrt(sigma_sq)).cdf).statistic)
    critical = ks_critical(count, alpha_level) + finite_n_allowance(n, bias_allowance, finite_n)
    return NormalityTest(ks_distance=distance, critical=critical, passed=bool(distance <= critical), count=count)


def _increment_correlation(ensemble: EnsembleSummary) -> float:
    """Largest |corr| between adjacent increments of the scaled path over the grid."""
    columns = np.column_stack([np.zeros(ensemble.count), ensemble.scaled_paths])
    increments = np.diff(columns, axis=1)
    worst = 0.0
    for i in range(increments.shape[1] - 1):
        a, b = increments[:, i], increments[:, i + 1]
        if a.std() == 0.0 or b.std() == 0.0:
            continue
        worst = max(worst, abs(float(np.corrcoef(a, b)[0, 1])))
    return worst


def fclt_test(
    ensemble: EnsembleSummary,
    sigma_sq: float,
    alpha_level: float = DEFAULT_ALPHA,
    *,
    bias_allowance: float = BIAS_ALLOWANCE,
    sup_tolerance: float = SUP_TOLERANCE,
    finite_n: float = FINITE_N_CONSTANT,
) -> FcltReport:
    """
    Functional check of one ensemble against sigma W.

    Every grid marginal is tested against N(0, t sigma_sq), adjacent
    increments must be uncorrelated within 3 / sqrt(count), and
    P(max_k S_k / sqrt(n) <= sigma) must match the Brownian value within
    sup_tolerance + finite_n / sqrt(n). The marginal at t sees [n t] steps
    and gets the allowance for that horizon.
    """
    marginals = {
        t: clt_test(
            ensemble.scaled_paths[:, i],
            t * sigma_sq,
            alpha_level,
            bias_allowance=bias_allowance,
            n=max(1, int(math.floor(ensemble.n * t + 1e-9))),
            finite_n=finite_n,
        )
        for i, t in enumerate(ensemble.grid)
    }
    if sigma_sq <= DEGENERATE_VARIANCE:
        sup_probability = float(np.mean(ensemble.max_signed <= ensemble.n ** -0.25))
        target = 1.0
    else:
        sup_probability = float(np.mean(ensemble.max_signed <= math.sqrt(sigma_sq)))
        target = SUP_TARGET
    return FcltReport(
        marginals=marginals,
        increment_correlation=_increment_correlation(ensemble),
        correlation_limit=3.0 / math.sqrt(ensemble.count),
        sup_probability=sup_probability,
        sup_target=target,
        sup_tolerance=sup_tolerance + finite_n / math.sqrt(ensemble.n),
    )


def mixture_identity_check(
    kernel: MarkovKernel,
    annealed: EnsembleSummary,
    per_state: Mapping[Hashable, EnsembleSummary],
    alpha_level: float = MIXTURE_ALPHA,
) -> TwoSampleTest:
    """
    Annealed endpoints against the pi-weighted pool of quenched endpoints.

    The pool takes round(pi(x) * annealed.count) endpoints from the
    ensemble started at x, capped by that ensemble's size.
    """
    pool = []
    for x, summary in per_state.items():
        take = min(summary.count, int(round(kernel.stationary[kernel.resolve(x)] * annealed.count)))
        pool.append(summary.normalized_endpoints[:take])
    pooled = np.concatenate(pool) if pool else np.empty(0)
    n1, n2 = annealed.count, pooled.shape[0]
    if n2 == 0:
        raise DiagnosticsError("Per-state ensembles give an empty pool")
    distance = float(stats.ks_2samp(annealed.normalized_endpoints, pooled).statistic)
    critical = math.sqrt(-0.5 * math.log(alpha_level / 2.0)) * math.sqrt((n1 + n2) / (n1 * n2))
    return TwoSampleTest(ks_distance=distance, critical=critical, passed=bool(distance <= critical), sizes=(n1, n2))
