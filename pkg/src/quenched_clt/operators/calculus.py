"""Markov-operator calculus - exact Qf, v_k, f_m, g_f, Poisson solves and variances."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np
import scipy.linalg

from ..kernel.types import MarkovKernel
from .series import PowerSeries
from .types import (
    MartingaleScheme, NegativeVariance, NotCentered, Observable, OperatorError,
    SolveFailed, VarianceReport,
)


logger = logging.getLogger(__name__)

SERIES_TOLERANCE = 1e-12
VARIANCE_TOLERANCE = 1e-10
POISSON_TOLERANCE = 1e-10
VARIANCE_CLAMP = 1e-9

# Direct linear solve for the Poisson equation up to this many states
DIRECT_SOLVE_LIMIT = 512


def observable(values: Any, kernel: MarkovKernel) -> Observable:
    """Wrap raw values as an Observable aligned with the kernel."""
    if isinstance(values, Observable):
        values = values.values
    return Observable.of(values, kernel.stationary)


def _values(f: Observable | Any) -> np.ndarray:
    return f.values if isinstance(f, Observable) else np.asarray(f, dtype=float)


def centered_values(kernel: MarkovKernel, f: Observable | Any) -> np.ndarray:
    obs = observable(f, kernel)
    if not obs.centered:
        raise NotCentered(obs.mean_under_pi)
    return obs.values - obs.mean_under_pi


def center(raw: Observable | Any, kernel: MarkovKernel) -> Observable:
    """raw - E_pi(raw)."""
    values = _values(raw)
    mean = float(kernel.stationary @ values)
    return observable(values - mean, kernel)


def apply_q(kernel: MarkovKernel, f: Observable | Any) -> Observable:
    """(Qf)(x) = sum_y Q(x, y) f(y)."""
    return observable(kernel.transition @ _values(f), kernel)


def v_k(kernel: MarkovKernel, f: Observable | Any, k: int) -> Observable:
    """v_k = (I + Q + ... + Q^{k-1}) f."""
    if k < 1:
        raise OperatorError(f"k must be positive, got {k}")
    values = centered_values(kernel, f)
    total = np.zeros_like(values)
    term = values
    for _ in range(k):
        total = total + term
        term = kernel.transition @ term
    return observable(total, kernel)


def f_m(kernel: MarkovKernel, f: Observable | Any, m: int) -> Observable:
    """f_m = (1/m)(Q + ... + Q^m) f."""
    if m < 1:
        raise OperatorError(f"m must be positive, got {m}")
    values = centered_values(kernel, f)
    total = np.zeros_like(values)
    term = values
    for _ in range(m):
        term = kernel.transition @ term
        total = total + term
    return observable(total / m, kernel)


def g_f(kernel: MarkovKernel, f: Observable | Any, *, tolerance: float = SERIES_TOLERANCE) -> Observable:
    """
    g_f = sup_{n >= 0} |sum_{j=0..n} Q^j f|, pointwise.

    Partial sums are followed until the certified tail is below `tolerance`,
    so the result is exact to that tolerance.

    Raises:
        NotCentered: If E_pi f is not zero
        NoGeometricCertificate: If the tail cannot be bounded within the cap
    """
    values = centered_values(kernel, f)
    partial = np.zeros_like(values)
    best = np.zeros_like(values)
    series = PowerSeries(kernel.transition, kernel.stationary, values, tolerance)
    for _, term in series:
        partial = partial + term
        np.maximum(best, np.abs(partial), out=best)
    return observable(best, kernel)


def poisson_solve(kernel: MarkovKernel, f: Observable | Any, *, tolerance: float = POISSON_TOLERANCE) -> Observable:
    """
    The centered solution h of (I - Q) h = f, equal to sum_{j>=0} Q^j f.

    Dense solve of (I - Q + 1 pi^T) h = f up to 512 states, certified series
    summation beyond that.

    Raises:
        SolveFailed: If the residual exceeds `tolerance` or the system is singular
    """
    values = centered_values(kernel, f)
    transition, pi = kernel.transition, kernel.stationary
    size = kernel.size

    if size <= DIRECT_SOLVE_LIMIT:
        system = np.eye(size) - transition + np.outer(np.ones(size), pi)
        try:
            h = scipy.linalg.solve(system, values)
        except (scipy.linalg.LinAlgError, ValueError) as e:
            raise SolveFailed(f"Poisson system is singular: {e}") from e
    else:
        h = np.zeros_like(values)
        for _, term in PowerSeries(transition, pi, values, tolerance / 10):
            h = h + term

    h = h - float(pi @ h)
    residual = float(np.max(np.abs(h - transition @ h - values), initial=0.0))
    if residual > tolerance:
        raise SolveFailed(f"Poisson residual {residual:.3e} exceeds {tolerance}", residual=residual)
    logger.debug(f"Poisson solve residual {residual:.3e}")
    return observable(h, kernel)


def martingale_scheme(kernel: MarkovKernel, f: Observable | Any, m: int) -> MartingaleScheme:
    """
    theta^m, D^m and sigma_m^2 for the martingale approximation at m.

    theta^m = (1/m) sum_{k=1..m} v_k = sum_{j=0..m-1} (m - j)/m Q^j f.
    """
    if m < 1:
        raise OperatorError(f"m must be positive, got {m}")
    values = centered_values(kernel, f)
    transition, pi = kernel.transition, kernel.stationary

    theta = np.zeros_like(values)
    tail_sum = np.zeros_like(values)
    term = values
    for j in range(m):
        theta = theta + (m - j) / m * term
        term = transition @ term
        tail_sum = tail_sum + term
    fm = tail_sum / m

    q_theta = transition @ theta
    d_table = theta[None, :] - q_theta[:, None]
    sigma_m_sq = float(pi @ (transition * d_table**2).sum(axis=1))

    return MartingaleScheme(
        m=m,
        theta=observable(theta, kernel),
        d_table=d_table,
        sigma_m_sq=sigma_m_sq,
        f_m=observable(fm, kernel),
        q_theta=observable(q_theta, kernel),
    )


def _clamp_variance(value: float, clamp: float) -> tuple[float, bool]:
    if value >= 0:
        return value, False
    if value >= -clamp:
        logger.warning(f"Clamping variance {value:.3e} to 0")
        return 0.0, True
    raise NegativeVariance(value, clamp)


def long_run_variance(
    kernel: MarkovKernel,
    f: Observable | Any,
    *,
    tolerance: float = VARIANCE_TOLERANCE,
    clamp: float = VARIANCE_CLAMP,
) -> VarianceReport:
    """
    sigma^2 = E_pi f^2 + 2 sum_{j>=1} E_pi(f Q^j f) with a certified tail.

    The tail of 2 sum E_pi(f Q^j f) is bounded by 2 E_pi|f| times the sup-norm
    tail of the powers.

    Raises:
        NegativeVariance: If the sum is below -clamp
        NoGeometricCertificate: If the tail cannot be bounded
    """
    values = centered_values(kernel, f)
    pi = kernel.stationary
    weighted = pi * values
    scale = 2.0 * float(np.abs(weighted).sum())

    terms: list[float] = []
    series = PowerSeries(kernel.transition, pi, values, tolerance, scale=scale)
    for _, term in series:
        terms.append(float(weighted @ term))

    raw = terms[0] + 2.0 * float(np.sum(terms[1:]))
    sigma_sq, clamped = _clamp_variance(raw, clamp)
    report = VarianceReport(
        sigma_sq=sigma_sq,
        series_terms=tuple(terms),
        truncation_j=len(terms) - 1,
        tail_bound=series.tail_bound,
        clamped=clamped,
        raw_value=raw,
    )
    logger.debug(f"Long-run variance {sigma_sq:.10g} (J={report.truncation_j})")
    return report


def poisson_variance(kernel: MarkovKernel, f: Observable | Any, *, clamp: float = VARIANCE_CLAMP) -> float:
    """sigma^2 through the Poisson solution: 2 E_pi(f h) - E_pi f^2."""
    values = centered_values(kernel, f)
    h = poisson_solve(kernel, values).values
    pi = kernel.stationary
    raw = 2.0 * float(pi @ (values * h)) - float(pi @ values**2)
    return _clamp_variance(raw, clamp)[0]


def stein_ratio(
    kernel: MarkovKernel,
    h: Observable | Any,
    q: float = 2.0,
    *,
    tolerance: float = SERIES_TOLERANCE,
) -> float:
    """
    E_pi(sup_n |Q^n h|^q) / E_pi |h|^q for centered h.

    Reported only; 1.0 when h vanishes.
    """
    if q < 1:
        raise OperatorError(f"q must be at least 1, got {q}")
    values = centered_values(kernel, h)
    pi = kernel.stationary
    denominator = float(pi @ np.abs(values) ** q)
    if denominator == 0.0:
        return 1.0
    best = np.zeros_like(values)
    for _, term in PowerSeries(kernel.transition, pi, values, tolerance):
        np.maximum(best, np.abs(term), out=best)
    return float(pi @ best**q) / denominator
