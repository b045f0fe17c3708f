"""Strong-mixing profile - alpha_bar_k, the quantile function of |f| and covariance bounds."""

from __future__ import annotations

import logging
from typing import Any

import numpy as np

from ..kernel.analysis import k_step
from ..kernel.types import MarkovKernel
from ..operators.calculus import centered_values
from ..operators.calculus import observable as as_observable
from ..operators.series import CERTIFICATE_WINDOW
from ..operators.types import NoGeometricCertificate, Observable
from .types import (
    BoundCheck, ConditionId, ConditionReport, DiagnosticsError, MixingProfile,
    QuantileFunction, Verdict,
)


logger = logging.getLogger(__name__)

MIXING_TOLERANCE = 1e-10
MAX_LAGS = 100_000
BOUND_SLACK = 1e-12

# Deviations below this are rounding residue of an exactly mixed row
ZERO_ALPHA = 1e-15


def _values(kernel: MarkovKernel, f: Observable | Any) -> np.ndarray:
    return as_observable(f, kernel).values


def _threshold_indicators(values: np.ndarray) -> np.ndarray:
    """Columns 1{f <= t} for every t in the value set of f except the largest."""
    thresholds = np.unique(values)[:-1]
    return (values[:, None] <= thresholds[None, :]).astype(float)


def _alpha_from(pi: np.ndarray, conditional: np.ndarray, unconditional: np.ndarray) -> float:
    if conditional.shape[1] == 0:
        return 0.0
    deviation = float((pi @ np.abs(conditional - unconditional[None, :])).max())
    if deviation <= ZERO_ALPHA:
        return 0.0
    return min(deviation, 1.0)


def alpha_bar(kernel: MarkovKernel, f: Observable | Any, k: int) -> float:
    """
    alpha_bar_k = max_t sum_x pi(x) |P(f(xi_k) <= t | xi_0 = x) - P(f(xi_k) <= t)|.

    t sweeps the value set of f; the supremum over all real t is attained there.
    """
    if k < 1:
        raise DiagnosticsError(f"Lag k must be at least 1, got {k}")
    values = _values(kernel, f)
    indicators = _threshold_indicators(values)
    pi = kernel.stationary
    return _alpha_from(pi, k_step(kernel, k) @ indicators, pi @ indicators)


def quantile_fn(kernel: MarkovKernel, f: Observable | Any) -> QuantileFunction:
    """q(u) = inf{t >= 0 : P_pi(|f| > t) <= u} as an exact step function."""
    magnitudes = np.abs(_values(kernel, f))
    pi = kernel.stationary
    levels = np.unique(magnitudes)[::-1]
    knots = [0.0]
    steps = []
    mass = 0.0
    for level in levels:
        if level <= 0.0:
            break
        mass += float(pi[magnitudes == level].sum())
        knots.append(min(mass, 1.0))
        steps.append(float(level))
    # rounding in the running mass must not leave a sliver below 1
    if len(knots) > 1 and abs(knots[-1] - 1.0) <= 1e-12:
        knots[-1] = 1.0
    return QuantileFunction(knots=tuple(knots), values=tuple(steps))


def quantile_integral(q: QuantileFunction, u: float) -> float:
    """int_0^u q(s)^2 ds."""
    return q.integral_sq(u)


def mixing_profile(kernel: MarkovKernel, f: Observable | Any, k_max: int) -> MixingProfile:
    """alpha_bar_k and int_0^{alpha_bar_k} q^2 for k = 1..k_max."""
    if k_max < 1:
        raise DiagnosticsError(f"k_max must be at least 1, got {k_max}")
    values = _values(kernel, f)
    q = quantile_fn(kernel, values)
    alphas = _alpha_sequence(kernel, values, k_max)
    return MixingProfile(
        alpha_bar=tuple(alphas),
        quantile=q,
        integrals=tuple(q.integral_sq(a) for a in alphas),
    )


def _alpha_sequence(kernel: MarkovKernel, values: np.ndarray, k_max: int) -> list[float]:
    indicators = _threshold_indicators(values)
    pi = kernel.stationary
    unconditional = pi @ indicators
    conditional = indicators
    out = []
    for _ in range(k_max):
        conditional = kernel.transition @ conditional
        out.append(_alpha_from(pi, conditional, unconditional))
    return out


def covariance_bound_check(kernel: MarkovKernel, f: Observable | Any, k: int) -> BoundCheck:
    """E_pi|f Q^k f| <= 3 int_0^{alpha_bar_k} q^2 du, both sides exact."""
    values = _values(kernel, f)
    pi = kernel.stationary
    lhs = float(pi @ np.abs(values * (k_step(kernel, k) @ values)))
    rhs = 3.0 * quantile_fn(kernel, values).integral_sq(alpha_bar(kernel, values, k))
    return BoundCheck(lhs=lhs, rhs=rhs, holds=bool(lhs <= rhs + BOUND_SLACK))


def mixing_clt_condition(
    kernel: MarkovKernel,
    f: Observable | Any,
    k_max: int | None = None,
    *,
    tolerance: float = MIXING_TOLERANCE,
) -> ConditionReport:
    """
    Partial sums of int_0^{alpha_bar_j} q^2 du over j >= 1.

    alpha_bar_j is nonincreasing in j. Since the integral is at most
    q(0)^2 alpha_bar_j, the tail after J is bounded by
    q(0)^2 alpha_bar_J rho / (1 - rho) once the last ratios of alpha_bar stay
    below rho < 1. Without k_max, lags are added until that bound is below
    `tolerance`.

    Raises:
        NoGeometricCertificate: If no geometric decay of alpha_bar is found
    """
    values = centered_values(kernel, f)
    q = quantile_fn(kernel, values)
    top = q.values[0] if q.values else 0.0
    cap = k_max if k_max is not None else MAX_LAGS

    indicators = _threshold_indicators(values)
    pi = kernel.stationary
    unconditional = pi @ indicators
    conditional = indicators
    alphas: list[float] = []
    integrals: list[float] = []
    tail = None
    for _ in range(cap):
        conditional = kernel.transition @ conditional
        alpha = _alpha_from(pi, conditional, unconditional)
        alphas.append(alpha)
        integrals.append(q.integral_sq(alpha))
        tail = _alpha_tail(alphas, top)
        if alpha == 0.0 or (tail is not None and tail < tolerance and k_max is None):
            break
    if tail is None:
        last_ratio = alphas[-1] / alphas[-2] if len(alphas) > 1 and alphas[-2] > 0 else float("nan")
        raise NoGeometricCertificate(len(alphas), last_ratio)

    partial = np.cumsum(integrals)
    logger.debug(f"MIXING_RIO summed {len(alphas)} lags, tail <= {tail:.3g}")
    return ConditionReport(
        condition_id=ConditionId.MIXING_RIO,
        sequence=tuple((j + 1, float(partial[j])) for j in range(partial.shape[0])),
        verdict=Verdict.SATISFIED,
        tolerances={"tail_bound": tail},
        index_name="j",
        notes=(
            "For bounded f the condition is equivalent to sum_j alpha_bar_j < inf.",
            "alpha_bar_k is at most twice the usual strong-mixing coefficient; that coefficient is not computed.",
        ),
        extra={"total": float(partial[-1]), "alpha_bar": alphas[:64]},
    )


def _alpha_tail(alphas: list[float], top: float) -> float | None:
    """Certified bound on sum_{j>J} int_0^{alpha_j} q^2, or None."""
    last = alphas[-1]
    if last == 0.0:
        return 0.0
    if len(alphas) <= CERTIFICATE_WINDOW:
        return None
    window = alphas[-CERTIFICATE_WINDOW - 1:]
    ratios = [b / a for a, b in zip(window, window[1:]) if a > 0]
    if len(ratios) < CERTIFICATE_WINDOW:
        return None
    rho = max(ratios)
    if rho >= 1.0:
        return None
    return top * top * last * rho / (1.0 - rho)
