"""Condition evaluators - finite-grid verdicts for the sufficient conditions."""

from __future__ import annotations

import logging
import math
from typing import Any, Hashable, Sequence

import numpy as np

from ..config import SimulationConfig
from ..kernel.analysis import check_reversible
from ..kernel.types import MarkovKernel
from ..operators.calculus import centered_values, g_f, martingale_scheme, poisson_solve
from ..operators.series import power_table, powers_at
from ..operators.types import Observable
from ..simulation.ensemble import quenched_ensemble
from .types import ConditionId, ConditionReport, DiagnosticsError, Verdict


logger = logging.getLogger(__name__)

DEFAULT_M_GRID: tuple[int, ...] = (1, 10, 100, 1000, 10000)
DEFAULT_LEVELS: tuple[float, ...] = (1.0, 10.0, 100.0)

# A deterministic sequence "tends to 0" on the grid once it has fallen below this fraction of its start
DECAY_FACTOR = 1e-3
NEGLIGIBLE_PROBABILITY = 0.05
NOISE_SIGMAS = 3.0
CAUCHY_TOLERANCE = 1e-9
SLACK = 1e-12

NOT_A_PROOF = "Finite-grid evaluation; a verdict is evidence on the grid, not a limit statement."


def _thin(length: int, head: int = 64) -> list[int]:
    """All indices below `head`, then powers of two, then the last index."""
    keep = list(range(min(length, head)))
    step = head
    while step < length - 1:
        keep.append(step)
        step *= 2
    if length - 1 not in keep and length > 0:
        keep.append(length - 1)
    return keep


def decay_verdict(values: Sequence[float], factor: float = DECAY_FACTOR) -> Verdict:
    """
    Verdict for a deterministic sequence that should tend to 0 along the grid.

    satisfied     all values ~0, or nonincreasing and last <= factor * first
    violated      at least two points and no decrease at all (last >= first)
    inconclusive  otherwise
    """
    values = [float(v) for v in values]
    if not values:
        return Verdict.INCONCLUSIVE
    if all(abs(v) <= SLACK for v in values):
        return Verdict.SATISFIED
    first, last = values[0], values[-1]
    nonincreasing = all(b <= a + SLACK for a, b in zip(values, values[1:]))
    if nonincreasing and last <= factor * first + SLACK:
        return Verdict.SATISFIED
    if len(values) > 1 and last >= first - SLACK:
        return Verdict.VIOLATED
    return Verdict.INCONCLUSIVE


def _grid(values: Sequence[int], name: str) -> list[int]:
    grid = sorted({int(v) for v in values})
    if not grid:
        raise DiagnosticsError(f"{name} must be nonempty")
    if grid[0] < 1:
        raise DiagnosticsError(f"{name} entries must be positive, got {grid[0]}")
    return grid


def negligibility_probe(
    kernel: MarkovKernel,
    f: Observable | Any,
    x: Hashable,
    m_grid: Sequence[int],
    n_grid: Sequence[int],
    eps: float,
    count: int,
    seed: int,
    *,
    maximal: bool = True,
    config: SimulationConfig | None = None,
    threads: int | None = None,
) -> ConditionReport:
    """
    Monte Carlo P^x(max_{j<=n} |rbar_j^m| / sqrt(n) > eps) per (m, n).

    With maximal=False the endpoint form P^x(|rbar_n^m| / sqrt(n) > eps) is
    evaluated instead (NEGL_CLT). The sequence holds, per m, the largest
    probability over the n grid.

    Verdict: satisfied if that value is <= 0.05 at the largest m and the
    sequence does not rise by more than 3 standard errors between grid
    points; violated if the last value exceeds 0.05 by more than 3 standard
    errors; inconclusive otherwise.
    """
    ms = _grid(m_grid, "m_grid")
    ns = _grid(n_grid, "n_grid")
    values = centered_values(kernel, f)
    condition = ConditionId.NEGL_FCLT if maximal else ConditionId.NEGL_CLT

    table: dict[str, dict[str, float]] = {}
    sequence: list[tuple[float, float]] = []
    errors: list[float] = []
    sigma_m_sq: dict[str, float] = {}
    for m in ms:
        scheme = martingale_scheme(kernel, values, m)
        sigma_m_sq[str(m)] = scheme.sigma_m_sq
        row: dict[str, float] = {}
        for n in ns:
            summary = quenched_ensemble(
                kernel, values, m, x, n, count, seed,
                config=config, threads=threads, scheme=scheme,
            )
            stat = summary.max_rbar if maximal else summary.rbar_endpoints
            row[str(n)] = float(np.mean(stat > eps))
        worst = max(row.values())
        table[str(m)] = row
        sequence.append((m, worst))
        errors.append(math.sqrt(worst * (1.0 - worst) / count))
        logger.debug(f"{condition.value} m={m}: max_n P = {worst:.4f}")

    probs = [p for _, p in sequence]
    steady = all(
        b <= a + NOISE_SIGMAS * math.hypot(ea, eb)
        for a, b, ea, eb in zip(probs, probs[1:], errors, errors[1:])
    )
    if probs[-1] <= NEGLIGIBLE_PROBABILITY and steady:
        verdict = Verdict.SATISFIED
    elif probs[-1] - NOISE_SIGMAS * errors[-1] > NEGLIGIBLE_PROBABILITY:
        verdict = Verdict.VIOLATED
    else:
        verdict = Verdict.INCONCLUSIVE

    notes = [NOT_A_PROOF]
    if maximal:
        notes.append(
            "A lim inf over m in place of lim m also suffices when E(D_0^m)^2 converges; "
            "sigma_m^2 per m is listed under extra.sigma_m_sq."
        )
        notes.append(
            "The martingale part's own conditions (ergodic averages of D_k^2) are checked "
            "separately by martingale_average_check."
        )

    report = ConditionReport(
        condition_id=condition,
        sequence=tuple(sequence),
        verdict=verdict,
        tolerances={"eps": eps, "probability": NEGLIGIBLE_PROBABILITY, "noise_sigmas": NOISE_SIGMAS},
        index_name="m",
        notes=tuple(notes),
        extra={
            "start": str(x),
            "count": count,
            "seed": seed,
            "probabilities": table,
            "standard_errors": errors,
            "sigma_m_sq": sigma_m_sq,
        },
    )
    logger.info(f"{condition.value} at x={x}: {verdict.value}")
    return report


def ui_probe(
    kernel: MarkovKernel,
    f: Observable | Any,
    m_grid: Sequence[int] = DEFAULT_M_GRID,
    level_grid: Sequence[float] = DEFAULT_LEVELS,
) -> ConditionReport:
    """
    E_pi|f_m g_f| per m, with tail expectations E_pi[|f_m g_f| 1{|f_m g_f| > M}].

    Verdict: satisfied when the last value is <= 1e-3 E_pi|f g_f| and the
    sequence is nonincreasing (see decay_verdict).
    """
    ms = _grid(m_grid, "m_grid")
    values = centered_values(kernel, f)
    pi = kernel.stationary
    gf = g_f(kernel, values).values
    baseline = float(pi @ np.abs(values * gf))
    _, means = powers_at(kernel.transition, pi, values, ms)

    sequence = []
    tails: dict[str, dict[str, float]] = {}
    for m in ms:
        product = np.abs(means[m] * gf)
        sequence.append((m, float(pi @ product)))
        tails[str(m)] = {repr(float(M)): float(pi @ (product * (product > M))) for M in level_grid}

    values_only = [v for _, v in sequence]
    if all(abs(v) <= SLACK for v in values_only):
        verdict = Verdict.SATISFIED
    elif (
        all(b <= a + SLACK for a, b in zip(values_only, values_only[1:]))
        and values_only[-1] <= DECAY_FACTOR * baseline + SLACK
    ):
        verdict = Verdict.SATISFIED
    elif len(values_only) > 1 and values_only[-1] >= values_only[0] - SLACK:
        verdict = Verdict.VIOLATED
    else:
        verdict = Verdict.INCONCLUSIVE

    return ConditionReport(
        condition_id=ConditionId.UI_FMGF,
        sequence=tuple(sequence),
        verdict=verdict,
        tolerances={"decay_factor": DECAY_FACTOR},
        index_name="m",
        notes=(
            NOT_A_PROOF,
            "On a finite state space |f_m g_f| is bounded, so uniform integrability is automatic; "
            "tail expectations vanish for levels above max |f_m g_f|.",
        ),
        extra={"baseline": baseline, "tails": tails, "g_f": gf.tolist()},
    )


def strong_condition_series(
    kernel: MarkovKernel,
    f: Observable | Any,
    m_grid: Sequence[int] = DEFAULT_M_GRID,
    j_max: int | None = None,
) -> ConditionReport:
    """
    S(m) = sum_{j>=1} E_pi|(Q^m f)(Q^j f)|, reported as the sum up to J plus
    the certified tail, an upper bound on the full series. The truncated
    sums and the tails are kept in extra.

    Verdict: decay_verdict on the S(m) sequence (S(m_max) <= 1e-3 S(m_min)).

    Raises:
        NoGeometricCertificate: If the tail of ||Q^j f|| cannot be bounded
    """
    ms = _grid(m_grid, "m_grid")
    values = centered_values(kernel, f)
    pi = kernel.stationary
    table, tail_sup = power_table(kernel.transition, pi, values, j_max=j_max)
    at, _ = powers_at(kernel.transition, pi, values, ms)
    abs_rows = np.abs(table[1:])

    sequence = []
    truncated, tails = {}, {}
    for m in ms:
        weight = pi * np.abs(at[m])
        truncated[str(m)] = float((abs_rows @ weight).sum())
        tails[str(m)] = float(weight.sum()) * tail_sup
        sequence.append((m, truncated[str(m)] + tails[str(m)]))

    return ConditionReport(
        condition_id=ConditionId.STRONG,
        sequence=tuple(sequence),
        verdict=decay_verdict([v for _, v in sequence]),
        tolerances={"decay_factor": DECAY_FACTOR},
        index_name="m",
        notes=(NOT_A_PROOF,),
        extra={"truncation_j": int(table.shape[0] - 1), "truncated": truncated, "tail_bounds": tails},
    )


def projective_series(
    kernel: MarkovKernel,
    f: Observable | Any,
    j_max: int | None = None,
) -> ConditionReport:
    """
    Partial sums of E_pi|f Q^j f|, j >= 0, with a certified tail.

    Verdict: satisfied whenever the tail is certified (always the case on a
    finite ergodic chain with geometric decay); the value is in extra.total.
    """
    values = centered_values(kernel, f)
    pi = kernel.stationary
    table, tail_sup = power_table(kernel.transition, pi, values, j_max=j_max)
    terms = np.abs(table) @ (pi * np.abs(values))
    partial = np.cumsum(terms)
    tail = float(pi @ np.abs(values)) * tail_sup
    sequence = [(j, float(partial[j])) for j in _thin(partial.shape[0])]

    return ConditionReport(
        condition_id=ConditionId.PROJECTIVE,
        sequence=tuple(sequence),
        verdict=Verdict.SATISFIED,
        tolerances={"tail_bound": tail},
        index_name="j",
        notes=(NOT_A_PROOF,),
        extra={"total": float(partial[-1]), "truncation_j": int(partial.shape[0] - 1)},
    )


def _cauchy_gap(sequence: np.ndarray) -> float:
    half = sequence.shape[0] // 2
    return float(np.max(np.abs(sequence[half:] - sequence[-1]), initial=0.0))


def conjecture_series(
    kernel: MarkovKernel,
    f: Observable | Any,
    n_max: int = 200,
) -> tuple[ConditionReport, ConditionReport]:
    """
    a_n = E_pi|f sum_{j<=n} Q^j f| and b_n = E_pi(f sum_{j<=n} Q^j f), n <= n_max.

    Only the condition sequences are evaluated. Verdict: satisfied when the
    Cauchy gap max_{n >= n_max/2} |x_n - x_{n_max}| is within 1e-9 of the
    sequence scale, inconclusive otherwise; never violated.
    """
    if n_max < 1:
        raise DiagnosticsError(f"n_max must be positive, got {n_max}")
    values = centered_values(kernel, f)
    pi = kernel.stationary
    table = np.empty((n_max + 1, values.shape[0]))
    term = values
    for j in range(n_max + 1):
        table[j] = term
        term = kernel.transition @ term
        term = term - float(pi @ term)
    partial = np.cumsum(table, axis=0)
    a = np.abs(partial * values) @ pi
    b = (partial * values) @ pi
    keep = _thin(n_max + 1)
    second_moment = float(pi @ values**2)

    def build(condition: ConditionId, seq: np.ndarray, extra: dict[str, Any]) -> ConditionReport:
        gap = _cauchy_gap(seq)
        scale = max(1.0, abs(float(seq[-1])))
        verdict = Verdict.SATISFIED if gap <= CAUCHY_TOLERANCE * scale else Verdict.INCONCLUSIVE
        return ConditionReport(
            condition_id=condition,
            sequence=tuple((n, float(seq[n])) for n in keep),
            verdict=verdict,
            tolerances={"cauchy": CAUCHY_TOLERANCE},
            index_name="n",
            notes=(NOT_A_PROOF, "Evaluates the condition sequence only; no claim is made about the conjecture it comes from."),
            extra={"cauchy_gap": gap, "limit_estimate": float(seq[-1]), **extra},
        )

    return (
        build(ConditionId.CONJ_DR, a, {}),
        build(ConditionId.CONJ_KV, b, {"sigma_sq_from_limit": 2.0 * float(b[-1]) - second_moment}),
    )


def _norm(values: np.ndarray, pi: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(np.abs(values), initial=0.0))
    return float(pi @ np.abs(values) ** p) ** (1.0 / p)


def _moment(values: np.ndarray, pi: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(np.max(np.abs(values), initial=0.0))
    return float(pi @ np.abs(values) ** p)


def coboundary_check(
    kernel: MarkovKernel,
    f: Observable | Any,
    p: float = 2.0,
    q: float = 2.0,
    m_grid: Sequence[int] = DEFAULT_M_GRID,
) -> tuple[ConditionReport, ConditionReport]:
    """
    Coboundary (f = (I - Q) h) and g_f in L_q, through the Holder product
    ||f_m||_p ||g_f||_q per m, with 1/p + 1/q = 1 and p in [2, inf].

    Verdict: decay_verdict on the product sequence. The coboundary verdict is
    downgraded to inconclusive on a non-reversible chain, where the coboundary
    route does not apply; the report says so in its notes.

    Raises:
        SolveFailed: If the Poisson equation cannot be solved
    """
    if not (p >= 2.0 and (math.isinf(p) or abs(1.0 / p + 1.0 / q - 1.0) <= 1e-12)):
        raise DiagnosticsError(f"Need p in [2, inf] and 1/p + 1/q = 1, got p={p}, q={q}")
    if math.isinf(p) and q != 1.0:
        raise DiagnosticsError(f"p=inf requires q=1, got q={q}")
    ms = _grid(m_grid, "m_grid")
    values = centered_values(kernel, f)
    pi = kernel.stationary

    h = poisson_solve(kernel, values).values
    gf = g_f(kernel, values).values
    _, means = powers_at(kernel.transition, pi, values, ms)
    gf_norm = _norm(gf, pi, q)
    sequence = tuple((m, _norm(means[m], pi, p) * gf_norm) for m in ms)
    verdict = decay_verdict([v for _, v in sequence])

    residual = float(np.max(np.abs(h - kernel.transition @ h - values), initial=0.0))
    reversibility = check_reversible(kernel)
    moments = {
        "f_p": _moment(values, pi, p),
        "h_q": _moment(h, pi, q),
        "g_f_q": _moment(gf, pi, q),
    }
    tolerances = {"decay_factor": DECAY_FACTOR, "p": p, "q": q}
    extra = {
        **moments,
        "poisson_residual": residual,
        "reversible": reversibility.reversible,
        "max_detailed_balance_violation": reversibility.max_violation,
    }

    cob_notes = [NOT_A_PROOF]
    cob_verdict = verdict
    if not reversibility.reversible:
        cob_notes.append(
            "Kernel is not reversible: the coboundary route to the quenched CLT assumes "
            "reversibility, so this verdict is informational only."
        )
        cob_verdict = Verdict.INCONCLUSIVE

    cob = ConditionReport(
        condition_id=ConditionId.COBOUNDARY,
        sequence=sequence,
        verdict=cob_verdict,
        tolerances=tolerances,
        index_name="m",
        notes=tuple(cob_notes),
        extra={**extra, "h": h.tolist()},
    )
    lq = ConditionReport(
        condition_id=ConditionId.LQ_GF,
        sequence=sequence,
        verdict=verdict,
        tolerances=tolerances,
        index_name="m",
        notes=(NOT_A_PROOF,),
        extra=extra,
    )
    return cob, lq
