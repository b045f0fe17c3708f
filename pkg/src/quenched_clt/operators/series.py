"""Certified power series - iterate Q^j f until a geometric tail bound holds."""

from __future__ import annotations

import logging
from typing import Iterator

import numpy as np

from .types import NoGeometricCertificate


logger = logging.getLogger(__name__)

# Consecutive ratios that must stay below rho before a tail is trusted
CERTIFICATE_WINDOW = 10
MAX_TERMS = 1_000_000

# Norms below this are treated as an exactly vanished sequence
ZERO_NORM = 1e-300


class PowerSeries:
    """
    Iterates the terms Q^j f, j = 0, 1, ..., with a certified tail.

    After each term the sup-norm ratio r_{j+1} / r_j is recorded. Once the
    last CERTIFICATE_WINDOW ratios stay below some rho < 1, the remaining mass
    sum_{j>J} ||Q^j f||_inf is bounded by r_J rho / (1 - rho). Iteration stops
    when `scale` times that bound falls below `tolerance`.

    The pi-mean is projected out of every term with j >= 1, so the constant
    eigen-direction of Q cannot keep a rounding residue alive.

    Usage:
        series = PowerSeries(transition, stationary, f, tolerance=1e-12)
        for j, term in series:
            ...
        series.tail_bound, series.terms_used
    """

    def __init__(
        self,
        transition: np.ndarray,
        stationary: np.ndarray,
        values: np.ndarray,
        tolerance: float,
        *,
        scale: float = 1.0,
        window: int = CERTIFICATE_WINDOW,
        cap: int = MAX_TERMS,
        min_terms: int = 0,
    ):
        self.transition = transition
        self.stationary = stationary
        self.values = np.asarray(values, dtype=float)
        self.tolerance = tolerance
        self.scale = scale
        self.window = window
        self.cap = cap
        self.min_terms = min_terms

        self.terms_used = 0
        self.rho = 0.0
        self.tail_bound = 0.0
        self.norms: list[float] = []

    def __iter__(self) -> Iterator[tuple[int, np.ndarray]]:
        term = self.values
        ratios: list[float] = []
        norm = float(np.max(np.abs(term), initial=0.0))
        self.norms = [norm]
        j = 0
        while True:
            yield j, term
            self.terms_used = j + 1

            if norm <= ZERO_NORM and j + 1 >= self.min_terms:
                self.rho, self.tail_bound = 0.0, 0.0
                break
            if len(ratios) >= self.window and j + 1 >= self.min_terms:
                rho = max(ratios[-self.window:])
                if rho < 1.0:
                    tail = norm * rho / (1.0 - rho)
                    if self.scale * tail < self.tolerance:
                        self.rho, self.tail_bound = rho, self.scale * tail
                        break
            if j + 1 >= self.cap:
                raise NoGeometricCertificate(j + 1, ratios[-1] if ratios else float("nan"))

            term = self.transition @ term
            term = term - float(self.stationary @ term)
            next_norm = float(np.max(np.abs(term), initial=0.0))
            ratios.append(next_norm / norm if norm > ZERO_NORM else 0.0)
            self.norms.append(next_norm)
            norm = next_norm
            j += 1

        logger.debug(
            f"Series certified after {self.terms_used} terms (rho={self.rho:.4g}, tail<={self.tail_bound:.3g})"
        )


def ratio_tail(norms: list[float] | np.ndarray, window: int = CERTIFICATE_WINDOW) -> tuple[float, float]:
    """
    (rho, bound on sum_{j>J} r_j) from sup-norms r_0..r_J of a fixed-length run.

    Raises:
        NoGeometricCertificate: If the last `window` ratios do not stay below 1
    """
    norms = [float(r) for r in norms]
    if norms[-1] <= ZERO_NORM:
        return 0.0, 0.0
    ratios = [b / a if a > ZERO_NORM else 0.0 for a, b in zip(norms, norms[1:])]
    if len(ratios) < window:
        raise NoGeometricCertificate(len(norms), ratios[-1] if ratios else float("nan"))
    rho = max(ratios[-window:])
    if rho >= 1.0:
        raise NoGeometricCertificate(len(norms), rho)
    return rho, norms[-1] * rho / (1.0 - rho)


def power_table(
    transition: np.ndarray,
    stationary: np.ndarray,
    values: np.ndarray,
    *,
    j_max: int | None = None,
    tolerance: float = 1e-12,
) -> tuple[np.ndarray, float]:
    """
    Rows Q^0 f .. Q^J f and a bound on sum_{j>J} ||Q^j f||_inf.

    With j_max given, J = j_max and the tail comes from the ratio window at
    the end of the run; otherwise J is chosen by PowerSeries at `tolerance`.
    """
    if j_max is None:
        series = PowerSeries(transition, stationary, values, tolerance)
        rows = [term for _, term in series]
        return np.vstack(rows), series.tail_bound

    rows = []
    term = np.asarray(values, dtype=float)
    for j in range(j_max + 1):
        rows.append(term)
        term = transition @ term
        term = term - float(stationary @ term)
    table = np.vstack(rows)
    _, tail = ratio_tail(np.max(np.abs(table), axis=1))
    return table, tail


def powers_at(
    transition: np.ndarray,
    stationary: np.ndarray,
    values: np.ndarray,
    steps: list[int] | tuple[int, ...],
) -> tuple[dict[int, np.ndarray], dict[int, np.ndarray]]:
    """
    Q^m f and the Cesaro mean (1/m) sum_{j=1..m} Q^j f for each requested m.

    One pass up to max(steps).
    """
    wanted = set(int(s) for s in steps)
    at: dict[int, np.ndarray] = {}
    means: dict[int, np.ndarray] = {}
    term = np.asarray(values, dtype=float)
    total = np.zeros_like(term)
    if 0 in wanted:
        at[0] = term.copy()
        means[0] = np.zeros_like(term)
    for j in range(1, max(wanted, default=0) + 1):
        term = transition @ term
        term = term - float(stationary @ term)
        total = total + term
        if j in wanted:
            at[j] = term.copy()
            means[j] = total / j
    return at, means
