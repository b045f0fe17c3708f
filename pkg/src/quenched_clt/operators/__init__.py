"""Exact Markov-operator calculus on finite state spaces."""

from .calculus import (
    apply_q,
    center,
    centered_values,
    f_m,
    g_f,
    long_run_variance,
    martingale_scheme,
    observable,
    poisson_solve,
    poisson_variance,
    stein_ratio,
    v_k,
)
from .series import PowerSeries, power_table, powers_at, ratio_tail
from .types import (
    MartingaleScheme,
    NegativeVariance,
    NoGeometricCertificate,
    NotCentered,
    Observable,
    OperatorError,
    SolveFailed,
    VarianceReport,
)

__all__ = [
    "MartingaleScheme",
    "NegativeVariance",
    "NoGeometricCertificate",
    "NotCentered",
    "Observable",
    "OperatorError",
    "PowerSeries",
    "SolveFailed",
    "VarianceReport",
    "apply_q",
    "center",
    "centered_values",
    "f_m",
    "g_f",
    "long_run_variance",
    "martingale_scheme",
    "observable",
    "poisson_solve",
    "poisson_variance",
    "power_table",
    "powers_at",
    "ratio_tail",
    "stein_ratio",
    "v_k",
]
