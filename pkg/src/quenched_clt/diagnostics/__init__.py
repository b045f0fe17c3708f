"""Condition evaluators, mixing profiles, maximal inequalities and normality tests."""

from .averages import hopf_average_check, martingale_average_check, transition_frequency_check
from .conditions import (
    coboundary_check,
    conjecture_series,
    decay_verdict,
    negligibility_probe,
    projective_series,
    strong_condition_series,
    ui_probe,
)
from .inequalities import maximal_bound_check, rio_bound_check
from .mixing import (
    alpha_bar,
    covariance_bound_check,
    mixing_clt_condition,
    mixing_profile,
    quantile_fn,
    quantile_integral,
)
from .normality import clt_test, fclt_test, finite_n_allowance, ks_critical, mixture_identity_check
from .serializer import ReportSerializer
from .types import (
    AverageCheck,
    BoundCheck,
    ConditionId,
    ConditionReport,
    DiagnosticsError,
    FcltReport,
    MartingaleAverageCheck,
    MaximalBoundReport,
    MixingProfile,
    NormalityTest,
    QuantileDomainError,
    QuantileFunction,
    TooLargeForExact,
    TransitionFrequencyCheck,
    TwoSampleTest,
    Verdict,
)

__all__ = [
    "AverageCheck",
    "BoundCheck",
    "ConditionId",
    "ConditionReport",
    "DiagnosticsError",
    "FcltReport",
    "MartingaleAverageCheck",
    "MaximalBoundReport",
    "MixingProfile",
    "NormalityTest",
    "QuantileDomainError",
    "QuantileFunction",
    "ReportSerializer",
    "TooLargeForExact",
    "TransitionFrequencyCheck",
    "TwoSampleTest",
    "Verdict",
    "alpha_bar",
    "clt_test",
    "coboundary_check",
    "conjecture_series",
    "covariance_bound_check",
    "decay_verdict",
    "fclt_test",
    "finite_n_allowance",
    "hopf_average_check",
    "ks_critical",
    "martingale_average_check",
    "maximal_bound_check",
    "mixing_clt_condition",
    "mixing_profile",
    "mixture_identity_check",
    "negligibility_probe",
    "projective_series",
    "quantile_fn",
    "quantile_integral",
    "rio_bound_check",
    "strong_condition_series",
    "transition_frequency_check",
    "ui_probe",
]
