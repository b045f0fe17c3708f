"""Finite-state Markov kernels: construction, validation and analysis."""

from .analysis import check_ergodic, check_reversible, k_step, stationary_distribution
from .builder import build_kernel, lazy, metropolis_kernel, random_walk_kernel, validate_rows
from .loader import KernelLoader, load_kernel
from .types import (
    MAX_STATES,
    Disconnected,
    ErgodicityReport,
    KernelError,
    KernelTooLarge,
    MarkovKernel,
    NoConvergence,
    NonStochasticRow,
    NotErgodic,
    ReversibilityCheck,
    UnknownState,
    ZeroTargetWeight,
)

__all__ = [
    "MAX_STATES",
    "Disconnected",
    "ErgodicityReport",
    "KernelError",
    "KernelLoader",
    "KernelTooLarge",
    "MarkovKernel",
    "NoConvergence",
    "NonStochasticRow",
    "NotErgodic",
    "ReversibilityCheck",
    "UnknownState",
    "ZeroTargetWeight",
    "build_kernel",
    "check_ergodic",
    "check_reversible",
    "k_step",
    "lazy",
    "load_kernel",
    "metropolis_kernel",
    "random_walk_kernel",
    "stationary_distribution",
    "validate_rows",
]
