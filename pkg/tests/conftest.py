"""Shared fixtures: the canonical two-state chain and a few corpus kernels."""

import numpy as np
import pytest

from quenched_clt.config import Config
from quenched_clt.kernel.corpus import biased_cycle, iid, small_corpus, two_state
from quenched_clt.operators import martingale_scheme, observable


# =============================================================================
# Kernels
# =============================================================================

@pytest.fixture
def chain():
    """Q = [[0.7, 0.3], [0.1, 0.9]]; pi = (0.25, 0.75), second eigenvalue 0.6."""
    return two_state(0.3, 0.1)


@pytest.fixture
def f(chain):
    """f = (3, -1): centered under pi and an eigenvector, Qf = 0.6 f."""
    return observable([3.0, -1.0], chain)


@pytest.fixture
def iid_chain():
    return iid([0.2, 0.3, 0.5])


@pytest.fixture
def cycle():
    """Biased 3-cycle: uniform pi, not reversible."""
    return biased_cycle(3, 0.9)


@pytest.fixture
def corpus():
    return small_corpus()


@pytest.fixture
def scheme(chain, f):
    return martingale_scheme(chain, f, 1)


# =============================================================================
# Runtime configuration
# =============================================================================

@pytest.fixture
def config() -> Config:
    """Default test configuration."""
    return Config()


@pytest.fixture
def small_batches() -> Config:
    """Tiny batches and blocks so tests cross batch and block boundaries."""
    return Config.from_dict({"simulation": {"batch_size": 7, "block_length": 13}})


@pytest.fixture
def centered():
    """Subtract the pi-mean from raw per-state values."""
    def _center(kernel, values):
        values = np.asarray(values, dtype=float)
        return values - float(kernel.stationary @ values)
    return _center
