"""Tests for ergodic-average checks."""

import numpy as np
import pytest

from quenched_clt.diagnostics import (
    DiagnosticsError,
    hopf_average_check,
    martingale_average_check,
    transition_frequency_check,
)


class TestHopfAverage:
    def test_exact_gap(self, chain):
        # (Q^k h)(0) = 0.25 + 0.75 * 0.6^k for h = 1{0}
        check = hopf_average_check(chain, [1.0, 0.0], 0, 1000)
        assert check.limit == pytest.approx(0.25)
        assert check.gap == pytest.approx(1.125 / 1000, rel=1e-9)

    def test_n_positive(self, chain):
        with pytest.raises(DiagnosticsError):
            hopf_average_check(chain, [1.0, 0.0], 0, 0)


class TestMartingaleAverage:
    def test_targets(self, chain, f):
        check = martingale_average_check(chain, f, 1, 0, 200, 3)
        assert check.sigma_m_sq == pytest.approx(1.92)
        assert check.targets == pytest.approx((0.48, 0.96, 1.44, 1.92))

    def test_long_path_converges(self, chain, f):
        check = martingale_average_check(chain, f, 1, 0, 20_000, 3)
        assert check.relative_errors[-1] < 0.15
        assert check.to_dict()["grid"] == [0.25, 0.5, 0.75, 1.0]


class TestTransitionFrequency:
    def test_long_path(self, chain):
        check = transition_frequency_check(chain, 0, 20_000, 1)
        assert check.passed
        assert check.max_deviation < 0.05
        assert int(check.visits.sum()) == 20_001
        assert np.allclose(check.empirical.sum(axis=1), 1.0)
