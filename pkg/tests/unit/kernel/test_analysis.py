"""Tests for ergodicity, stationary laws and reversibility."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from quenched_clt.kernel import (
    NotErgodic,
    check_ergodic,
    check_reversible,
    k_step,
    stationary_distribution,
)
from quenched_clt.kernel.corpus import block_diagonal, rotation_cycle


class TestCheckErgodic:
    def test_two_state_gap(self, chain):
        report = check_ergodic(chain.transition)
        assert report.ergodic
        assert report.period == 1
        assert report.spectral_gap_estimate == pytest.approx(0.4, abs=1e-12)
        assert report.gap_method == "eigen"

    def test_rotation_cycle_period(self):
        report = check_ergodic(rotation_cycle(5))
        assert report.irreducible
        assert not report.aperiodic
        assert report.period == 5

    def test_block_diagonal_reducible(self):
        report = check_ergodic(block_diagonal([[1.0]], [[0.5, 0.5], [0.5, 0.5]]))
        assert not report.irreducible
        assert not report.ergodic

    def test_one_state(self):
        report = check_ergodic(np.array([[1.0]]))
        assert report.ergodic
        assert report.spectral_gap_estimate == 1.0

    def test_dobrushin_beyond_dense_limit(self):
        size = 80
        table = np.full((size, size), 1.0 / size)
        report = check_ergodic(table)
        assert report.gap_method == "dobrushin"
        assert report.spectral_gap_estimate == pytest.approx(1.0)


class TestStationaryDistribution:
    def test_two_state(self, chain):
        pi = stationary_distribution(chain.transition)
        assert np.allclose(pi, [0.25, 0.75], atol=1e-13)

    def test_periodic_raises(self):
        with pytest.raises(NotErgodic):
            stationary_distribution(rotation_cycle(3))

    def test_power_iteration_for_large_kernel(self):
        size = 100
        rng = np.random.default_rng(3)
        table = rng.random((size, size))
        table /= table.sum(axis=1, keepdims=True)
        pi = stationary_distribution(table)
        assert np.max(np.abs(pi @ table - pi)) <= 1e-12
        assert pi.sum() == pytest.approx(1.0)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(min_value=2, max_value=8), st.integers(min_value=0, max_value=2**32 - 1))
    def test_residual_property(self, size, seed):
        rng = np.random.default_rng(seed)
        table = rng.random((size, size)) + 0.01
        table /= table.sum(axis=1, keepdims=True)
        pi = stationary_distribution(table)
        assert np.all(pi > 0)
        assert np.max(np.abs(pi @ table - pi)) <= 1e-12


class TestReversibility:
    def test_two_state_is_reversible(self, chain):
        assert check_reversible(chain).reversible

    def test_biased_cycle_is_not(self, cycle):
        check = check_reversible(cycle)
        assert not check
        assert check.max_violation == pytest.approx((0.9 - 0.1) / 3)


class TestKStep:
    def test_powers(self, chain):
        assert np.allclose(k_step(chain, 0), np.eye(2))
        assert np.allclose(k_step(chain, 2), chain.transition @ chain.transition)

    def test_negative_power(self, chain):
        with pytest.raises(ValueError):
            k_step(chain, -1)

    def test_rows_converge_to_pi(self, chain):
        assert np.allclose(k_step(chain, 200), np.tile(chain.stationary, (2, 1)), atol=1e-12)
