"""Tests for single-path sampling and streaming statistics."""

import numpy as np
import pytest

from quenched_clt.kernel import build_kernel
from quenched_clt.operators import martingale_scheme
from quenched_clt.simulation import (
    ChainEngine,
    PathTooLong,
    SimulationError,
    grid_steps,
    max_abs_partial_sum,
    path_statistics,
    sample_path,
    scaled_path,
)
from quenched_clt.simulation.engine import VECTOR_COMPARE_LIMIT


class TestChainEngine:
    def test_dense_and_search_paths_agree(self):
        size = 40
        rng = np.random.default_rng(5)
        table = rng.random((size, size)) + 0.01
        table[0, 3] = 0.0
        table[7, size - 1] = 0.0
        kernel = build_kernel(table / table.sum(axis=1, keepdims=True))
        engine = ChainEngine(kernel)
        assert engine.size > VECTOR_COMPARE_LIMIT
        states = rng.integers(0, size, 500)
        u = 1.0 - rng.random(500)
        dense = (engine.cdf[states] < u[:, None]).sum(axis=1)
        assert np.array_equal(engine.next_states(states, u), dense)

    def test_never_lands_on_zero_probability_column(self):
        kernel = build_kernel([[0.5, 0.5, 0.0], [0.0, 0.5, 0.5], [0.5, 0.0, 0.5]])
        engine = ChainEngine(kernel)
        path = engine.walk(0, np.array([1.0, 1.0, 1.0, 1e-300]))
        assert path.tolist() == [1, 2, 2, 0]

    def test_grid_steps(self):
        assert grid_steps(100, (0.29, 0.5, 1.0)).tolist() == [29, 50, 100]
        assert grid_steps(10, (0.0, 0.25)).tolist() == [0, 2]


class TestSamplePath:
    def test_shapes(self, chain, f, scheme):
        sample = sample_path(chain, f, scheme, 0, 50, (7, 0))
        assert sample.states.shape == (51,)
        assert sample.partial_sums.shape == (51,)
        assert sample.partial_sums[0] == 0.0
        assert sample.start_index == 0

    def test_deterministic(self, chain, f, scheme):
        a = sample_path(chain, f, scheme, 1, 200, (3, 4))
        b = sample_path(chain, f, scheme, 1, 200, (3, 4))
        assert np.array_equal(a.states, b.states)
        assert np.array_equal(a.partial_sums, b.partial_sums)

    def test_partial_sums_follow_states(self, chain, f, scheme):
        sample = sample_path(chain, f, scheme, 0, 30, 11)
        expected = np.cumsum(f.values[sample.states[:30]])
        assert np.allclose(sample.partial_sums[1:], expected)

    @pytest.mark.parametrize("m", [1, 5, 40])
    def test_decomposition(self, chain, f, m):
        scheme = martingale_scheme(chain, f, m)
        for index in range(5):
            sample = sample_path(chain, f, scheme, index % 2, 500, (1, index))
            assert sample.decomposition_error() <= 1e-9

    @pytest.mark.slow
    @pytest.mark.parametrize("m", [1, 5, 25])
    def test_decomposition_thousand_paths(self, chain, f, m):
        scheme = martingale_scheme(chain, f, m)
        worst = max(
            sample_path(chain, f, scheme, index % 2, 1000, (9, index)).decomposition_error()
            for index in range(1000)
        )
        assert worst <= 1e-9

    def test_decomposition_on_corpus(self, corpus, centered):
        for kernel in corpus.values():
            values = centered(kernel, np.arange(kernel.size, dtype=float))
            scheme = martingale_scheme(kernel, values, 3)
            sample = sample_path(kernel, values, scheme, 0, 300, 2)
            assert sample.decomposition_error() <= 1e-9

    def test_too_long(self, chain, f, scheme):
        with pytest.raises(PathTooLong) as exc:
            sample_path(chain, f, scheme, 0, 101, 0, max_path_length=100)
        assert exc.value.cap == 100

    def test_horizon_must_be_positive(self, chain, f, scheme):
        with pytest.raises(SimulationError):
            sample_path(chain, f, scheme, 0, 0, 0)


class TestScaledPath:
    def test_quarter_of_ten(self, chain, f, scheme):
        sample = sample_path(chain, f, scheme, 0, 10, 0)
        values = scaled_path(sample, [0.25, 1.0])
        assert values[0] == pytest.approx(sample.partial_sums[2] / np.sqrt(10))
        assert values[1] == pytest.approx(sample.partial_sums[10] / np.sqrt(10))

    def test_rejects_unsorted_grid(self, chain, f, scheme):
        sample = sample_path(chain, f, scheme, 0, 10, 0)
        with pytest.raises(ValueError):
            scaled_path(sample, [0.5, 0.25])

    def test_max_abs_partial_sum(self, chain, f, scheme):
        sample = sample_path(chain, f, scheme, 0, 64, 5)
        expected = np.max(np.abs(sample.partial_sums[1:])) / 8.0
        assert max_abs_partial_sum(sample) == pytest.approx(expected)
        assert max_abs_partial_sum(sample, "rbar") == pytest.approx(np.max(np.abs(sample.rbar[1:])) / 8.0)

    def test_max_abs_unknown_series(self, chain, f, scheme):
        sample = sample_path(chain, f, scheme, 0, 4, 5)
        with pytest.raises(ValueError):
            max_abs_partial_sum(sample, "theta")


class TestPathStatistics:
    def test_matches_sample_path(self, chain, f):
        scheme = martingale_scheme(chain, f, 4)
        sample = sample_path(chain, f, scheme, 0, 100, (8, 2))
        stats = path_statistics(chain, f, scheme, 0, 100, (8, 2), grid=(0.5, 1.0), block_length=7)
        assert stats.endpoint == pytest.approx(sample.partial_sums[-1])
        assert stats.max_abs == pytest.approx(np.max(np.abs(sample.partial_sums[1:])))
        assert stats.max_signed == pytest.approx(np.max(sample.partial_sums[1:]))
        increments = np.diff(sample.martingale)
        assert stats.sum_d_sq == pytest.approx(float(np.sum(increments**2)))
        assert stats.d_sq_grid[0] == pytest.approx(float(np.sum(increments[:50] ** 2)))
        assert stats.d_sq_grid[1] == pytest.approx(stats.sum_d_sq)

    def test_block_length_does_not_matter(self, chain, f, scheme):
        a = path_statistics(chain, f, scheme, 1, 257, 3, block_length=4096)
        b = path_statistics(chain, f, scheme, 1, 257, 3, block_length=13)
        assert a.endpoint == b.endpoint
        assert a.max_abs == b.max_abs
        assert np.array_equal(a.transition_counts, b.transition_counts)
        assert np.allclose(a.d_sq_grid, b.d_sq_grid)

    def test_transition_counts(self, chain, f, scheme):
        stats = path_statistics(chain, f, scheme, 0, 1000, 1)
        # pairs (xi_0, xi_1) .. (xi_n, xi_{n+1})
        assert int(stats.transition_counts.sum()) == 1001
        assert np.allclose(stats.empirical_rows().sum(axis=1), 1.0)
