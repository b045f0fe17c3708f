"""Tests for the maximal inequalities."""

import itertools

import numpy as np
import pytest

from quenched_clt.diagnostics import DiagnosticsError, TooLargeForExact, maximal_bound_check, rio_bound_check
from quenched_clt.diagnostics.inequalities import _exact_max_square, _rio_rhs


def brute_force_max_square(kernel, values, n):
    """E_pi max_{k<=n} S_k^2 summed over every path."""
    total = 0.0
    for path in itertools.product(range(kernel.size), repeat=n):
        prob = kernel.stationary[path[0]]
        for a, b in zip(path, path[1:]):
            prob *= kernel.transition[a, b]
        sums = np.cumsum(values[list(path)])
        total += prob * float(np.max(sums**2))
    return total


class TestExactEnumeration:
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_matches_brute_force(self, chain, f, n):
        assert _exact_max_square(chain, f.values, n) == pytest.approx(
            brute_force_max_square(chain, f.values, n), rel=1e-12
        )

    def test_single_step_is_second_moment(self, chain, f):
        assert _exact_max_square(chain, f.values, 1) == pytest.approx(3.0)

    def test_zero_probability_paths_pruned(self, cycle, centered):
        values = centered(cycle, [0.0, 1.0, 2.0])
        assert _exact_max_square(cycle, values, 4) == pytest.approx(brute_force_max_square(cycle, values, 4))


class TestRioBound:
    def test_rhs_small_n(self, chain, f):
        assert _rio_rhs(chain, f.values, 1) == pytest.approx(24.0)
        # 8 * 2 * 3 + 16 * E|f Qf| = 48 + 16 * 1.8
        assert _rio_rhs(chain, f.values, 2) == pytest.approx(76.8)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exact_on_corpus(self, corpus, centered, n):
        for name, kernel in corpus.items():
            values = centered(kernel, np.arange(kernel.size, dtype=float))
            check = rio_bound_check(kernel, values, n, mode="exact")
            assert check.mode == "exact"
            assert check.holds, name

    def test_auto_picks_exact(self, chain, f):
        assert rio_bound_check(chain, f, 8).mode == "exact"

    def test_auto_falls_back_to_monte_carlo(self, chain, f):
        check = rio_bound_check(chain, f, 30, count=500, seed=2)
        assert check.mode == "monte_carlo"
        assert check.standard_error > 0.0
        assert check.holds

    def test_exact_too_large(self, chain, f):
        with pytest.raises(TooLargeForExact) as exc:
            rio_bound_check(chain, f, 13, mode="exact")
        assert exc.value.paths == 2**13

    def test_unknown_mode(self, chain, f):
        with pytest.raises(DiagnosticsError):
            rio_bound_check(chain, f, 2, mode="fast")


class TestMaximalBound:
    def test_bound_value(self, chain, f):
        report = maximal_bound_check(chain, f, 0, [20, 10], 200, 1)
        # 24 E|f g_f| = 24 * 7.5
        assert report.bound == pytest.approx(180.0)
        assert report.n_grid == (10, 20)
        assert len(report.estimates) == 2
        assert report.holds

    def test_empty_grid(self, chain, f):
        with pytest.raises(DiagnosticsError):
            maximal_bound_check(chain, f, 0, [], 10, 1)

    @pytest.mark.slow
    @pytest.mark.parametrize("x", [0, 1])
    def test_long_horizon_well_below_bound(self, chain, f, x):
        report = maximal_bound_check(chain, f, x, [10_000], 1000, 5, threads=4)
        # E max S_k^2 / n is of order sigma^2 = 12
        assert report.estimates[0] + 3 * report.standard_errors[0] < report.bound
        assert report.estimates[0] < 60.0
