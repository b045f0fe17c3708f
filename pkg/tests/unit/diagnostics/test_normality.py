"""Tests for the Kolmogorov-Smirnov based normality checks."""

import math

import numpy as np
import pytest
from scipy import stats

from quenched_clt.diagnostics import (
    DiagnosticsError,
    clt_test,
    fclt_test,
    finite_n_allowance,
    ks_critical,
    mixture_identity_check,
)
from quenched_clt.diagnostics.normality import SUP_TARGET
from quenched_clt.simulation import annealed_ensemble, quenched_by_state, quenched_ensemble


def normal_quantiles(count, sigma_sq):
    """Midpoint quantiles: KS distance to N(0, sigma_sq) is exactly 1 / (2 count)."""
    u = (np.arange(count) + 0.5) / count
    return stats.norm.ppf(u) * math.sqrt(sigma_sq)


class TestKsCritical:
    def test_value(self):
        assert ks_critical(100, 0.05) == pytest.approx(math.sqrt(-0.5 * math.log(0.025)) / 10)

    def test_invalid(self):
        with pytest.raises(DiagnosticsError):
            ks_critical(0, 0.05)
        with pytest.raises(DiagnosticsError):
            ks_critical(10, 1.5)


class TestFiniteNAllowance:
    def test_without_horizon(self):
        assert finite_n_allowance(None, 0.005, 0.75) == 0.005

    def test_shrinks_like_inverse_root(self):
        assert finite_n_allowance(5000, 0.005, 0.75) == pytest.approx(0.005 + 0.75 / math.sqrt(5000))
        assert finite_n_allowance(1250, 0.0, 0.75) == pytest.approx(2 * finite_n_allowance(5000, 0.0, 0.75))


class TestCltTest:
    def test_matching_sample_passes(self):
        result = clt_test(normal_quantiles(2000, 12.0), 12.0)
        assert result.ks_distance == pytest.approx(1 / 4000, abs=1e-9)
        assert result.passed
        assert result.count == 2000

    def test_horizon_widens_critical(self):
        sample = normal_quantiles(2000, 12.0)
        plain = clt_test(sample, 12.0)
        long = clt_test(sample, 12.0, n=5000)
        assert long.critical - plain.critical == pytest.approx(0.75 / math.sqrt(5000))
        assert clt_test(sample, 12.0, n=5000, finite_n=0.0).critical == pytest.approx(plain.critical)

    def test_false_rejection_rate(self):
        rng = np.random.default_rng(2024)
        samples = [rng.normal(0.0, math.sqrt(12.0), 500) for _ in range(200)]
        rejected = sum(not clt_test(s, 12.0, bias_allowance=0.0).passed for s in samples)
        # Binomial(200, ~0.05) has mean 10 and sd 3
        assert 1 <= rejected <= 20
        assert sum(not clt_test(s, 12.0).passed for s in samples) <= rejected

    def test_wrong_variance_fails(self):
        result = clt_test(normal_quantiles(2000, 48.0), 12.0)
        assert not result.passed

    def test_degenerate_limit(self):
        result = clt_test(np.full(100, 1e-3), 0.0, n=10_000)
        assert result.degenerate
        assert result.passed
        assert not clt_test(np.ones(100), 0.0, n=10_000).passed

    def test_empty_sample(self):
        with pytest.raises(DiagnosticsError):
            clt_test([], 1.0)


class TestFcltTest:
    def test_structure(self, chain, f):
        ensemble = quenched_ensemble(chain, f, 1, 0, 100, 400, 3)
        report = fclt_test(ensemble, 12.0)
        assert set(report.marginals) == set(ensemble.grid)
        assert report.correlation_limit == pytest.approx(3 / 20)
        assert report.sup_target == pytest.approx(SUP_TARGET)
        assert report.sup_tolerance == pytest.approx(0.01 + 0.75 / 10)
        assert report.marginals[0.25].critical == pytest.approx(ks_critical(400, 0.05) + 0.005 + 0.75 / 5)
        assert 0.0 <= report.sup_probability <= 1.0

    def test_sup_target(self):
        assert SUP_TARGET == pytest.approx(0.682689, abs=1e-6)

    def test_zero_observable_is_degenerate(self, chain):
        ensemble = quenched_ensemble(chain, [0.0, 0.0], 1, 0, 50, 40, 3)
        report = fclt_test(ensemble, 0.0)
        assert all(test.degenerate for test in report.marginals.values())
        assert report.sup_target == 1.0
        assert report.increment_correlation == 0.0
        assert report.passed


class TestMixtureIdentity:
    def test_pool_sizes_follow_pi(self, chain, f):
        annealed = annealed_ensemble(chain, f, 1, 200, 2000, 11)
        per_state = quenched_by_state(chain, f, 1, 200, 2000, 11)
        result = mixture_identity_check(chain, annealed, per_state)
        assert result.sizes == (2000, 2000)
        assert result.passed

    def test_empty_pool(self, chain, f):
        annealed = annealed_ensemble(chain, f, 1, 10, 20, 1)
        with pytest.raises(DiagnosticsError):
            mixture_identity_check(chain, annealed, {})
