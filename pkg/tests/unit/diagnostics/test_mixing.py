"""Tests for the strong-mixing profile on the two-state chain."""

import pytest

from quenched_clt.diagnostics import (
    ConditionId,
    DiagnosticsError,
    QuantileDomainError,
    alpha_bar,
    covariance_bound_check,
    mixing_clt_condition,
    mixing_profile,
    quantile_fn,
    quantile_integral,
)


class TestAlphaBar:
    def test_first_lag(self, chain, f):
        # 0.375 * 0.6^k
        assert alpha_bar(chain, f, 1) == pytest.approx(0.225, abs=1e-12)
        assert alpha_bar(chain, f, 3) == pytest.approx(0.375 * 0.216, abs=1e-12)

    def test_iid_is_zero(self, iid_chain, centered):
        values = centered(iid_chain, [1.0, 2.0, 4.0])
        assert alpha_bar(iid_chain, values, 1) == pytest.approx(0.0, abs=1e-12)

    def test_constant_observable(self, chain):
        assert alpha_bar(chain, [0.0, 0.0], 1) == 0.0

    def test_lag_positive(self, chain, f):
        with pytest.raises(DiagnosticsError):
            alpha_bar(chain, f, 0)


class TestQuantile:
    def test_step_function(self, chain, f):
        q = quantile_fn(chain, f)
        assert q.knots == (0.0, 0.25, 1.0)
        assert q.values == (3.0, 1.0)
        assert q(0.1) == 3.0
        assert q(0.25) == 1.0
        assert q(1.0) == 0.0

    def test_integral(self, chain, f):
        q = quantile_fn(chain, f)
        assert quantile_integral(q, 0.225) == pytest.approx(2.025)
        # full integral is E f^2
        assert quantile_integral(q, 1.0) == pytest.approx(3.0)

    def test_domain(self, chain, f):
        q = quantile_fn(chain, f)
        with pytest.raises(QuantileDomainError):
            q(1.5)
        with pytest.raises(QuantileDomainError):
            q.integral_sq(-0.1)


class TestMixingProfile:
    def test_profile(self, chain, f):
        profile = mixing_profile(chain, f, 4)
        assert len(profile.alpha_bar) == 4
        assert profile.integrals[0] == pytest.approx(2.025)
        assert all(b <= a for a, b in zip(profile.alpha_bar, profile.alpha_bar[1:]))

    def test_covariance_bound(self, chain, f):
        check = covariance_bound_check(chain, f, 1)
        assert check.lhs == pytest.approx(1.8)
        assert check.rhs == pytest.approx(6.075)
        assert check.holds

    def test_covariance_bound_on_corpus(self, corpus, centered):
        for kernel in corpus.values():
            values = centered(kernel, [float(i % 2) for i in range(kernel.size)])
            for k in (1, 2, 5):
                assert covariance_bound_check(kernel, values, k).holds


class TestMixingCltCondition:
    def test_total(self, chain, f):
        report = mixing_clt_condition(chain, f)
        # sum_k 9 * 0.375 * 0.6^k
        assert report.condition_id == ConditionId.MIXING_RIO
        assert report.extra["total"] == pytest.approx(5.0625, abs=1e-8)
        assert report.tolerances["tail_bound"] < 1e-10

    def test_iid_stops_at_zero(self, iid_chain, centered):
        values = centered(iid_chain, [1.0, 2.0, 4.0])
        report = mixing_clt_condition(iid_chain, values)
        assert len(report.sequence) == 1
        assert report.extra["total"] == pytest.approx(0.0, abs=1e-12)
