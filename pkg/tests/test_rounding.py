import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from misalloc.estimator import (low_discrepancy_round,
                                low_discrepancy_round_batch, rho,
                                stochastic_round)


class TestRho:
    def test_integer_budget_is_zero(self):
        assert rho(2.0) == 0.0
        assert rho(1.0) == 0.0

    def test_direct_values(self):
        assert rho(2.5) == pytest.approx(0.04)
        assert rho(0.5) == pytest.approx(1.0)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            rho(0.0)
        with pytest.raises(ValueError):
            rho(-1.5)

    @given(st.floats(min_value=1e-3, max_value=1e3))
    def test_nonnegative_and_bounded(self, beta):
        value = rho(beta)
        assert 0.0 <= value <= 0.25 / min(beta, 1.0) ** 2 + 1e-15


class TestStochasticRound:
    def test_integer_budget(self):
        for u in (0.0, 0.3, 0.999):
            assert stochastic_round(2.0, u) == 2

    def test_fractional_budget(self):
        assert stochastic_round(1.25, 0.1) == 2
        assert stochastic_round(1.25, 0.9) == 1

    def test_expectation_exact_on_dyadic_grid(self):
        # Midpoint u-grid makes the threshold count exact for dyadic
        # fractional parts, so the mean equals beta to machine precision.
        n = 1 << 16
        u = (np.arange(n) + 0.5) / n
        for beta in (1.25, 0.5, 3.75, 2.0):
            counts = stochastic_round(np.full(n, beta), u)
            assert abs(counts.mean() - beta) < 1e-12

    @given(st.floats(min_value=0.01, max_value=50.0),
           st.floats(min_value=0.0, max_value=0.999999))
    def test_rounds_to_neighbor(self, beta, u):
        out = stochastic_round(beta, u)
        assert out in (int(np.floor(beta)), int(np.floor(beta)) + 1)


class TestLowDiscrepancyRound:
    def test_trace_half_half(self):
        assert low_discrepancy_round([0.5, 0.5], 0.3).tolist() == [0, 1]

    def test_integer_budgets(self):
        for u in (0.0, 0.5, 0.99):
            assert low_discrepancy_round([2.0, 3.0], u).tolist() == [2, 3]

    def test_trace_carry(self):
        assert low_discrepancy_round([1.25, 0.75], 0.9).tolist() == [2, 0]

    def test_component_expectation_exact_on_dyadic_grid(self):
        n = 1 << 16
        u = (np.arange(n) + 0.5) / n
        beta = np.array([1.25, 0.5, 2.75])
        counts = low_discrepancy_round_batch(np.broadcast_to(beta, (n, 3)), u)
        np.testing.assert_allclose(counts.mean(axis=0), beta, atol=1e-12)

    @given(st.lists(st.floats(min_value=0.0, max_value=30.0), min_size=1,
                    max_size=6),
           st.floats(min_value=0.0, max_value=0.999999))
    @settings(max_examples=300)
    def test_total_within_one_sample(self, beta, u):
        counts = low_discrepancy_round(beta, u)
        total = sum(beta)
        assert np.floor(total) - 1e-9 <= counts.sum() <= np.ceil(total) + 1e-9
        assert abs(counts.sum() - total) < 1.0

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(0)
        beta = rng.uniform(0, 5, size=(64, 4))
        u = rng.random(64)
        batch = low_discrepancy_round_batch(beta, u)
        for i in range(64):
            assert batch[i].tolist() == low_discrepancy_round(beta[i], u[i]).tolist()
