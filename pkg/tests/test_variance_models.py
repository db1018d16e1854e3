import numpy as np
import pytest

from conftest import make_gaussian_problem
from misalloc.densities import TruncatedGaussian, UniformDensity
from misalloc.efficiency import (TechniqueStats, VarianceModel,
                                 secondary_variance, technique_moments,
                                 total_variance)
from misalloc.estimator import run_estimator_batch
from misalloc.problems import MisProblem, WeightMode

ALL_MODELS = list(VarianceModel)

UNIT = TechniqueStats(first_moment=1.0, second_moment=2.0, variance=1.0, cost=1.0)


def test_all_models_coincide_at_beta_one():
    for model in ALL_MODELS:
        assert secondary_variance(UNIT, 1.0, model) == pytest.approx(1.0)


def test_rr_regime_exact_equals_simplified():
    # beta = 0.5: exact 2V + E^2 equals simplified 2 E2 - E^2.
    exact = secondary_variance(UNIT, 0.5, VarianceModel.EXACT_STOCHASTIC)
    simp = secondary_variance(UNIT, 0.5, VarianceModel.SIMPLIFIED)
    assert exact == pytest.approx(2 * 1.0 + 1.0)
    assert simp == pytest.approx(2 * 2.0 - 1.0)
    assert exact == pytest.approx(simp)


def test_dropped_rounding_term_at_fractional_split():
    assert secondary_variance(UNIT, 2.5, VarianceModel.EXACT_STOCHASTIC) == \
        pytest.approx(0.44)
    assert secondary_variance(UNIT, 2.5, VarianceModel.SIMPLIFIED) == \
        pytest.approx(0.4)


def test_nearest_rounding_two_point_mixture():
    # beta = 2.5 mixes counts 2 and 3 evenly: V * (0.5/3 + 0.5/2).
    got = secondary_variance(UNIT, 2.5, VarianceModel.NEAREST_ROUNDING)
    assert got == pytest.approx(1.0 * (0.5 / 3.0 + 0.5 / 2.0))


@pytest.mark.parametrize("model", ALL_MODELS)
@pytest.mark.parametrize("beta", [0.13, 0.5, 0.99, 1.0, 2.0, 7.0])
def test_models_agree_below_one_and_at_integers(model, beta):
    rng = np.random.default_rng(5)
    for _ in range(50):
        e = rng.uniform(0.0, 2.0)
        e2 = e * e + rng.uniform(0.0, 3.0)
        stats = TechniqueStats.from_moments(e, e2, 1.0)
        a = secondary_variance(stats, beta, model)
        b = secondary_variance(stats, beta, VarianceModel.EXACT_STOCHASTIC)
        assert a == pytest.approx(b, abs=1e-12)


def test_total_variance_additive():
    stats = [UNIT, TechniqueStats(0.0, 0.5, 0.5, 2.0)]
    total = total_variance(stats, np.array([1.0, 1.0]), v_delta=1.0,
                           model=VarianceModel.SIMPLIFIED)
    assert total == pytest.approx(1.0 + 0.5 + 1.0)
    single = total_variance([TechniqueStats(0.0, 1.0, 1.0, 1.0)],
                            np.array([4.0]), v_delta=0.0,
                            model=VarianceModel.SIMPLIFIED)
    assert single == pytest.approx(0.25)


def single_technique_problem():
    dom = (0.0, 1.0)
    return MisProblem(
        domain=dom,
        subintegrands=(lambda x: 1.0 + np.sin(2.5 * np.asarray(x, float)),),
        techniques=(UniformDensity(dom),),
        indicator=[[True]],
        costs=[1.0],
    )


@pytest.mark.parametrize("beta", [0.4, 1.0, 1.7, 2.5])
def test_exact_stochastic_matches_simulation(beta):
    problem = single_technique_problem()
    stats = technique_moments(problem)
    predicted = secondary_variance(stats[0], beta,
                                   VarianceModel.EXACT_STOCHASTIC)
    est = run_estimator_batch(problem, np.array([beta]), 400_000,
                              rng=np.random.default_rng(int(beta * 100)))
    assert est.var(ddof=1) == pytest.approx(predicted, rel=0.03)


@pytest.mark.parametrize("beta", [1.7, 2.5, 3.2])
def test_nearest_rounding_matches_simulation(beta):
    problem = single_technique_problem()
    stats = technique_moments(problem)
    predicted = secondary_variance(stats[0], beta,
                                   VarianceModel.NEAREST_ROUNDING)
    est = run_estimator_batch(problem, np.array([beta]), 400_000,
                              rng=np.random.default_rng(int(beta * 31)),
                              normalization="rounded")
    assert est.var(ddof=1) == pytest.approx(predicted, rel=0.03)


def test_multi_technique_empirical_variance(fig2):
    stats = technique_moments(fig2)
    beta = np.array([1.7, 0.4])
    predicted = total_variance(stats, beta, v_delta=0.0,
                               model=VarianceModel.EXACT_STOCHASTIC)
    est = run_estimator_batch(fig2, beta, 1_000_000,
                              rng=np.random.default_rng(3))
    assert est.var(ddof=1) == pytest.approx(predicted, rel=0.02)


def test_stats_validation():
    with pytest.raises(ValueError, match="cost"):
        TechniqueStats(0.0, 1.0, 1.0, 0.0)
    with pytest.raises(ValueError, match="inconsistent"):
        TechniqueStats(1.0, 2.0, 0.5, 1.0)
    with pytest.raises(ValueError):
        secondary_variance(UNIT, 0.0)
