"""Efficiency-optimal sample allocation for multi-sample MIS.

The package combines an unbiased multi-sample MIS estimator with
stochastic rounding, closed-form variance/cost/efficiency models, a
fixed-point solver for per-technique sample budgets, brute-force grid
oracles, and a 2-D light-transport testbed with spatially varying
budgets.
"""

from .problems import (MisProblem, ProblemValidationError, WeightMode,
                       load_problem, problem_from_dict)
from .estimator import (CoverageError, SamplingInconsistencyError,
                        balance_weights, low_discrepancy_round,
                        primary_estimate, rho, run_estimator,
                        run_estimator_batch, stochastic_round)
from .efficiency import (MomentCache, TechniqueStats, VarianceModel,
                         gradient_agreement_map, inverse_efficiency,
                         proxy_gradient, secondary_variance,
                         technique_moments, total_cost, total_variance,
                         true_gradient_fd)
from .fixedpoint import SolverConfig, Trajectory, solve, update_budget
from .oracle import GridSpec, constrained_baselines, grid_search
from .corpus import corpus_names, load_corpus, load_corpus_problem

__version__ = "0.1.0"
