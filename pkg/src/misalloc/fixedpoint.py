"""Fixed-point iteration for efficiency-optimal sample budgets.

Each iteration recomputes the technique statistics at the current
budgets (only needed for budget-aware weights), evaluates the closed-form
update for every technique simultaneously, clamps, and repeats until the
relative budget change drops below tolerance. The update has three cases:
a Russian-roulette candidate driven by the second moment, a splitting
candidate driven by the variance, and a fallback of exactly one sample
when the two candidates disagree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .efficiency import (MomentCache, VarianceModel, total_cost,
                         total_variance)
from .problems import WeightMode

__all__ = ["SolverConfig", "TrajectoryPoint", "Trajectory",
           "update_budget", "shared_update_budget", "solve"]


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 50
    tolerance: float = 1e-6
    clamp: tuple = (0.05, 20.0)
    clamp_enabled: bool = True
    shared_budget: bool = False

    def __post_init__(self):
        lo, hi = self.clamp
        if not (lo < 1.0 < hi):
            raise ValueError("clamp range must bracket 1")
        if self.tolerance <= 0 or self.max_iterations < 1:
            raise ValueError("tolerance and max_iterations must be positive")


@dataclass(frozen=True)
class TrajectoryPoint:
    iteration: int
    beta: np.ndarray
    variance: float
    cost: float
    inverse_efficiency: float


@dataclass
class Trajectory:
    points: list = field(default_factory=list)
    converged: bool = False
    oscillating: bool = False

    @property
    def final_beta(self):
        return self.points[-1].beta

    @property
    def final_inverse_efficiency(self):
        return self.points[-1].inverse_efficiency

    def inverse_efficiencies(self):
        return np.array([p.inverse_efficiency for p in self.points])

    def budgets(self):
        return np.stack([p.beta for p in self.points])


def _three_case(beta_rr, beta_s):
    """Resolve the update: RR if < 1, splitting if > 1, else one sample."""
    if beta_rr < 1.0:
        return beta_rr
    if beta_s > 1.0:
        return beta_s
    return 1.0


def update_budget(stats, v_total, c_total):
    """Closed-form efficiency-optimal budget for one technique."""
    if v_total <= 0.0 or c_total <= 0.0:
        raise ValueError("total variance and cost must be positive")
    ratio = c_total / (stats.cost * v_total)
    return _three_case(math.sqrt(ratio * stats.second_moment),
                       math.sqrt(ratio * stats.variance))


def shared_update_budget(stats, v_total, c_total):
    """One budget shared by all techniques, from the pooled moments."""
    if v_total <= 0.0 or c_total <= 0.0:
        raise ValueError("total variance and cost must be positive")
    cost_sum = sum(s.cost for s in stats)
    ratio = c_total / (cost_sum * v_total)
    return _three_case(
        math.sqrt(ratio * sum(s.second_moment for s in stats)),
        math.sqrt(ratio * sum(s.variance for s in stats)))


def solve(problem, init, mode=WeightMode.BUDGET_UNAWARE,
          model=VarianceModel.SIMPLIFIED, config=SolverConfig()):
    """Iterate the budget update until convergence; returns the trajectory.

    Budgets are updated simultaneously from one consistent set of totals
    and clamped after every step. Non-convergence (iteration cap, or the
    relative change growing for five consecutive iterations) is reported
    on the returned trajectory rather than raised.
    """
    beta = np.asarray(init, dtype=float).copy()
    if beta.shape != (problem.n_techniques,) or np.any(beta <= 0):
        raise ValueError("init must be a positive budget per technique")
    lo, hi = config.clamp
    if config.clamp_enabled:
        beta = np.clip(beta, lo, hi)

    cache = MomentCache(problem, mode)
    trajectory = Trajectory()
    v_delta, c_delta = problem.overhead_variance, problem.overhead_cost

    def record(i, b, stats):
        v = total_variance(stats, b, v_delta, model)
        c = total_cost(stats, b, c_delta)
        trajectory.points.append(
            TrajectoryPoint(i, b.copy(), v, c, v * c))
        return v, c

    stats = cache.stats(beta)
    v_tot, c_tot = record(0, beta, stats)

    growth_streak = 0
    prev_change = None
    for i in range(1, config.max_iterations + 1):
        if config.shared_budget:
            new = np.full_like(beta, shared_update_budget(stats, v_tot, c_tot))
        else:
            new = np.array([update_budget(s, v_tot, c_tot) for s in stats])
        if config.clamp_enabled:
            new = np.clip(new, lo, hi)

        change = float(np.max(np.abs(new - beta) / beta))
        beta = new
        stats = cache.stats(beta)
        v_tot, c_tot = record(i, beta, stats)

        if prev_change is not None and change > prev_change:
            growth_streak += 1
            if growth_streak >= 5:
                trajectory.oscillating = True
                return trajectory
        else:
            growth_streak = 0
        prev_change = change

        if change <= config.tolerance:
            trajectory.converged = True
            return trajectory
    return trajectory
