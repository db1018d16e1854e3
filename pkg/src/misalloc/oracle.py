"""Brute-force ground truth for budget optimality claims.

Exhaustive evaluation of inverse efficiency over a budget grid, plus the
three restricted optima that correspond to classic allocation schemes:
optimal mixture sampling on the unit-total-budget slice, a shared
splitting factor on the diagonal, and the combination that scales the
optimal mixture ratio. Everything is evaluated with the same efficiency
model the solver uses, so the comparisons are apples to apples.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .efficiency import (MomentCache, VarianceModel,
                         inverse_efficiency_from_stats, landscape_grids)
from .problems import WeightMode

__all__ = ["GridSpec", "GridSearchResult", "ConstrainedBaselines",
           "grid_search", "constrained_baselines", "oracle_summary"]

MAX_GRID_TECHNIQUES = 3


@dataclass(frozen=True)
class GridSpec:
    """Per-axis budget range and resolution for exhaustive search."""

    lo: float = 0.05
    hi: float = 20.0
    resolution: int = 128
    spacing: str = "log"

    def __post_init__(self):
        if self.lo <= 0 or self.hi <= self.lo:
            raise ValueError("grid range must satisfy 0 < lo < hi")
        if self.resolution < 2:
            raise ValueError("grid resolution must be >= 2")
        if self.spacing not in ("log", "linear"):
            raise ValueError(f"unknown spacing {self.spacing!r}")

    def axis(self):
        if self.spacing == "log":
            return np.geomspace(self.lo, self.hi, self.resolution)
        return np.linspace(self.lo, self.hi, self.resolution)


@dataclass
class GridSearchResult:
    argmin: np.ndarray
    minimum: float
    axes: list
    inverse_efficiency: np.ndarray
    variance: np.ndarray
    cost: np.ndarray


@dataclass
class ConstrainedBaselines:
    mixture: tuple        # ("OS") optimum on the sum(beta) = 1 slice
    shared: tuple         # ("RRS") optimum on the equal-budget diagonal
    scaled_mixture: tuple # ("O+R") optimal mixture ratio, rescaled
    evaluated: list = field(default_factory=list)


def grid_search(problem, mode=WeightMode.BUDGET_UNAWARE,
                model=VarianceModel.SIMPLIFIED, grid=GridSpec(), cache=None):
    """Evaluate inverse efficiency at every lattice point; return the minimum.

    Guarded to at most three techniques: the lattice grows exponentially,
    use the fixed-point solver for anything larger.
    """
    n_t = problem.n_techniques
    if n_t > MAX_GRID_TECHNIQUES:
        raise ValueError(
            f"grid search over {n_t} techniques is intractable; "
            f"use the fixed-point solver instead")
    axes = [grid.axis() for _ in range(n_t)]
    variance, cost, inv_eff = landscape_grids(problem, axes, mode, model,
                                              cache=cache)
    flat = int(np.argmin(inv_eff))
    idx = np.unravel_index(flat, inv_eff.shape)
    argmin = np.array([axes[t][idx[t]] for t in range(n_t)])
    return GridSearchResult(argmin=argmin, minimum=float(inv_eff[idx]),
                            axes=axes, inverse_efficiency=inv_eff,
                            variance=variance, cost=cost)


def _minimize_over(problem, betas, mode, model, cache):
    """Return (argmin budget vector, min inverse efficiency) over candidates."""
    v_delta, c_delta = problem.overhead_variance, problem.overhead_cost
    best_beta, best_val = None, np.inf
    for beta in betas:
        stats = cache.stats(beta)
        val = inverse_efficiency_from_stats(stats, beta, v_delta, c_delta, model)
        if val < best_val:
            best_beta, best_val = beta, val
    return np.asarray(best_beta), float(best_val)


def constrained_baselines(problem, mode=WeightMode.BUDGET_UNAWARE,
                          model=VarianceModel.SIMPLIFIED, grid=GridSpec(),
                          cache=None):
    """Optima of the three restricted allocation families (two techniques).

    Mixture sampling ("OS") optimizes the ratio r with budgets (r, 1-r);
    shared splitting ("RRS") optimizes a single factor on the diagonal;
    their combination ("O+R") fixes the OS ratio and optimizes the scale.
    All slices are restricted to the grid's budget box so the comparison
    against the unconstrained lattice minimum is over the same region.
    """
    if problem.n_techniques != 2:
        raise ValueError("constrained baselines are defined for two techniques")
    if cache is None:
        cache = MomentCache(problem, mode)
    res = grid.resolution
    lo, hi = grid.lo, grid.hi

    # OS: budgets (r, 1 - r); keep both components inside [lo, hi].
    r_lo, r_hi = max(lo, 1.0 - hi), min(1.0 - lo, hi)
    ratios = np.linspace(r_lo, r_hi, res)
    os_candidates = [np.array([r, 1.0 - r]) for r in ratios]
    os_beta, os_val = _minimize_over(problem, os_candidates, mode, model, cache)

    # RRS: equal budgets along the diagonal.
    diag = grid.axis()
    rrs_candidates = [np.array([s, s]) for s in diag]
    rrs_beta, rrs_val = _minimize_over(problem, rrs_candidates, mode, model, cache)

    # O+R: scale the optimal mixture ratio, staying inside the box.
    ratio = os_beta / os_beta.sum()
    s_lo = lo / ratio.min()
    s_hi = hi / ratio.max()
    scales = np.geomspace(s_lo, s_hi, res)
    opr_candidates = [s * ratio for s in scales]
    opr_beta, opr_val = _minimize_over(problem, opr_candidates, mode, model, cache)

    evaluated = os_candidates + rrs_candidates + opr_candidates
    return ConstrainedBaselines(mixture=(os_beta, os_val),
                                shared=(rrs_beta, rrs_val),
                                scaled_mixture=(opr_beta, opr_val),
                                evaluated=evaluated)


def oracle_summary(problem, mode=WeightMode.BUDGET_UNAWARE,
                   model=VarianceModel.SIMPLIFIED, grid=GridSpec()):
    """JSON-ready dict with the unconstrained minimum and the baselines.

    The unconstrained minimum is taken over the lattice plus every budget
    vector evaluated on the restricted slices (all of which lie inside the
    same budget box); this keeps the containment inequality exact instead
    of subject to lattice discretization.
    """
    cache = MomentCache(problem, mode)
    result = grid_search(problem, mode, model, grid, cache=cache)
    argmin, minimum = result.argmin, result.minimum
    summary = {}
    if problem.n_techniques == 2:
        base = constrained_baselines(problem, mode, model, grid, cache=cache)
        slice_beta, slice_val = _minimize_over(problem, base.evaluated,
                                               mode, model, cache)
        if slice_val < minimum:
            argmin, minimum = slice_beta, slice_val
        summary["baselines"] = {
            "OS": {"argmin": [float(b) for b in base.mixture[0]],
                   "min": base.mixture[1]},
            "RRS": {"argmin": [float(b) for b in base.shared[0]],
                    "min": base.shared[1]},
            "O+R": {"argmin": [float(b) for b in base.scaled_mixture[0]],
                    "min": base.scaled_mixture[1]},
        }
    summary["argmin"] = [float(b) for b in argmin]
    summary["min"] = float(minimum)
    return summary, result
