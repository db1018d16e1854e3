"""Variance, cost, and efficiency models for multi-sample MIS estimators.

Per-technique first and second moments are computed by adaptive
quadrature, from which closed-form expressions predict the variance of
the β-sample secondary estimators under three models: the exact
stochastic-rounding variance, the simplified convex surrogate that drops
the rounding noise for β > 1, and the variance of the
divide-by-rounded-count normalization. Inverse efficiency is the product
of total variance and total cost; its proxy gradient drops the MIS-weight
dependence on the budgets, which makes it exact for budget-unaware
weights.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .problems import MisProblem, WeightMode
from .estimator import _weight_matrix
from .quadrature import QuadratureError, gk_quad

__all__ = [
    "VarianceModel", "TechniqueStats", "MomentError", "MomentCache",
    "technique_moments", "secondary_variance", "total_variance",
    "total_cost", "inverse_efficiency", "inverse_efficiency_from_stats",
    "proxy_gradient", "true_gradient_fd", "gradient_agreement_map",
    "landscape_grids",
]

MOMENT_REL_TOL = 1e-8


class MomentError(RuntimeError):
    """Quadrature for a technique's moments failed to converge."""

    def __init__(self, message, technique):
        super().__init__(message)
        self.technique = technique


class VarianceModel(enum.Enum):
    EXACT_STOCHASTIC = "exact-stochastic"
    SIMPLIFIED = "simplified"
    NEAREST_ROUNDING = "nearest-rounding"


@dataclass(frozen=True)
class TechniqueStats:
    """Moments and cost of one technique's primary estimator."""

    first_moment: float
    second_moment: float
    variance: float
    cost: float

    def __post_init__(self):
        if self.cost <= 0.0:
            raise ValueError("technique cost must be positive")
        if self.second_moment < 0.0 or self.variance < 0.0:
            raise ValueError("second moment and variance must be >= 0")
        resid = abs(self.variance - (self.second_moment - self.first_moment**2))
        scale = max(self.second_moment, 1e-12)
        if resid > 1e-9 * scale:
            raise ValueError(
                "variance is inconsistent with the moments "
                f"({self.variance} vs {self.second_moment - self.first_moment**2})")

    @classmethod
    def from_moments(cls, first, second, cost):
        return cls(first_moment=float(first), second_moment=float(second),
                   variance=max(float(second) - float(first) ** 2, 0.0),
                   cost=float(cost))


def technique_moments(problem, beta=None, mode=WeightMode.BUDGET_UNAWARE):
    """Quadrature moments E[<I_t>] and E[<I_t>^2] for every technique.

    In budget-unaware mode the result does not depend on ``beta``. The
    second-moment integrand divides by the technique density, which is
    safe because the balance weights vanish wherever that density does.
    """
    if mode is WeightMode.BUDGET_AWARE and beta is None:
        raise ValueError("budget-aware moments require a budget vector")
    n_t = problem.n_techniques
    if beta is not None:
        beta = np.asarray(beta, dtype=float)

    def integrand(x):
        dens = problem.density_values(x)
        fs = problem.subintegrand_values(x)
        w = _weight_matrix(problem, x, mode, beta, strict=False)
        g = np.einsum("in,itn->tn", fs, w)
        second = np.where(dens > 0.0, g * g / np.where(dens > 0.0, dens, 1.0), 0.0)
        return np.concatenate([g, second], axis=0)

    try:
        totals, _ = gk_quad(integrand, *problem.domain,
                            breakpoints=problem.density_breakpoints(),
                            rel_tol=MOMENT_REL_TOL)
    except QuadratureError as exc:
        technique = exc.component % n_t if exc.component is not None else None
        raise MomentError(f"moment quadrature failed: {exc}", technique) from exc

    stats = []
    for t in range(n_t):
        stats.append(TechniqueStats.from_moments(
            totals[t], max(totals[n_t + t], 0.0), problem.costs[t]))
    return stats


def secondary_variance(stats, beta, model=VarianceModel.EXACT_STOCHASTIC):
    """Predicted variance of technique's β-sample secondary estimator.

    Accepts scalar or array ``beta``; all budgets must be positive.
    """
    beta_arr = np.asarray(beta, dtype=float)
    if np.any(beta_arr <= 0.0):
        raise ValueError("budgets must be positive")
    e, e2, v = stats.first_moment, stats.second_moment, stats.variance

    if model is VarianceModel.EXACT_STOCHASTIC:
        frac = beta_arr - np.floor(beta_arr)
        out = v / beta_arr + frac * (1.0 - frac) / beta_arr**2 * e * e
    elif model is VarianceModel.SIMPLIFIED:
        out = np.where(beta_arr <= 1.0, e2 / beta_arr - e * e, v / beta_arr)
    elif model is VarianceModel.NEAREST_ROUNDING:
        lo = np.maximum(np.floor(beta_arr), 1.0)
        q = np.maximum(beta_arr - lo, 0.0)
        split = v * (q / (lo + 1.0) + (1.0 - q) / lo)
        out = np.where(beta_arr <= 1.0, e2 / beta_arr - e * e, split)
    else:
        raise ValueError(f"unknown variance model {model!r}")
    out = np.maximum(out, 0.0)
    return out if isinstance(beta, np.ndarray) else float(out)


def total_variance(stats, beta, v_delta=0.0, model=VarianceModel.EXACT_STOCHASTIC):
    beta = np.asarray(beta, dtype=float)
    return float(sum(secondary_variance(s, float(b), model)
                     for s, b in zip(stats, beta)) + v_delta)


def total_cost(stats, beta, c_delta=0.0):
    beta = np.asarray(beta, dtype=float)
    return float(sum(float(b) * s.cost for s, b in zip(stats, beta)) + c_delta)


def inverse_efficiency_from_stats(stats, beta, v_delta, c_delta,
                                  model=VarianceModel.SIMPLIFIED):
    return (total_variance(stats, beta, v_delta, model)
            * total_cost(stats, beta, c_delta))


def inverse_efficiency(problem, beta, mode=WeightMode.BUDGET_UNAWARE,
                       model=VarianceModel.SIMPLIFIED, stats=None):
    """Total variance times total cost at the given budgets."""
    if stats is None:
        stats = technique_moments(problem, beta, mode)
    return inverse_efficiency_from_stats(
        stats, beta, problem.overhead_variance, problem.overhead_cost, model)


class MomentCache:
    """Memoizes budget-aware moments, keyed by the budget ratios.

    Balance weights are invariant under rescaling of the whole budget
    vector, so moments only depend on the ratios; this collapses the
    per-point quadrature work on log-spaced grids dramatically.
    """

    def __init__(self, problem, mode):
        self.problem = problem
        self.mode = mode
        self._cache = {}
        self._unaware_stats = None

    def stats(self, beta):
        if self.mode is WeightMode.BUDGET_UNAWARE:
            if self._unaware_stats is None:
                self._unaware_stats = technique_moments(self.problem, None, self.mode)
            return self._unaware_stats
        logb = np.log(np.asarray(beta, dtype=float))
        key = tuple(np.round(logb - logb.mean(), 10))
        hit = self._cache.get(key)
        if hit is None:
            hit = technique_moments(self.problem, beta, self.mode)
            self._cache[key] = hit
        return hit


def proxy_gradient(stats, beta, v_total, c_total):
    """Gradient of inverse efficiency with weight derivatives dropped.

    Component t is -M_t/beta_t^2 * C + V * C_t with M_t the second moment
    in the Russian-roulette regime (beta <= 1) and the variance otherwise.
    """
    beta = np.asarray(beta, dtype=float)
    m = np.array([s.second_moment if b <= 1.0 else s.variance
                  for s, b in zip(stats, beta)])
    costs = np.array([s.cost for s in stats])
    return -m / beta**2 * c_total + v_total * costs


def _fd_component(value_fn, beta, t, step, side):
    basis = np.zeros_like(beta)
    basis[t] = step
    if side == "central":
        return (value_fn(beta + basis) - value_fn(beta - basis)) / (2.0 * step)
    if side == "forward":
        return (value_fn(beta + basis) - value_fn(beta)) / step
    if side == "backward":
        return (value_fn(beta) - value_fn(beta - basis)) / step
    raise ValueError(f"unknown finite-difference side {side!r}")


def true_gradient_fd(problem, beta, mode=WeightMode.BUDGET_UNAWARE,
                     model=VarianceModel.SIMPLIFIED, h=1e-5, side="central",
                     cache=None):
    """Finite-difference gradient of the true inverse efficiency.

    Budget-aware moments are recomputed at every perturbed budget vector.
    Steps are relative (``h * beta_t``). A central step that would straddle
    the beta = 1 kink (or zero) is refused; pass a one-sided ``side`` or a
    smaller ``h`` there. ``side`` may also be "auto", which falls back to
    the one-sided difference pointing away from the kink.
    """
    beta = np.asarray(beta, dtype=float)
    if cache is None:
        cache = MomentCache(problem, mode)

    def value(b):
        return inverse_efficiency_from_stats(
            cache.stats(b), b, problem.overhead_variance,
            problem.overhead_cost, model)

    grad = np.empty_like(beta)
    for t in range(beta.size):
        step = h * beta[t]
        comp_side = side
        lo, hi = beta[t] - step, beta[t] + step
        straddles = (lo - 1.0) * (hi - 1.0) < 0.0 or lo <= 0.0
        if side == "auto":
            comp_side = "central"
            if straddles:
                comp_side = "forward" if beta[t] >= 1.0 else "backward"
        elif side == "central" and straddles:
            raise ValueError(
                f"step {step:.3g} around beta_{t}={beta[t]:.6g} crosses the "
                f"beta=1 kink (or zero); use a smaller h or a one-sided form")
        grad[t] = _fd_component(value, beta, t, step, comp_side)
    return grad


def gradient_agreement_map(problem, axes, mode=WeightMode.BUDGET_AWARE,
                           model=VarianceModel.SIMPLIFIED, h=1e-5):
    """Normalized dot product of proxy and true gradients on a budget grid.

    ``axes`` is one budget array per technique; the result has shape
    ``tuple(len(a) for a in axes)``. Budget-unaware weights make the proxy
    exact, so the map is 1.0 everywhere in that mode.
    """
    axes = [np.asarray(a, dtype=float) for a in axes]
    if len(axes) != problem.n_techniques:
        raise ValueError("need one budget axis per technique")
    cache = MomentCache(problem, mode)
    shape = tuple(a.size for a in axes)
    out = np.empty(shape)
    for idx in np.ndindex(shape):
        beta = np.array([axes[t][idx[t]] for t in range(len(axes))])
        stats = cache.stats(beta)
        v_tot = total_variance(stats, beta, problem.overhead_variance, model)
        c_tot = total_cost(stats, beta, problem.overhead_cost)
        g_proxy = proxy_gradient(stats, beta, v_tot, c_tot)
        g_true = true_gradient_fd(problem, beta, mode, model, h=h,
                                  side="auto", cache=cache)
        norm = math.sqrt(float(g_proxy @ g_proxy) * float(g_true @ g_true))
        out[idx] = 1.0 if norm < 1e-30 else float(g_proxy @ g_true) / norm
    return out


def landscape_grids(problem, axes, mode=WeightMode.BUDGET_UNAWARE,
                    model=VarianceModel.SIMPLIFIED, cache=None):
    """Total variance, cost, and inverse efficiency over a budget grid.

    Budget-unaware landscapes separate per axis and broadcast; the
    budget-aware path recomputes (cached) moments per grid point.
    """
    axes = [np.asarray(a, dtype=float) for a in axes]
    shape = tuple(a.size for a in axes)
    v_delta, c_delta = problem.overhead_variance, problem.overhead_cost
    if cache is None:
        cache = MomentCache(problem, mode)

    if mode is WeightMode.BUDGET_UNAWARE:
        stats = cache.stats(None)
        variance = np.full(shape, v_delta)
        cost = np.full(shape, c_delta)
        for t, axis in enumerate(axes):
            expand = [None] * len(axes)
            expand[t] = slice(None)
            sl = tuple(expand)
            variance = variance + secondary_variance(stats[t], axis, model)[sl]
            cost = cost + (axis * stats[t].cost)[sl]
        return variance, cost, variance * cost

    variance = np.empty(shape)
    cost = np.empty(shape)
    for idx in np.ndindex(shape):
        beta = np.array([axes[t][idx[t]] for t in range(len(axes))])
        stats = cache.stats(beta)
        variance[idx] = total_variance(stats, beta, v_delta, model)
        cost[idx] = total_cost(stats, beta, c_delta)
    return variance, cost, variance * cost
