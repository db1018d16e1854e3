"""Independent brute-force oracles used to freeze expected test values.

These deliberately avoid the code paths they are meant to check: moments
come from plain Monte Carlo over the technique samplers and derivatives
from Richardson-extrapolated difference quotients of the scalar
objective.
"""

import numpy as np

from misalloc.efficiency import inverse_efficiency_from_stats, technique_moments
from misalloc.estimator import _primary_values
from misalloc.problems import WeightMode


def mc_moments(problem, n_samples, seed, mode=WeightMode.BUDGET_UNAWARE,
               beta=None):
    """Monte Carlo estimate of each technique's first/second moments."""
    rng = np.random.default_rng(seed)
    out = []
    for t in range(problem.n_techniques):
        x = problem.techniques[t].sample(rng.random(n_samples))
        v = _primary_values(problem, t, x, mode, beta)
        out.append((float(v.mean()), float((v * v).mean())))
    return out


def richardson_gradient(problem, beta, mode, model, h0=1e-2, levels=10,
                        side="forward"):
    """Richardson-extrapolated one-sided difference quotients.

    Evaluates difference quotients at steps h0 / 2**k for k < levels and
    extrapolates the triangular tableau; first-order one-sided quotients
    gain one order per level.
    """
    beta = np.asarray(beta, dtype=float)

    def value(b):
        stats = technique_moments(problem, b, mode)
        return inverse_efficiency_from_stats(
            stats, b, problem.overhead_variance, problem.overhead_cost, model)

    sign = 1.0 if side == "forward" else -1.0
    grad = np.empty_like(beta)
    f0 = value(beta)
    for t in range(beta.size):
        quotients = []
        for k in range(levels):
            h = h0 / 2.0 ** k
            step = np.zeros_like(beta)
            step[t] = sign * h
            quotients.append(sign * (value(beta + step) - f0) / h)
        tableau = np.asarray(quotients)
        for order in range(1, levels):
            tableau = (2.0 ** order * tableau[1:] - tableau[:-1]) / (2.0 ** order - 1.0)
        grad[t] = tableau[0]
    return grad
