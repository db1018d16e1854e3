"""The unbiased multi-sample MIS estimator with stochastic rounding.

Sample counts are positive reals; a rounding function turns them into
integers per realization while the estimator keeps dividing by the
real-valued budget, which keeps the scheme unbiased. Two rounding
variants are provided: independent per-technique rounding and a
low-discrepancy variant that shares a single uniform variate across all
techniques so the realized total never deviates from the budgeted total
by a full sample.
"""

from __future__ import annotations

import numpy as np

from .problems import MisProblem, WeightMode

__all__ = [
    "CoverageError", "SamplingInconsistencyError",
    "rho", "stochastic_round", "low_discrepancy_round",
    "balance_weights", "primary_estimate",
    "run_estimator", "run_estimator_batch",
]


class CoverageError(ValueError):
    """No admissible technique has density at the queried point."""


class SamplingInconsistencyError(ValueError):
    """A sample was attributed to a technique with zero density there."""


def rho(beta):
    """Variance inflation caused by stochastic rounding.

    Equals (beta - floor(beta)) * (ceil(beta) - beta) / beta**2 and
    vanishes at integers. Accepts scalars or arrays; budgets must be > 0.
    """
    beta_arr = np.asarray(beta, dtype=float)
    if np.any(beta_arr <= 0.0):
        raise ValueError("budgets must be positive")
    frac = beta_arr - np.floor(beta_arr)
    out = frac * (1.0 - frac) / (beta_arr * beta_arr)
    return out if isinstance(beta, np.ndarray) else float(out)


def stochastic_round(beta, u):
    """Round up with probability equal to the fractional part.

    The expectation over u ~ U[0,1) equals beta exactly.
    """
    beta_arr = np.asarray(beta, dtype=float)
    if np.any(beta_arr <= 0.0):
        raise ValueError("budgets must be positive")
    base = np.floor(beta_arr)
    out = (base + (np.asarray(u) < beta_arr - base)).astype(int)
    return out if isinstance(beta, np.ndarray) else int(out)


def low_discrepancy_round(beta, u):
    """Round a whole budget vector using one shared uniform variate.

    The residual fractional part is carried from one technique to the
    next, so each count keeps expectation beta_t while the realized total
    stays within one sample of sum(beta).
    """
    beta = np.asarray(beta, dtype=float)
    if np.any(beta < 0.0):
        raise ValueError("budgets must be >= 0")
    counts = np.empty(beta.shape, dtype=int)
    r = float(u)
    for t in range(beta.size):
        counts[t] = int(np.floor(beta[t] + r))
        r += beta[t] - counts[t]
    return counts


def low_discrepancy_round_batch(beta, u):
    """Vectorized low-discrepancy rounding: (n, n_t) budgets, (n,) variates."""
    beta = np.asarray(beta, dtype=float)
    counts = np.empty(beta.shape, dtype=np.int64)
    r = np.asarray(u, dtype=float).copy()
    for t in range(beta.shape[1]):
        counts[:, t] = np.floor(beta[:, t] + r).astype(np.int64)
        r += beta[:, t] - counts[:, t]
    return counts


def _weight_matrix(problem, x, mode, beta, strict):
    """Balance-heuristic weights, shape (n_i, n_t, n).

    With ``strict`` the all-zero-denominator case raises; otherwise those
    weights are zero (valid wherever the corresponding f_i vanishes, which
    problem validation guarantees).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    dens = problem.density_values(x)
    if mode is WeightMode.BUDGET_AWARE:
        if beta is None:
            raise ValueError("budget-aware weights need a budget vector")
        beta = np.asarray(beta, dtype=float)
        # Normalizing by the largest budget leaves the weights unchanged,
        # conditions extreme budgets, and makes equal budgets reproduce the
        # unaware weights bit for bit.
        dens = dens * (beta / beta.max())[:, None]
    ind = problem.indicator
    contrib = ind[:, :, None] * dens[None, :, :]
    denom = contrib.sum(axis=1)
    if strict and np.any(denom <= 0.0):
        i, j = np.argwhere(denom <= 0.0)[0]
        raise CoverageError(
            f"no admissible technique has density for subintegrand {i} "
            f"at x={x[j]:.6g}")
    safe = np.where(denom > 0.0, denom, 1.0)
    return contrib / safe[:, None, :]


def balance_weights(problem, x, mode=WeightMode.BUDGET_UNAWARE, beta=None):
    """MIS weight matrix w[i, t] at a single point.

    Budget-aware weights multiply each density by its technique budget;
    both variants partition unity over the techniques that estimate each
    subintegrand.
    """
    w = _weight_matrix(problem, float(x), mode, beta, strict=True)
    return w[:, :, 0]


def primary_estimate(problem, t, x, w):
    """Single-sample estimate of technique ``t`` at ``x`` given weights."""
    p = float(problem.techniques[t].pdf(np.asarray([x]))[0])
    if p <= 0.0:
        raise SamplingInconsistencyError(
            f"technique {t} has zero density at its own sample x={x:.6g}")
    fs = problem.subintegrand_values(np.asarray([float(x)]))[:, 0]
    return float(np.dot(fs, np.asarray(w)[:, t]) / p)


def _primary_values(problem, t, x, mode, beta):
    """Vectorized primary estimates for technique ``t`` at points ``x``."""
    x = np.asarray(x, dtype=float)
    if x.size == 0:
        return np.zeros(0)
    p = problem.techniques[t].pdf(x)
    if np.any(p <= 0.0):
        raise SamplingInconsistencyError(
            f"technique {t} produced a sample where its density vanishes")
    w = _weight_matrix(problem, x, mode, beta, strict=False)[:, t, :]
    fs = problem.subintegrand_values(x)
    return (fs * w).sum(axis=0) / p


def run_estimator_batch(problem, beta, n_runs, mode=WeightMode.BUDGET_UNAWARE,
                        rounding="naive", rng=None, normalization="real"):
    """Draw ``n_runs`` independent realizations of the full estimator.

    ``rounding`` selects between independent per-technique stochastic
    rounding ("naive") and the shared-variate scheme ("low_discrepancy").
    ``normalization`` divides each technique sum by the real-valued budget
    ("real", the default) or by the realized count when splitting
    ("rounded"; used by the rounding study).
    """
    if rng is None:
        raise ValueError("an explicitly seeded numpy Generator is required")
    if rounding not in ("naive", "low_discrepancy"):
        raise ValueError(f"unknown rounding mode {rounding!r}")
    if normalization not in ("real", "rounded"):
        raise ValueError(f"unknown normalization {normalization!r}")
    beta = np.asarray(beta, dtype=float)
    n_t = problem.n_techniques
    if beta.shape != (n_t,) or np.any(beta <= 0.0):
        raise ValueError("budget vector must be positive, one entry per technique")

    if rounding == "naive":
        u = rng.random((n_runs, n_t))
        counts = (np.floor(beta)[None, :]
                  + (u < (beta - np.floor(beta))[None, :])).astype(np.int64)
    else:
        counts = low_discrepancy_round_batch(
            np.broadcast_to(beta, (n_runs, n_t)), rng.random(n_runs))

    estimates = np.zeros(n_runs)
    for t in range(n_t):
        c = counts[:, t]
        total = int(c.sum())
        if total == 0:
            continue
        x = problem.techniques[t].sample(rng.random(total))
        values = _primary_values(problem, t, x, mode, beta)
        run_idx = np.repeat(np.arange(n_runs), c)
        sums = np.zeros(n_runs)
        np.add.at(sums, run_idx, values)
        if normalization == "real" or beta[t] <= 1.0:
            estimates += sums / beta[t]
        else:
            estimates += np.where(c > 0, sums / np.maximum(c, 1), 0.0)
    return estimates


def run_estimator(problem, beta, mode=WeightMode.BUDGET_UNAWARE,
                  rounding="naive", rng=None):
    """One realization of the multi-sample MIS estimator."""
    return float(run_estimator_batch(problem, beta, 1, mode=mode,
                                     rounding=rounding, rng=rng)[0])
