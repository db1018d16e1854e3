"""Integration problems combining several sampling techniques.

A problem bundles the subintegrands f_i, the technique densities p_t, the
indicator matrix saying which technique estimates which subintegrand, and
the per-sample / overhead cost and variance constants. Problems validate
themselves on construction so that downstream estimators can assume a
well-posed setup.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .densities import compile_expression, density_from_spec
from .quadrature import gk_quad_scalar

__all__ = [
    "WeightMode", "ProblemValidationError", "MisProblem",
    "problem_from_dict", "load_problem",
]

DENSITY_NORMALIZATION_TOL = 1e-6
COVERAGE_SAMPLES = 10_000


class WeightMode(enum.Enum):
    """Whether MIS weights may depend on the per-technique budgets."""

    BUDGET_UNAWARE = "budget-unaware"
    BUDGET_AWARE = "budget-aware"


class ProblemValidationError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class MisProblem:
    """A 1-D multi-technique integration problem.

    ``indicator[i, t]`` is True when technique ``t`` estimates
    subintegrand ``i``. Costs are abstract units per primary sample.
    """

    domain: tuple
    subintegrands: tuple
    techniques: tuple
    indicator: np.ndarray
    costs: np.ndarray
    overhead_cost: float = 0.0
    overhead_variance: float = 0.0
    name: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "domain",
                           (float(self.domain[0]), float(self.domain[1])))
        object.__setattr__(self, "subintegrands", tuple(self.subintegrands))
        object.__setattr__(self, "techniques", tuple(self.techniques))
        object.__setattr__(self, "indicator",
                           np.asarray(self.indicator, dtype=bool))
        object.__setattr__(self, "costs",
                           np.asarray(self.costs, dtype=float))
        self._validate()

    @property
    def n_techniques(self):
        return len(self.techniques)

    @property
    def n_subintegrands(self):
        return len(self.subintegrands)

    def f_total(self, x):
        """Sum of all subintegrands."""
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for f in self.subintegrands:
            out += f(x)
        return out

    def subintegrand_values(self, x):
        """Stack f_i(x) into shape (n_subintegrands, n)."""
        x = np.asarray(x, dtype=float)
        return np.stack([f(x) for f in self.subintegrands])

    def density_values(self, x):
        """Stack p_t(x) into shape (n_techniques, n)."""
        x = np.asarray(x, dtype=float)
        return np.stack([p.pdf(x) for p in self.techniques])

    def density_breakpoints(self):
        pts = set()
        for p in self.techniques:
            pts.update(p.breakpoints())
        return tuple(sorted(pts))

    def reference_integral(self, rel_tol=1e-10):
        """High-accuracy quadrature of the full integrand."""
        total, _ = gk_quad_scalar(self.f_total, *self.domain,
                                  breakpoints=self.density_breakpoints(),
                                  rel_tol=rel_tol)
        return total

    def _validate(self):
        a, b = self.domain
        if not b > a:
            raise ProblemValidationError(f"empty domain [{a}, {b}]")
        n_i, n_t = len(self.subintegrands), len(self.techniques)
        if n_i == 0 or n_t == 0:
            raise ProblemValidationError("need >= 1 subintegrand and technique")
        if self.indicator.shape != (n_i, n_t):
            raise ProblemValidationError(
                f"indicator shape {self.indicator.shape} != ({n_i}, {n_t})")
        if not self.indicator.any(axis=1).all():
            missing = int(np.flatnonzero(~self.indicator.any(axis=1))[0])
            raise ProblemValidationError(
                f"subintegrand {missing} is estimated by no technique")
        if self.costs.shape != (n_t,) or np.any(self.costs <= 0):
            raise ProblemValidationError("costs must be positive, one per technique")
        if self.overhead_cost < 0 or self.overhead_variance < 0:
            raise ProblemValidationError("overhead constants must be >= 0")

        for t, density in enumerate(self.techniques):
            if density.domain != self.domain:
                raise ProblemValidationError(
                    f"technique {t} has domain {density.domain} != {self.domain}")
            mass, _ = gk_quad_scalar(density.pdf, a, b,
                                     breakpoints=density.breakpoints(),
                                     rel_tol=1e-10)
            if abs(mass - 1.0) > DENSITY_NORMALIZATION_TOL:
                raise ProblemValidationError(
                    f"technique {t} integrates to {mass:.9f}, not 1")

        # A subintegrand must never be nonzero where every admissible
        # technique has zero density; such problems are not unbiasedly
        # estimable. Checked on a stratified point set.
        x = a + (np.arange(COVERAGE_SAMPLES) + 0.5) * (b - a) / COVERAGE_SAMPLES
        dens = self.density_values(x)
        fs = np.abs(self.subintegrand_values(x))
        for i in range(n_i):
            admissible = dens[self.indicator[i]].sum(axis=0)
            bad = (admissible <= 0.0) & (fs[i] > 0.0)
            if bad.any():
                where = float(x[np.flatnonzero(bad)[0]])
                raise ProblemValidationError(
                    f"subintegrand {i} is nonzero near x={where:.6g} where no "
                    f"admissible technique has density")


def problem_from_dict(spec, name=""):
    """Build a validated problem from its JSON-style description."""
    try:
        domain = tuple(spec["domain"])
        subintegrands = tuple(compile_expression(e) for e in spec["subintegrands"])
        techniques = tuple(density_from_spec(s, domain) for s in spec["techniques"])
        indicator = np.asarray(spec["indicator"], dtype=bool)
        costs = np.asarray(spec["costs"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemValidationError(f"malformed problem description: {exc}") from exc
    return MisProblem(
        domain=domain,
        subintegrands=subintegrands,
        techniques=techniques,
        indicator=indicator,
        costs=costs,
        overhead_cost=float(spec.get("overhead_cost", 0.0)),
        overhead_variance=float(spec.get("overhead_variance", 0.0)),
        name=spec.get("name", name),
        metadata=dict(spec.get("metadata", {})),
    )


def load_problem(path):
    """Load a problem definition file (JSON)."""
    path = Path(path)
    try:
        spec = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ProblemValidationError(f"{path}: invalid JSON: {exc}") from exc
    return problem_from_dict(spec, name=path.stem)
