"""Probability densities over a closed interval, with inverse-CDF samplers.

Every density knows its own sampler and reports exactly the pdf of that
sampler, so importance-sampling ratios are consistent by construction.
Analytic densities (uniform, truncated Gaussian, mixtures thereof) invert
their CDFs in closed form; arbitrary shapes are handled by a piecewise-
constant representation on a uniform grid whose staircase pdf *is* the
sampled density.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "Density", "UniformDensity", "TruncatedGaussian", "MixtureDensity",
    "TabulatedDensity", "compile_expression", "density_from_spec",
]


class Density:
    """Base class: a normalized pdf on ``domain`` plus its inverse CDF."""

    def __init__(self, domain):
        a, b = float(domain[0]), float(domain[1])
        if not b > a or not (math.isfinite(a) and math.isfinite(b)):
            raise ValueError(f"invalid density domain [{a}, {b}]")
        self.domain = (a, b)

    def pdf(self, x):
        raise NotImplementedError

    def sample(self, u):
        """Map uniform variates in [0, 1) to samples via the inverse CDF."""
        raise NotImplementedError

    def breakpoints(self):
        """Interior points where the pdf is discontinuous."""
        return ()


class UniformDensity(Density):
    """Uniform over a sub-interval [lo, hi] of the domain (default: all)."""

    def __init__(self, domain, lo=None, hi=None):
        super().__init__(domain)
        self.lo = self.domain[0] if lo is None else float(lo)
        self.hi = self.domain[1] if hi is None else float(hi)
        if not (self.domain[0] <= self.lo < self.hi <= self.domain[1]):
            raise ValueError("uniform support must lie inside the domain")
        self._height = 1.0 / (self.hi - self.lo)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where((x >= self.lo) & (x <= self.hi), self._height, 0.0)

    def sample(self, u):
        return self.lo + (self.hi - self.lo) * np.asarray(u, dtype=float)

    def breakpoints(self):
        pts = []
        if self.lo > self.domain[0]:
            pts.append(self.lo)
        if self.hi < self.domain[1]:
            pts.append(self.hi)
        return tuple(pts)


class TruncatedGaussian(Density):
    """Gaussian restricted to the domain and renormalized."""

    def __init__(self, domain, mean, std):
        super().__init__(domain)
        if std <= 0:
            raise ValueError("std must be positive")
        self.mean = float(mean)
        self.std = float(std)
        a, b = self.domain
        self._cdf_a = ndtr((a - self.mean) / self.std)
        self._cdf_b = ndtr((b - self.mean) / self.std)
        self._mass = self._cdf_b - self._cdf_a
        if self._mass <= 1e-12:
            raise ValueError("gaussian has negligible mass on the domain")

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.mean) / self.std
        inside = (x >= self.domain[0]) & (x <= self.domain[1])
        dens = np.exp(-0.5 * z * z) / (self.std * math.sqrt(2.0 * math.pi))
        return np.where(inside, dens / self._mass, 0.0)

    def sample(self, u):
        u = np.asarray(u, dtype=float)
        p = self._cdf_a + u * self._mass
        x = self.mean + self.std * ndtri(p)
        return np.clip(x, self.domain[0], self.domain[1])


class MixtureDensity(Density):
    """Convex combination of densities sharing one domain.

    Sampling uses a single uniform variate: the component is picked from
    the cumulative mixture weights and the residual of the variate is
    rescaled and passed to that component's inverse CDF, which reproduces
    the mixture distribution exactly.
    """

    def __init__(self, components, weights):
        if len(components) == 0 or len(components) != len(weights):
            raise ValueError("need matching, nonempty components and weights")
        super().__init__(components[0].domain)
        for c in components:
            if c.domain != self.domain:
                raise ValueError("mixture components must share the domain")
        w = np.asarray(weights, dtype=float)
        if np.any(w < 0) or w.sum() <= 0:
            raise ValueError("mixture weights must be nonnegative, not all 0")
        self.components = tuple(components)
        self.weights = w / w.sum()
        self._cum = np.concatenate([[0.0], np.cumsum(self.weights)])
        self._cum[-1] = 1.0

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for w, c in zip(self.weights, self.components):
            if w > 0:
                out += w * c.pdf(x)
        return out

    def sample(self, u):
        u = np.asarray(u, dtype=float)
        out = np.empty_like(u)
        for j, c in enumerate(self.components):
            lo, hi = self._cum[j], self._cum[j + 1]
            if hi <= lo:
                continue
            sel = (u >= lo) & (u < hi) if hi < 1.0 else (u >= lo)
            if sel.any():
                out[sel] = c.sample((u[sel] - lo) / (hi - lo))
        return out

    def breakpoints(self):
        pts = set()
        for c in self.components:
            pts.update(c.breakpoints())
        return tuple(sorted(pts))


class TabulatedDensity(Density):
    """Piecewise-constant density on a uniform grid of cells.

    The staircase itself is the density being sampled: the pdf reports the
    cell heights and the sampler inverts the piecewise-linear CDF, so no
    approximation error enters the importance-sampling ratio.
    """

    MIN_CELLS = 2048

    def __init__(self, domain, values, cells=None):
        super().__init__(domain)
        v = np.asarray(values, dtype=float)
        if v.ndim != 1 or v.size < 2:
            raise ValueError("values must be a 1-D array of cell heights")
        if np.any(v < 0) or not np.all(np.isfinite(v)) or v.sum() <= 0:
            raise ValueError("cell values must be finite, >= 0, not all 0")
        self.values = v
        a, b = self.domain
        self._width = (b - a) / v.size
        mass = v.sum() * self._width
        self.values = v / mass
        self._cdf = np.concatenate([[0.0], np.cumsum(self.values) * self._width])
        self._cdf[-1] = 1.0

    @classmethod
    def from_function(cls, domain, fn, cells=4096):
        """Tabulate ``fn`` at cell midpoints (>= MIN_CELLS cells)."""
        cells = max(int(cells), cls.MIN_CELLS)
        a, b = float(domain[0]), float(domain[1])
        mids = a + (np.arange(cells) + 0.5) * (b - a) / cells
        return cls(domain, np.asarray(fn(mids), dtype=float))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        a, b = self.domain
        idx = np.clip(((x - a) / self._width).astype(int), 0, self.values.size - 1)
        return np.where((x >= a) & (x <= b), self.values[idx], 0.0)

    def sample(self, u):
        u = np.asarray(u, dtype=float)
        idx = np.searchsorted(self._cdf, u, side="right") - 1
        idx = np.clip(idx, 0, self.values.size - 1)
        cell_mass = self.values[idx] * self._width
        frac = np.where(cell_mass > 0, (u - self._cdf[idx]) / cell_mass, 0.0)
        a = self.domain[0]
        return a + (idx + np.clip(frac, 0.0, 1.0)) * self._width

    def breakpoints(self):
        a = self.domain[0]
        return tuple(a + i * self._width for i in range(1, self.values.size))


def _expr_gaussian(x, mean, std):
    z = (np.asarray(x, dtype=float) - mean) / std
    return np.exp(-0.5 * z * z) / (std * math.sqrt(2.0 * math.pi))


def _expr_uniform(x, lo, hi):
    x = np.asarray(x, dtype=float)
    return np.where((x >= lo) & (x < hi), 1.0 / (hi - lo), 0.0)


_EXPR_NAMESPACE = {
    "gaussian": _expr_gaussian,
    "uniform": _expr_uniform,
    "sin": np.sin, "cos": np.cos, "tan": np.tan, "exp": np.exp,
    "log": np.log, "sqrt": np.sqrt, "abs": np.abs, "floor": np.floor,
    "maximum": np.maximum, "minimum": np.minimum, "where": np.where,
    "clip": np.clip, "pi": math.pi, "e": math.e,
}


def compile_expression(expr):
    """Compile an expression in ``x`` into a vectorized callable.

    Available primitives: gaussian(x, mean, std), uniform(x, lo, hi),
    polynomials via ordinary arithmetic, and the usual numpy math names.
    """
    code = compile(expr, "<expression>", "eval")
    for name in code.co_names:
        if name != "x" and name not in _EXPR_NAMESPACE:
            raise ValueError(f"unknown name {name!r} in expression {expr!r}")

    def fn(x):
        ns = dict(_EXPR_NAMESPACE)
        ns["x"] = np.asarray(x, dtype=float)
        out = eval(code, {"__builtins__": {}}, ns)
        return np.broadcast_to(np.asarray(out, dtype=float), ns["x"].shape).copy()

    fn.expression = expr
    return fn


def density_from_spec(spec, domain):
    """Build a density from its JSON-style description."""
    kind = spec.get("type")
    if kind == "uniform":
        return UniformDensity(domain, spec.get("lo"), spec.get("hi"))
    if kind == "gaussian":
        return TruncatedGaussian(domain, spec["mean"], spec["std"])
    if kind == "mixture":
        comps = [density_from_spec(s, domain) for s in spec["components"]]
        return MixtureDensity(comps, spec["weights"])
    if kind == "expression":
        fn = compile_expression(spec["expr"])
        return TabulatedDensity.from_function(domain, fn, spec.get("cells", 4096))
    raise ValueError(f"unknown density type {kind!r}")
