"""Flatland BRDFs: diffuse and Phong-style glossy lobes over angles.

The reflection model lives on the half-circle above the shading normal.
Diffuse surfaces reflect albedo / 2 per radian; glossy surfaces use a
normalized cos^e lobe around the mirror direction. Glossy importance
sampling inverts a piecewise-constant table of the lobe, and the density
reported for MIS is exactly that staircase, so sampling and weighting
stay mutually consistent.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import beta as beta_fn

DIFFUSE = 0
GLOSSY = 1

LOBE_CELLS = 2048


def rotate(v, angle):
    """Rotate 2-D unit vectors by per-element angles."""
    c, s = np.cos(angle), np.sin(angle)
    return np.stack([v[..., 0] * c - v[..., 1] * s,
                     v[..., 0] * s + v[..., 1] * c], axis=-1)


def signed_angle(u, v):
    """Angle that rotates u onto v, in (-pi, pi]."""
    return np.arctan2(cross_z(u, v), dot(u, v))


def dot(u, v):
    return u[..., 0] * v[..., 0] + u[..., 1] * v[..., 1]


def cross_z(u, v):
    return u[..., 0] * v[..., 1] - u[..., 1] * v[..., 0]


def reflect(wo, n):
    """Mirror direction of wo about n (both pointing away from surface)."""
    return 2.0 * dot(wo, n)[..., None] * n - wo


class GlossyLobe:
    """Tabulated cos^e lobe over the offset angle phi in (-pi/2, pi/2)."""

    def __init__(self, exponent):
        self.exponent = float(exponent)
        self.norm = beta_fn(0.5, (self.exponent + 1.0) / 2.0)
        edges = np.linspace(-0.5 * math.pi, 0.5 * math.pi, LOBE_CELLS + 1)
        mids = 0.5 * (edges[:-1] + edges[1:])
        self._width = math.pi / LOBE_CELLS
        weights = np.cos(mids) ** self.exponent
        self._pdf = weights / (weights.sum() * self._width)
        self._cdf = np.concatenate([[0.0], np.cumsum(self._pdf) * self._width])
        self._cdf[-1] = 1.0

    def eval(self, phi):
        """Exact lobe value cos^e(phi)/norm, zero outside the half-circle."""
        c = np.cos(phi)
        return np.where(np.abs(phi) < 0.5 * math.pi,
                        np.maximum(c, 0.0) ** self.exponent / self.norm, 0.0)

    def pdf(self, phi):
        """Density of the tabulated sampler (per radian of phi)."""
        inside = np.abs(phi) < 0.5 * math.pi
        idx = np.clip(((phi + 0.5 * math.pi) / self._width).astype(int),
                      0, LOBE_CELLS - 1)
        return np.where(inside, self._pdf[idx], 0.0)

    def sample(self, u):
        idx = np.clip(np.searchsorted(self._cdf, u, side="right") - 1,
                      0, LOBE_CELLS - 1)
        mass = self._pdf[idx] * self._width
        frac = np.where(mass > 0, (u - self._cdf[idx]) / mass, 0.0)
        return -0.5 * math.pi + (idx + np.clip(frac, 0.0, 1.0)) * self._width


class MaterialTable:
    """Per-segment material parameters with batched BRDF operations.

    All directions point away from the surface and ``n`` is already
    oriented toward the viewer side of each hit.
    """

    def __init__(self, kinds, albedos, exponents):
        self.kinds = np.asarray(kinds, dtype=np.int64)
        self.albedos = np.asarray(albedos, dtype=float)
        self.exponents = np.asarray(exponents, dtype=float)
        if np.any(self.albedos < 0) or np.any(self.albedos >= 1.0):
            raise ValueError("albedo must lie in [0, 1)")
        self._lobes = {float(e): GlossyLobe(float(e))
                       for e in np.unique(self.exponents[self.kinds == GLOSSY])}

    def eval(self, seg, wi, n, wo):
        """BRDF value per hit; zero below the shading horizon."""
        above = dot(wi, n) > 0.0
        out = np.where(above, self.albedos[seg] * 0.5, 0.0)
        glossy = self.kinds[seg] == GLOSSY
        if glossy.any():
            phi = signed_angle(reflect(wo[glossy], n[glossy]), wi[glossy])
            vals = np.zeros(int(glossy.sum()))
            for e, lobe in self._lobes.items():
                sel = self.exponents[seg[glossy]] == e
                if sel.any():
                    vals[sel] = lobe.eval(phi[sel])
            out[glossy] = np.where(above[glossy],
                                   self.albedos[seg[glossy]] * vals, 0.0)
        return out

    def pdf(self, seg, wi, n, wo):
        """Sampling density in angle measure for the given directions."""
        out = np.maximum(dot(wi, n), 0.0) * 0.5
        glossy = self.kinds[seg] == GLOSSY
        if glossy.any():
            phi = signed_angle(reflect(wo[glossy], n[glossy]), wi[glossy])
            vals = np.zeros(int(glossy.sum()))
            for e, lobe in self._lobes.items():
                sel = self.exponents[seg[glossy]] == e
                if sel.any():
                    vals[sel] = lobe.pdf(phi[sel])
            out[glossy] = vals
        return out

    def sample(self, seg, n, wo, u):
        """Draw one direction per hit from the material's lobe."""
        u = np.asarray(u, dtype=float)
        # Diffuse: cosine-weighted around the normal via arcsin.
        wi = rotate(n, np.arcsin(2.0 * u - 1.0))
        glossy = self.kinds[seg] == GLOSSY
        if glossy.any():
            phi = np.zeros(int(glossy.sum()))
            for e, lobe in self._lobes.items():
                sel = self.exponents[seg[glossy]] == e
                if sel.any():
                    phi[sel] = lobe.sample(u[glossy][sel])
            wi[glossy] = rotate(reflect(wo[glossy], n[glossy]), phi)
        return wi
