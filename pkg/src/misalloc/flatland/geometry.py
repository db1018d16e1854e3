"""Vectorized 2-D ray/segment intersection for the flatland renderer.

Rays are (origin, unit direction) pairs; surfaces are line segments. All
queries are batched: N rays are tested against all M segments at once.
Self-intersection is avoided by excluding the segment a ray starts on
rather than by epsilon tuning.
"""

from __future__ import annotations

import numpy as np

NO_HIT = -1
_T_MIN = 1e-9


def cross2(ax, ay, bx, by):
    return ax * by - ay * bx


class SegmentSoup:
    """Packed segment endpoints with precomputed edges and normals."""

    def __init__(self, a, b):
        self.a = np.asarray(a, dtype=float).reshape(-1, 2)
        self.b = np.asarray(b, dtype=float).reshape(-1, 2)
        if self.a.shape != self.b.shape:
            raise ValueError("segment endpoint arrays must match")
        self.edge = self.b - self.a
        self.length = np.hypot(self.edge[:, 0], self.edge[:, 1])
        if self.size and np.any(self.length <= 0):
            raise ValueError("degenerate segment of zero length")
        with np.errstate(invalid="ignore", divide="ignore"):
            tangent = self.edge / np.where(self.length > 0, self.length, 1.0)[:, None]
        # Left-hand normal; shading orients it toward the incoming ray.
        self.normal = np.stack([-tangent[:, 1], tangent[:, 0]], axis=1)

    @property
    def size(self):
        return self.a.shape[0]

    def bounding_square(self, pad=1e-3):
        """Center and half-extent of a padded square around everything."""
        if self.size == 0:
            return np.zeros(2), 1.0
        points = np.concatenate([self.a, self.b])
        lo, hi = points.min(axis=0), points.max(axis=0)
        center = 0.5 * (lo + hi)
        half = 0.5 * float((hi - lo).max())
        return center, half * (1.0 + pad) + pad

    def intersect(self, origins, dirs, exclude=None):
        """First hit of each ray; returns (seg_id, t, point).

        ``exclude[i]`` names a segment id ray ``i`` may not hit (the one
        it starts on); pass NO_HIT entries for free-flying rays. Missing
        rays get seg_id NO_HIT and t = inf.
        """
        origins = np.asarray(origins, dtype=float).reshape(-1, 2)
        dirs = np.asarray(dirs, dtype=float).reshape(-1, 2)
        n = origins.shape[0]
        if self.size == 0 or n == 0:
            seg = np.full(n, NO_HIT, dtype=np.int64)
            t = np.full(n, np.inf)
            return seg, t, origins + dirs

        rel = self.a[None, :, :] - origins[:, None, :]          # (n, m, 2)
        denom = cross2(dirs[:, None, 0], dirs[:, None, 1],
                       self.edge[None, :, 0], self.edge[None, :, 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            t = cross2(rel[:, :, 0], rel[:, :, 1],
                       self.edge[None, :, 0], self.edge[None, :, 1]) / denom
            s = cross2(rel[:, :, 0], rel[:, :, 1],
                       dirs[:, None, 0], dirs[:, None, 1]) / denom
        valid = (np.abs(denom) > 1e-14) & (t > _T_MIN) & (s >= 0.0) & (s <= 1.0)
        if exclude is not None:
            valid &= np.arange(self.size)[None, :] != np.asarray(exclude)[:, None]
        t = np.where(valid, t, np.inf)
        seg = np.argmin(t, axis=1).astype(np.int64)
        tmin = t[np.arange(n), seg]
        seg = np.where(np.isfinite(tmin), seg, NO_HIT)
        points = origins + np.where(np.isfinite(tmin), tmin, 0.0)[:, None] * dirs
        return seg, tmin, points

    def occluded(self, p, q, seg_p, seg_q):
        """True where the open segment from p to q crosses other geometry.

        ``seg_p``/``seg_q`` are the segments the endpoints lie on and are
        not counted as occluders.
        """
        p = np.asarray(p, dtype=float).reshape(-1, 2)
        q = np.asarray(q, dtype=float).reshape(-1, 2)
        n = p.shape[0]
        if self.size == 0 or n == 0:
            return np.zeros(n, dtype=bool)
        d = q - p
        rel = self.a[None, :, :] - p[:, None, :]
        denom = cross2(d[:, None, 0], d[:, None, 1],
                       self.edge[None, :, 0], self.edge[None, :, 1])
        with np.errstate(divide="ignore", invalid="ignore"):
            t = cross2(rel[:, :, 0], rel[:, :, 1],
                       self.edge[None, :, 0], self.edge[None, :, 1]) / denom
            s = cross2(rel[:, :, 0], rel[:, :, 1],
                       d[:, None, 0], d[:, None, 1]) / denom
        blocking = ((np.abs(denom) > 1e-14)
                    & (t > _T_MIN) & (t < 1.0 - _T_MIN)
                    & (s >= 0.0) & (s <= 1.0))
        ids = np.arange(self.size)[None, :]
        blocking &= ids != np.asarray(seg_p)[:, None]
        blocking &= ids != np.asarray(seg_q)[:, None]
        return blocking.any(axis=1)
