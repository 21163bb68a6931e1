"""Planar geometry helpers.

All coordinates are (x, y) tuples in meters in a single projected plane.
Geographic input (lon/lat degrees) is mapped onto that plane with an
equirectangular projection anchored at a reference point, which keeps every
downstream distance computation plain Euclidean.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial import cKDTree

Point = tuple[float, float]

EARTH_RADIUS_M = 6_371_000.0


def dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def dist_sq(a: Point, b: Point) -> float:
    dx = a[0] - b[0]
    dy = a[1] - b[1]
    return dx * dx + dy * dy


def lonlat_to_planar(lon: float, lat: float, lon0: float, lat0: float) -> Point:
    """Equirectangular projection (meters) anchored at (lon0, lat0)."""
    x = math.radians(lon - lon0) * EARTH_RADIUS_M * math.cos(math.radians(lat0))
    y = math.radians(lat - lat0) * EARTH_RADIUS_M
    return (x, y)


def polyline_length(points: Sequence[Point]) -> float:
    return sum(dist(points[i], points[i + 1]) for i in range(len(points) - 1))


def cumulative_offsets(points: Sequence[Point]) -> list[float]:
    """Arc-length offset of each vertex from the start of the polyline."""
    out = [0.0]
    for i in range(len(points) - 1):
        out.append(out[-1] + dist(points[i], points[i + 1]))
    return out


def point_along_polyline(points: Sequence[Point], offsets: Sequence[float],
                         s: float) -> Point:
    """Point at arc-length s, clamped to the polyline's extent."""
    if s <= 0.0:
        return points[0]
    total = offsets[-1]
    if s >= total:
        return points[-1]
    i = bisect_right(offsets, s) - 1
    seg = offsets[i + 1] - offsets[i]
    t = 0.0 if seg == 0.0 else (s - offsets[i]) / seg
    ax, ay = points[i]
    bx, by = points[i + 1]
    return (ax + t * (bx - ax), ay + t * (by - ay))


def sub_polyline(points: Sequence[Point], offsets: Sequence[float],
                 s0: float, s1: float) -> list[Point]:
    """Vertices between arc offsets s0 and s1 (reversed when s0 > s1)."""
    if s0 > s1:
        return list(reversed(sub_polyline(points, offsets, s1, s0)))
    out = [point_along_polyline(points, offsets, s0)]
    for off, pt in zip(offsets, points):
        if s0 < off < s1:
            out.append(pt)
    out.append(point_along_polyline(points, offsets, s1))
    return out


def project_point_to_segment(p: Point, a: Point, b: Point) -> tuple[float, Point]:
    """Perpendicular projection of p onto segment ab.

    Returns (t, q) where q is the closest point and t its position in [0, 1]
    along ab.
    """
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    denom = dx * dx + dy * dy
    if denom == 0.0:
        return 0.0, a
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / denom
    t = min(1.0, max(0.0, t))
    return t, (ax + t * dx, ay + t * dy)


def project_point_to_polyline(p: Point, points: Sequence[Point],
                              offsets: Sequence[float]) -> tuple[float, Point, float]:
    """Closest point on a polyline.

    Returns (arc offset, closest point, distance). Ties between segments go to
    the earliest offset.
    """
    best: tuple[float, Point, float] | None = None
    for i in range(len(points) - 1):
        t, q = project_point_to_segment(p, points[i], points[i + 1])
        d = dist(p, q)
        off = offsets[i] + t * (offsets[i + 1] - offsets[i])
        if best is None or d < best[2] - 1e-12:
            best = (off, q, d)
    assert best is not None, "polyline must have at least 2 vertices"
    return best


def uniform_point_in_disc(center: Point, radius: float, rng) -> Point:
    """Uniform sample inside a disc; rng is anything with .random()."""
    r = radius * math.sqrt(rng.random())
    ang = 2.0 * math.pi * rng.random()
    return (center[0] + r * math.cos(ang), center[1] + r * math.sin(ang))


class PointIndex:
    """Point index with exact circle queries.

    Backed by a KD-tree, but every result is re-checked with the same
    ``dx*dx + dy*dy <= r*r`` comparison a plain linear scan would use, so the
    returned set matches a brute-force scan bit for bit. Results are ordered
    by (distance, id).
    """

    def __init__(self, items: Iterable[tuple[str, Point]]):
        pairs = sorted(items)
        self._ids = [pid for pid, _ in pairs]
        self._pts = [pt for _, pt in pairs]
        self._tree = cKDTree(np.asarray(self._pts)) if self._pts else None

    def __len__(self) -> int:
        return len(self._ids)

    def query_circle(self, center: Point, radius: float) -> list[str]:
        if self._tree is None or radius < 0.0:
            return []
        # Slightly inflated query, then exact filter.
        idxs = self._tree.query_ball_point(center, radius * (1.0 + 1e-9) + 1e-9)
        r_sq = radius * radius
        hits = []
        for i in idxs:
            d_sq = dist_sq(self._pts[i], center)
            if d_sq <= r_sq:
                hits.append((d_sq, self._ids[i]))
        hits.sort()
        return [pid for _, pid in hits]
