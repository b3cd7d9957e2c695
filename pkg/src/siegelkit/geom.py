"""Polyline geometry helpers: resampling, Hausdorff distance, intersections."""

from __future__ import annotations

import numpy as np
from matplotlib.path import Path as MplPath
from scipy.spatial import cKDTree


def as_xy(z):
    z = np.asarray(z)
    if np.iscomplexobj(z):
        return np.c_[z.real, z.imag]
    return np.asarray(z, dtype=float)


def arclength_param(z):
    """Cumulative arclength of a polyline, normalized to [0,1]."""
    xy = as_xy(z)
    seg = np.linalg.norm(np.diff(xy, axis=0), axis=1)
    s = np.concatenate([[0.0], np.cumsum(seg)])
    total = s[-1]
    if total == 0:
        return np.linspace(0.0, 1.0, len(xy))
    return s / total


def resample_polyline(z, n: int):
    """n points equally spaced in arclength along the polyline."""
    z = np.asarray(z, dtype=complex)
    s = arclength_param(z)
    t = np.linspace(0.0, 1.0, n)
    return np.interp(t, s, z.real) + 1j * np.interp(t, s, z.imag)


def directed_hausdorff(a, b) -> float:
    """max over a of the distance to the point set b."""
    tree = cKDTree(as_xy(b))
    d, _ = tree.query(as_xy(a))
    return float(d.max())


def hausdorff(a, b) -> float:
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


def point_in_polygon(points, polygon) -> np.ndarray:
    """Winding-number membership of points in a closed polygon (complex)."""
    path = MplPath(as_xy(polygon))
    return path.contains_points(as_xy(points))


def _seg_intersect(p1, p2, p3, p4, eps: float) -> bool:
    """Proper intersection test of segments p1p2 and p3p4 (2d arrays)."""
    d1 = p2 - p1
    d2 = p4 - p3
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(denom) < 1e-300:
        return False
    diff = p3 - p1
    t = (diff[0] * d2[1] - diff[1] * d2[0]) / denom
    u = (diff[0] * d1[1] - diff[1] * d1[0]) / denom
    return eps < t < 1 - eps and eps < u < 1 - eps


def polyline_self_intersects(z, closed: bool = True, eps: float = 1e-9) -> bool:
    """Segment-pair sweep for self-intersection at mesh resolution.

    Adjacent segments share endpoints by construction; the parameter slack
    `eps` keeps those contacts from counting.
    """
    xy = as_xy(z)
    if closed and np.linalg.norm(xy[0] - xy[-1]) > 0:
        xy = np.vstack([xy, xy[0]])
    n = len(xy) - 1
    if n < 3:
        return False
    p = xy[:-1]
    q = xy[1:]
    xmin = np.minimum(p[:, 0], q[:, 0])
    xmax = np.maximum(p[:, 0], q[:, 0])
    ymin = np.minimum(p[:, 1], q[:, 1])
    ymax = np.maximum(p[:, 1], q[:, 1])
    order = np.argsort(xmin)
    for ii in range(n):
        i = order[ii]
        for jj in range(ii + 1, n):
            j = order[jj]
            if xmin[j] > xmax[i]:
                break
            if abs(i - j) <= 1 or (closed and abs(i - j) == n - 1):
                continue
            if ymin[j] > ymax[i] or ymax[j] < ymin[i]:
                continue
            if _seg_intersect(p[i], q[i], p[j], q[j], eps):
                return True
    return False
