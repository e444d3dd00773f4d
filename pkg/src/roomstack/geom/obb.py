"""Oriented bounding boxes and planar-cluster classification."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from roomstack.errors import DegenerateGeometryError

OBB_TOL = 0.01
R_PLANE = 0.1
T_HZN = 0.95
T_VERT = 0.05

_UP = np.array([0.0, 1.0, 0.0])


@dataclass(frozen=True, eq=False)
class Obb:
    """Box with orthonormal ``axes`` (rows) and nonnegative ``half_extents``."""

    center: np.ndarray
    axes: np.ndarray
    half_extents: np.ndarray
    upright: bool

    def __post_init__(self) -> None:
        for name in ("center", "axes", "half_extents"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not np.allclose(self.axes @ self.axes.T, np.eye(3), atol=1e-6):
            raise DegenerateGeometryError("OBB axes must be orthonormal")
        if np.any(self.half_extents < 0):
            raise DegenerateGeometryError("OBB half extents must be nonnegative")

    @property
    def volume(self) -> float:
        return float(8.0 * np.prod(self.half_extents))

    def corners(self) -> np.ndarray:
        signs = np.array([[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)], dtype=float)
        return self.center + (signs * self.half_extents) @ self.axes


def _hull_2d(pts: np.ndarray) -> Optional[np.ndarray]:
    try:
        hull = ConvexHull(pts)
    except (QhullError, ValueError):
        return None
    return pts[hull.vertices]


def min_area_rect(pts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Minimum-area enclosing rectangle of 2-D points.

    Returns ``(center, axes, half_extents)`` with ``axes`` as two orthonormal
    rows. The optimal rectangle has one side collinear with a hull edge, so
    every hull-edge direction is tried. Collinear input yields a rectangle
    of zero width along the point line.
    """
    pts = np.asarray(pts, dtype=float)
    hull = _hull_2d(pts)
    if hull is None:
        centered = pts - pts.mean(axis=0)
        _, _, vt = np.linalg.svd(centered, full_matrices=True)
        axes = vt
        if axes[0, 0] < 0 or (axes[0, 0] == 0 and axes[0, 1] < 0):
            axes = -axes
        axes = np.array([axes[0], [-axes[0, 1], axes[0, 0]]])
        proj = pts @ axes.T
        lo, hi = proj.min(axis=0), proj.max(axis=0)
        return ((lo + hi) / 2) @ axes, axes, (hi - lo) / 2
    edges = np.roll(hull, -1, axis=0) - hull
    lengths = np.linalg.norm(edges, axis=1)
    dirs = edges[lengths > 0] / lengths[lengths > 0, None]
    # fold directions into [0, pi/2) so equivalent rectangles compare equal
    ang = np.mod(np.arctan2(dirs[:, 1], dirs[:, 0]), np.pi / 2)
    ang = np.unique(np.round(ang, 12))
    u = np.stack([np.cos(ang), np.sin(ang)], axis=1)
    v = np.stack([-u[:, 1], u[:, 0]], axis=1)
    pu = hull @ u.T
    pv = hull @ v.T
    area = (pu.max(axis=0) - pu.min(axis=0)) * (pv.max(axis=0) - pv.min(axis=0))
    k = int(np.argmin(area))
    axes = np.array([u[k], v[k]])
    lo = np.array([pu[:, k].min(), pv[:, k].min()])
    hi = np.array([pu[:, k].max(), pv[:, k].max()])
    return ((lo + hi) / 2) @ axes, axes, (hi - lo) / 2


def _box_along(points: np.ndarray, normal: np.ndarray) -> tuple[float, np.ndarray, np.ndarray, np.ndarray]:
    n = normal / np.linalg.norm(normal)
    helper = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 0.0, 1.0])
    a = np.cross(n, helper)
    a /= np.linalg.norm(a)
    b = np.cross(n, a)
    in_plane = points @ np.stack([a, b]).T
    c2, ax2, h2 = min_area_rect(in_plane)
    along = points @ n
    lo, hi = along.min(), along.max()
    basis = np.stack([a, b])
    axes = np.stack([ax2[0] @ basis, ax2[1] @ basis, n])
    center = c2 @ basis + n * (lo + hi) / 2
    half = np.array([h2[0], h2[1], (hi - lo) / 2])
    return float(8 * np.prod(half)), center, axes, half


def fit_upright_obb(points: np.ndarray) -> Obb:
    pts = np.asarray(points, dtype=float)
    c2, ax2, h2 = min_area_rect(pts[:, [0, 2]])
    ylo, yhi = pts[:, 1].min(), pts[:, 1].max()
    u = np.array([ax2[0, 0], 0.0, ax2[0, 1]])
    w = np.array([ax2[1, 0], 0.0, ax2[1, 1]])
    center = np.array([c2[0], (ylo + yhi) / 2, c2[1]])
    return Obb(center, np.stack([u, _UP, w]), np.array([h2[0], (yhi - ylo) / 2, h2[1]]), upright=True)


def fit_unconstrained_obb(points: np.ndarray) -> Obb:
    """Smallest box over candidate normals: principal axes plus 3-D hull facets."""
    pts = np.asarray(points, dtype=float)
    centered = pts - pts.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    candidates = [vt[i] for i in range(vt.shape[0])] + [np.eye(3)[i] for i in range(3)]
    try:
        hull = ConvexHull(pts)
        candidates.extend(hull.equations[:, :3])
    except (QhullError, ValueError):
        pass
    normals = np.array(candidates, dtype=float)
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)
    # n and -n define the same box
    flip = (normals[:, 0] < 0) | ((normals[:, 0] == 0) & (normals[:, 1] < 0))
    normals[flip] *= -1
    normals = np.unique(np.round(normals, 10), axis=0)
    best = None
    for n in normals:
        vol, center, axes, half = _box_along(pts, n)
        if best is None or vol < best[0] - 1e-15:
            best = (vol, center, axes, half)
    _, center, axes, half = best
    return Obb(center, axes, half, upright=False)


def fit_obb(points, tol: float = OBB_TOL) -> Obb:
    """Fit the upright box unless it is more than ``tol`` larger than the free box."""
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) < 3 or not np.all(np.isfinite(pts)):
        raise DegenerateGeometryError("need at least 3 finite points")
    centered = pts - pts.mean(axis=0)
    sv = np.linalg.svd(centered, compute_uv=False)
    if sv[0] <= 1e-12 or sv[1] <= 1e-9 * sv[0]:
        raise DegenerateGeometryError("points are collinear or coincident")
    upright = fit_upright_obb(pts)
    free = fit_unconstrained_obb(pts)
    return upright if upright.volume <= (1.0 + tol) * free.volume else free


@dataclass(frozen=True)
class PlaneClass:
    orientation: Literal["horizontal", "vertical", "neither"]
    normal: tuple[float, float, float]


def classify_plane(
    obb: Obb, r_plane: float = R_PLANE, t_hzn: float = T_HZN, t_vert: float = T_VERT
) -> Optional[PlaneClass]:
    """Planar test on a cluster's box; ``None`` when the box is not thin enough."""
    h = obb.half_extents
    k = int(np.argmin(h))
    others = [h[i] for i in range(3) if i != k]
    if not all(h[k] < r_plane * o for o in others):
        return None
    n = np.array(obb.axes[k], dtype=float)
    if abs(n[1]) > 1e-12:
        n = n if n[1] > 0 else -n
    else:
        lead = n[0] if abs(n[0]) > 1e-12 else n[2]
        n = n if lead > 0 else -n
    ny = abs(n[1])
    if ny >= t_hzn:
        kind = "horizontal"
    elif ny < t_vert:
        kind = "vertical"
    else:
        kind = "neither"
    return PlaneClass(kind, (float(n[0]), float(n[1]), float(n[2])))
