"""Simple polygons in the xz-plane and the 2-D operations built on them.

Clipping, unions and point/boundary distances are delegated to shapely;
:class:`Polygon2` is the immutable, serialisable value that the rest of the
package passes around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import shapely
from shapely.geometry import MultiPolygon, Point, Polygon
from shapely.geometry.base import BaseGeometry

from roomstack.errors import InvalidPolygonError, OutsideRegionError

BOUNDARY_EPS = 1e-9

Point2 = tuple[float, float]


@dataclass(frozen=True, eq=True)
class Polygon2:
    """Ordered, simple polygon of (x, z) vertices. A closing repeat is dropped."""

    vertices: tuple[Point2, ...]

    def __post_init__(self) -> None:
        pts = [(float(x), float(z)) for x, z in self.vertices]
        if len(pts) > 1 and pts[0] == pts[-1]:
            pts = pts[:-1]
        if len(pts) < 3:
            raise InvalidPolygonError(f"polygon needs >= 3 vertices, got {len(pts)}")
        if not all(math.isfinite(c) for p in pts for c in p):
            raise InvalidPolygonError("polygon coordinates must be finite")
        object.__setattr__(self, "vertices", tuple(pts))
        shape = Polygon(pts)
        if not shape.is_valid:
            raise InvalidPolygonError(f"polygon is not simple: {shapely.is_valid_reason(shape)}")
        if shape.area <= 0:
            raise InvalidPolygonError("polygon has zero area")

    @cached_property
    def shape(self) -> Polygon:
        return Polygon(self.vertices)

    @property
    def area(self) -> float:
        return float(self.shape.area)

    @property
    def signed_area(self) -> float:
        """Shoelace area over (x, z); negative means clockwise."""
        v = np.asarray(self.vertices)
        x, z = v[:, 0], v[:, 1]
        return 0.5 * float(np.dot(x, np.roll(z, -1)) - np.dot(np.roll(x, -1), z))

    @property
    def is_clockwise(self) -> bool:
        return self.signed_area < 0

    def edges(self) -> list[tuple[Point2, Point2]]:
        v = self.vertices
        return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]

    def bounds(self) -> tuple[float, float, float, float]:
        return tuple(float(b) for b in self.shape.bounds)  # minx, minz, maxx, maxz

    def centroid(self) -> Point2:
        c = self.shape.centroid
        return (float(c.x), float(c.y))

    def representative_point(self) -> Point2:
        c = self.shape.centroid
        if self.shape.covers(c):
            return (float(c.x), float(c.y))
        p = self.shape.representative_point()
        return (float(p.x), float(p.y))

    def translated(self, dx: float, dz: float) -> "Polygon2":
        return Polygon2(tuple((x + dx, z + dz) for x, z in self.vertices))

    def to_list(self) -> list[list[float]]:
        return [[x, z] for x, z in self.vertices]

    @classmethod
    def from_list(cls, coords: Iterable[Sequence[float]]) -> "Polygon2":
        return cls(tuple((float(c[0]), float(c[1])) for c in coords))

    @classmethod
    def rectangle(cls, xmin: float, zmin: float, xmax: float, zmax: float) -> "Polygon2":
        return cls(((xmin, zmin), (xmax, zmin), (xmax, zmax), (xmin, zmax)))


def as_shape(poly: Polygon2 | BaseGeometry) -> BaseGeometry:
    return poly.shape if isinstance(poly, Polygon2) else poly


def polygons_from_shape(geom: BaseGeometry, min_area: float = 1e-10) -> list[Polygon2]:
    """Split a shapely geometry into simple :class:`Polygon2` pieces (exteriors only)."""
    if geom.is_empty:
        return []
    if isinstance(geom, Polygon):
        parts = [geom]
    elif isinstance(geom, MultiPolygon):
        parts = list(geom.geoms)
    else:
        parts = [g for g in getattr(geom, "geoms", []) if isinstance(g, (Polygon, MultiPolygon))]
        return [p for g in parts for p in polygons_from_shape(g, min_area)]
    out = []
    for part in parts:
        if part.area <= min_area:
            continue
        ring = shapely.geometry.Polygon(part.exterior).simplify(0.0)
        try:
            out.append(Polygon2(tuple((float(x), float(z)) for x, z in ring.exterior.coords)))
        except InvalidPolygonError:
            continue
    return out


def polygon_intersection_area(a: Polygon2, b: Polygon2) -> float:
    """Exact area of ``a ∩ b``; pieces of a split intersection are summed."""
    if not isinstance(a, Polygon2) or not isinstance(b, Polygon2):
        raise InvalidPolygonError("polygon_intersection_area expects Polygon2 inputs")
    inter = a.shape.intersection(b.shape).area
    return float(min(max(inter, 0.0), a.area, b.area))


def union_area(polys: Iterable[Polygon2 | BaseGeometry]) -> float:
    shapes = [as_shape(p) for p in polys]
    if not shapes:
        return 0.0
    return float(shapely.union_all(shapes).area)


def distance_to_boundary(p: Sequence[float], poly: Polygon2) -> float:
    """Distance from a point inside (or on) ``poly`` to its nearest edge."""
    pt = Point(float(p[0]), float(p[1]))
    ring = poly.shape.exterior
    d = float(ring.distance(pt))
    if d > BOUNDARY_EPS and not poly.shape.contains(pt):
        raise OutsideRegionError(f"point {tuple(p)} lies outside the region")
    return d


def segment_distance(p: Sequence[float], a: Sequence[float], b: Sequence[float]) -> float:
    """Euclidean distance from ``p`` to segment ``ab``."""
    px, pz = p
    ax, az = a
    bx, bz = b
    dx, dz = bx - ax, bz - az
    L2 = dx * dx + dz * dz
    t = 0.0 if L2 == 0 else max(0.0, min(1.0, ((px - ax) * dx + (pz - az) * dz) / L2))
    return math.hypot(px - (ax + t * dx), pz - (az + t * dz))


def rect_corners(x: float, z: float, width: float, depth: float, yaw_deg: float) -> np.ndarray:
    """Corners of a ``width`` x ``depth`` rectangle centred at (x, z), rotated by yaw.

    Local +x maps to (cos, -sin) and local +z (the facing side) to (sin, cos),
    i.e. a right-handed rotation about +y. Corner order: back-left, back-right,
    front-right, front-left, which is counter-clockwise in the (x, z) frame.
    """
    c, s = math.cos(math.radians(yaw_deg)), math.sin(math.radians(yaw_deg))
    ux, uz = c * width / 2, -s * width / 2
    vx, vz = s * depth / 2, c * depth / 2
    return np.array(
        [
            [x - ux - vx, z - uz - vz],
            [x + ux - vx, z + uz - vz],
            [x + ux + vx, z + uz + vz],
            [x - ux + vx, z - uz + vz],
        ]
    )


def rect_polygon(x: float, z: float, width: float, depth: float, yaw_deg: float) -> Polygon2:
    return Polygon2(tuple(map(tuple, rect_corners(x, z, width, depth, yaw_deg).tolist())))


def disc_polygon(x: float, z: float, radius: float, segments: int = 64) -> Polygon2:
    t = np.linspace(0.0, 2 * math.pi, segments, endpoint=False)
    return Polygon2(tuple(zip((x + radius * np.cos(t)).tolist(), (z + radius * np.sin(t)).tolist())))
