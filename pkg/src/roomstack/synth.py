"""Procedural furniture meshes with analytically known support surfaces.

Used by the test-suite, the acceptance harness and the example fixtures.
Plates are single-sided quads (zero thickness) unless a thickness is given,
in which case closed boxes are emitted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from roomstack.geom.mesh import TriMesh, concatenate


def quad(corners, up: bool = True) -> TriMesh:
    """Two-triangle quad; ``corners`` ordered counter-clockwise seen from its front."""
    v = np.asarray(corners, dtype=float)
    f = np.array([[0, 1, 2], [0, 2, 3]])
    return TriMesh.from_arrays(v, f if up else f[:, ::-1])


def hplate(xmin: float, xmax: float, zmin: float, zmax: float, y: float, up: bool = True) -> TriMesh:
    """Horizontal plate; the upward normal is (0, 1, 0) when ``up``."""
    return quad([[xmin, y, zmin], [xmin, y, zmax], [xmax, y, zmax], [xmax, y, zmin]], up)


def vplate_x(x: float, ymin: float, ymax: float, zmin: float, zmax: float) -> TriMesh:
    """Vertical plate in the plane x = const, normal +x."""
    return quad([[x, ymin, zmin], [x, ymax, zmin], [x, ymax, zmax], [x, ymin, zmax]])


def vplate_z(z: float, xmin: float, xmax: float, ymin: float, ymax: float) -> TriMesh:
    """Vertical plate in the plane z = const, normal -z."""
    return quad([[xmin, ymin, z], [xmin, ymax, z], [xmax, ymax, z], [xmax, ymin, z]])


def box(lo, hi) -> TriMesh:
    """Closed axis-aligned box with outward normals (12 triangles)."""
    (x0, y0, z0), (x1, y1, z1) = lo, hi
    v = np.array(
        [[x0, y0, z0], [x1, y0, z0], [x1, y1, z0], [x0, y1, z0], [x0, y0, z1], [x1, y0, z1], [x1, y1, z1], [x0, y1, z1]],
        dtype=float,
    )
    f = np.array(
        [
            [0, 2, 1], [0, 3, 2],  # z0, normal -z
            [4, 5, 6], [4, 6, 7],  # z1, normal +z
            [0, 1, 5], [0, 5, 4],  # y0, normal -y
            [3, 7, 6], [3, 6, 2],  # y1, normal +y
            [0, 4, 7], [0, 7, 3],  # x0, normal -x
            [1, 2, 6], [1, 6, 5],  # x1, normal +x
        ]
    )
    return TriMesh.from_arrays(v, f)


def uv_sphere(radius: float = 0.5, n_lat: int = 24, n_lon: int = 48, center=(0.0, 0.5, 0.0)) -> TriMesh:
    """Latitude/longitude sphere."""
    verts = [[0.0, radius, 0.0]]
    for i in range(1, n_lat):
        theta = np.pi * i / n_lat
        for j in range(n_lon):
            phi = 2 * np.pi * j / n_lon
            verts.append([radius * np.sin(theta) * np.cos(phi), radius * np.cos(theta), radius * np.sin(theta) * np.sin(phi)])
    verts.append([0.0, -radius, 0.0])
    faces = []
    ring = lambda i, j: 1 + (i - 1) * n_lon + (j % n_lon)  # noqa: E731
    for j in range(n_lon):
        faces.append([0, ring(1, j + 1), ring(1, j)])
    for i in range(1, n_lat - 1):
        for j in range(n_lon):
            a, b, c, d = ring(i, j), ring(i, j + 1), ring(i + 1, j + 1), ring(i + 1, j)
            faces.append([a, b, c])
            faces.append([a, c, d])
    south = len(verts) - 1
    for j in range(n_lon):
        faces.append([south, ring(n_lat - 1, j), ring(n_lat - 1, j + 1)])
    return TriMesh.from_arrays(np.array(verts) + np.asarray(center), np.array(faces))


@dataclass(frozen=True)
class ExpectedRegion:
    surface_height: float
    clearance: float
    is_top: bool
    area: float
    footprint: tuple[float, float, float, float]  # xmin, zmin, xmax, zmax


@dataclass(frozen=True)
class Bookcase:
    """A bookcase and its analytic support regions for a given clearance threshold."""

    n_shelves: int
    spacing: float
    width: float = 0.8
    depth: float = 0.3
    thickness: float = 0.0
    divider: bool = False
    divider_thickness: float = 0.02
    back_panel: bool = False
    mesh: TriMesh = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mesh", self._build())

    @property
    def top_height(self) -> float:
        return self.n_shelves * self.spacing + self.thickness

    def shelf_heights(self) -> list[float]:
        """Heights of the upward-facing shelf surfaces below the top."""
        return [i * self.spacing + self.thickness for i in range(self.n_shelves)]

    def _build(self) -> TriMesh:
        W, D, t = self.width, self.depth, self.thickness
        hx, hz = W / 2, D / 2
        H = self.top_height
        parts = [vplate_x(-hx, 0.0, H, -hz, hz), vplate_x(hx, 0.0, H, -hz, hz)]
        if self.back_panel:
            parts.append(vplate_z(-hz, -hx, hx, 0.0, H))
        for i in range(self.n_shelves + 1):
            y = i * self.spacing
            if t > 0:
                parts.append(box((-hx, y, -hz), (hx, y + t, hz)))
            else:
                parts.append(hplate(-hx, hx, -hz, hz, y))
        if self.divider:
            d = self.divider_thickness / 2
            parts.append(box((-d, 0.0, -hz), (d, self.n_shelves * self.spacing, hz)))
        return concatenate(parts)

    def expected(self, t_clear: float = 0.5, h_top: float = 1.0) -> list[ExpectedRegion]:
        W, D = self.width, self.depth
        hx, hz = W / 2, D / 2
        gap = self.spacing - self.thickness
        out = []
        for y in self.shelf_heights():
            if gap < t_clear:
                continue
            if self.divider:
                d = self.divider_thickness / 2
                half = (hx - d) * D
                out.append(ExpectedRegion(y, gap, False, half, (-hx, -hz, -d, hz)))
                out.append(ExpectedRegion(y, gap, False, half, (d, -hz, hx, hz)))
            else:
                out.append(ExpectedRegion(y, gap, False, W * D, (-hx, -hz, hx, hz)))
        out.append(ExpectedRegion(self.top_height, h_top, True, W * D, (-hx, -hz, hx, hz)))
        out.sort(key=lambda r: (r.surface_height, -r.area, r.footprint[0]))
        return out


def bookcase(n_shelves: int = 3, spacing: float = 0.6, **kw) -> Bookcase:
    return Bookcase(n_shelves, spacing, **kw)


def table(width: float = 1.2, depth: float = 0.6, height: float = 0.75, top_thickness: float = 0.03, leg: float = 0.05) -> TriMesh:
    hx, hz = width / 2, depth / 2
    parts = [box((-hx, height - top_thickness, -hz), (hx, height, hz))]
    for sx in (-1, 1):
        for sz in (-1, 1):
            cx, cz = sx * (hx - leg / 2), sz * (hz - leg / 2)
            parts.append(box((cx - leg / 2, 0.0, cz - leg / 2), (cx + leg / 2, height - top_thickness, cz + leg / 2)))
    return concatenate(parts)


def tabletop(width: float = 1.2, depth: float = 0.6, height: float = 0.7) -> TriMesh:
    return hplate(-width / 2, width / 2, -depth / 2, depth / 2, height)


def nightstand(width: float = 0.5, depth: float = 0.4, height: float = 0.6, shelf_height: float = 0.05) -> TriMesh:
    """Open nightstand: side walls, back, a low shelf and a top."""
    hx, hz = width / 2, depth / 2
    return concatenate(
        [
            vplate_x(-hx, 0.0, height, -hz, hz),
            vplate_x(hx, 0.0, height, -hz, hz),
            vplate_z(-hz, -hx, hx, 0.0, height),
            hplate(-hx, hx, -hz, hz, shelf_height),
            hplate(-hx, hx, -hz, hz, height),
        ]
    )


def solid(width: float, height: float, depth: float) -> TriMesh:
    """Closed box resting on y = 0, centred in x and z."""
    return box((-width / 2, 0.0, -depth / 2), (width / 2, height, depth / 2))


def shelf_unit(n_shelves: int = 3, spacing: float = 0.6, dividers: int = 1, width: float = 1.2, depth: float = 0.35) -> TriMesh:
    """Open shelf unit with evenly spaced full-height vertical dividers."""
    hx, hz = width / 2, depth / 2
    H = n_shelves * spacing
    parts = [vplate_x(-hx, 0.0, H, -hz, hz), vplate_x(hx, 0.0, H, -hz, hz)]
    for i in range(n_shelves + 1):
        parts.append(hplate(-hx, hx, -hz, hz, i * spacing))
    for k in range(1, dividers + 1):
        x = -hx + width * k / (dividers + 1)
        parts.append(box((x - 0.01, 0.0, -hz), (x + 0.01, H, hz)))
    return concatenate(parts)
