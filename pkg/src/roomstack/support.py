"""Support-region extraction from furniture meshes.

The pipeline is: region-grow planar clusters over edge adjacency, fit a box
to each cluster and classify it, measure the vertical clearance above every
upward-facing horizontal surface, then merge nearby coplanar surfaces and
cut them along vertical dividers.
"""

from __future__ import annotations

import heapq
import logging
from collections import deque
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
import shapely
from shapely.geometry import LineString, MultiPoint, Polygon
from shapely.geometry.base import BaseGeometry

from roomstack.errors import DegenerateGeometryError
from roomstack.geom.mesh import TriMesh
from roomstack.geom.obb import Obb, PlaneClass, classify_plane, fit_obb, min_area_rect
from roomstack.geom.polygon import Polygon2, polygon_intersection_area

logger = logging.getLogger(__name__)

FOOTPRINT_WELD = 1e-3  # vertex weld applied to projected footprints
MIN_REGION_AREA = 1e-6  # m^2; smaller pieces left over from cutting are dropped
HEIGHT_EPS = 1e-6


@dataclass(frozen=True)
class SupportConfig:
    t_norm: float = 0.9
    t_adj: float = 0.95
    t_clear: float = 0.5
    h_top: float = 1.0
    t_merge: float = 0.05
    t_hzn: float = 0.95
    t_vert: float = 0.05
    r_plane: float = 0.1
    tol: float = 0.01

    def __post_init__(self) -> None:
        for name in ("t_norm", "t_adj", "t_hzn"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        if not 0.0 <= self.t_vert < self.t_hzn:
            raise ValueError("t_vert must lie in [0, t_hzn)")
        for name in ("t_clear", "h_top", "t_merge", "r_plane"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.tol < 0:
            raise ValueError("tol must be nonnegative")

    @classmethod
    def from_dict(cls, d: dict) -> "SupportConfig":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown support config keys: {sorted(unknown)}")
        return cls(**d)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SurfaceCluster:
    faces: tuple[int, ...]
    obb: Optional[Obb]
    plane: Optional[PlaneClass]
    facing_up: bool
    y_min: float
    y_max: float

    @property
    def orientation(self) -> Optional[str]:
        return self.plane.orientation if self.plane else None


@dataclass(frozen=True)
class SupportRegion:
    id: str
    footprint: Polygon2
    surface_height: float
    clearance: float
    is_top: bool
    faces: tuple[int, ...] = ()
    holes: tuple[Polygon2, ...] = field(default=())

    @property
    def area(self) -> float:
        return self.footprint.area

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "footprint": self.footprint.to_list(),
            "surface_height": self.surface_height,
            "clearance": self.clearance,
            "is_top": self.is_top,
            "faces": list(self.faces),
        }
        if self.holes:
            d["holes"] = [h.to_list() for h in self.holes]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SupportRegion":
        return cls(
            id=str(d["id"]),
            footprint=Polygon2.from_list(d["footprint"]),
            surface_height=float(d["surface_height"]),
            clearance=float(d["clearance"]),
            is_top=bool(d["is_top"]),
            faces=tuple(int(f) for f in d.get("faces", [])),
            holes=tuple(Polygon2.from_list(h) for h in d.get("holes", [])),
        )


# --------------------------------------------------------------------------
# planar clustering


def extract_planar_surfaces(mesh: TriMesh, cfg: SupportConfig = SupportConfig()) -> list[SurfaceCluster]:
    """Region-grow clusters of similarly oriented, edge-connected faces.

    Each cluster is seeded with the largest unclustered face (ties: lowest
    index). A queued face joins when its normal is within ``t_norm`` of the
    seed normal; neighbours are queued when within ``t_adj`` of the face that
    reached them.
    """
    if mesh.n_faces == 0:
        return []
    normals = mesh.face_normals
    areas = mesh.face_areas
    adjacency = mesh.face_adjacency
    clustered = np.zeros(mesh.n_faces, dtype=bool)
    # max-heap on area, ties by lowest index
    heap = [(-float(a), i) for i, a in enumerate(areas)]
    heapq.heapify(heap)
    groups: list[list[int]] = []
    while heap:
        _, seed = heapq.heappop(heap)
        if clustered[seed]:
            continue
        clustered[seed] = True
        members = [seed]
        n0 = normals[seed]
        queue = deque(nb for nb in adjacency[seed] if normals[nb] @ n0 >= cfg.t_adj)
        while queue:
            f = queue.popleft()
            if clustered[f] or normals[f] @ n0 < cfg.t_norm:
                continue
            clustered[f] = True
            members.append(f)
            queue.extend(nb for nb in adjacency[f] if not clustered[nb] and normals[nb] @ normals[f] >= cfg.t_adj)
        groups.append(sorted(members))
    return [_describe_cluster(mesh, g, cfg) for g in groups]


def _describe_cluster(mesh: TriMesh, faces: list[int], cfg: SupportConfig) -> SurfaceCluster:
    idx = np.unique(mesh.faces[faces].reshape(-1))
    pts = mesh.vertices[idx]
    try:
        obb = fit_obb(pts, cfg.tol)
    except DegenerateGeometryError:
        obb = None
    plane = classify_plane(obb, cfg.r_plane, cfg.t_hzn, cfg.t_vert) if obb is not None else None
    weighted = (mesh.face_normals[faces] * mesh.face_areas[faces, None]).sum(axis=0)
    return SurfaceCluster(
        faces=tuple(faces),
        obb=obb,
        plane=plane,
        facing_up=bool(weighted[1] > 0),
        y_min=float(pts[:, 1].min()),
        y_max=float(pts[:, 1].max()),
    )


# --------------------------------------------------------------------------
# footprints and clearances


def project_faces(mesh: TriMesh, faces) -> BaseGeometry:
    tri = mesh.vertices[mesh.faces[list(faces)]][:, :, [0, 2]]
    polys = shapely.polygons(tri)
    polys = polys[shapely.area(polys) > 1e-14]
    if len(polys) == 0:
        return Polygon()
    merged = shapely.union_all(polys, grid_size=None)
    merged = shapely.set_precision(merged, FOOTPRINT_WELD)
    return merged.simplify(0.0).buffer(0)


def _surface_height(mesh: TriMesh, cluster: SurfaceCluster) -> float:
    faces = list(cluster.faces)
    tri_y = mesh.vertices[mesh.faces[faces]][:, :, 1].mean(axis=1)
    w = mesh.face_areas[faces]
    return float((tri_y * w).sum() / w.sum())


@dataclass
class HorizontalSurface:
    faces: tuple[int, ...]
    shape: BaseGeometry
    height: float
    clearance: float = 0.0
    is_top: bool = False


def _horizontal_surfaces(mesh: TriMesh, clusters: list[SurfaceCluster]) -> tuple[list[HorizontalSurface], list[HorizontalSurface]]:
    """Return (upward candidates, all horizontal obstructers)."""
    ups, blockers = [], []
    for c in clusters:
        if c.orientation != "horizontal":
            continue
        s = HorizontalSurface(c.faces, project_faces(mesh, c.faces), _surface_height(mesh, c))
        if s.shape.is_empty:
            continue
        blockers.append(s)
        if c.facing_up:
            ups.append(s)
    return ups, blockers


def compute_clearances(
    horizontals: list[HorizontalSurface], blockers: Optional[list[HorizontalSurface]] = None, cfg: SupportConfig = SupportConfig()
) -> list[HorizontalSurface]:
    """Clearance of each surface = gap to the lowest overlapping surface above.

    Surfaces with nothing above are tops and get ``h_top``; surfaces with
    clearance below ``t_clear`` are dropped.
    """
    blockers = horizontals if blockers is None else blockers
    kept = []
    for s in horizontals:
        gaps = [
            b.height - s.height
            for b in blockers
            if b is not s and b.height - s.height > HEIGHT_EPS and s.shape.intersection(b.shape).area > 1e-12
        ]
        if gaps:
            s.clearance, s.is_top = min(gaps), False
        else:
            s.clearance, s.is_top = cfg.h_top, True
        if s.is_top or s.clearance >= cfg.t_clear:
            kept.append(s)
    return kept


# --------------------------------------------------------------------------
# vertical dividers, merging, splitting


@dataclass(frozen=True)
class _Slab:
    shape: BaseGeometry
    y_min: float
    y_max: float


def _vertical_slabs(mesh: TriMesh, clusters: list[SurfaceCluster], cfg: SupportConfig) -> list[_Slab]:
    """Footprints of vertical surfaces; facing pairs closer than ``t_merge`` form one thick slab."""
    items = []
    for c in clusters:
        if c.orientation != "vertical":
            continue
        idx = np.unique(mesh.faces[list(c.faces)].reshape(-1))
        pts = mesh.vertices[idx]
        xz = pts[:, [0, 2]]
        center, axes, half = min_area_rect(xz)
        long_ax = axes[int(np.argmax(half))]
        proj = xz @ long_ax
        a = center + long_ax * (proj.min() - center @ long_ax)
        b = center + long_ax * (proj.max() - center @ long_ax)
        weighted = (mesh.face_normals[list(c.faces)] * mesh.face_areas[list(c.faces), None]).sum(axis=0)
        n2 = np.array([weighted[0], weighted[2]])
        n2 = n2 / (np.linalg.norm(n2) or 1.0)
        items.append((LineString([a, b]), n2, xz, float(pts[:, 1].min()), float(pts[:, 1].max())))
    used = [False] * len(items)
    slabs = []
    for i, (seg_i, n_i, xz_i, lo_i, hi_i) in enumerate(items):
        if used[i]:
            continue
        used[i] = True
        best, best_d = None, None
        for j in range(i + 1, len(items)):
            if used[j]:
                continue
            seg_j, n_j, xz_j, lo_j, hi_j = items[j]
            if n_i @ n_j > -cfg.t_norm or min(hi_i, hi_j) <= max(lo_i, lo_j):
                continue
            d = seg_i.distance(seg_j)
            sep = abs((np.asarray(seg_j.coords[0]) - np.asarray(seg_i.coords[0])) @ n_i)
            if sep <= cfg.t_merge and d <= cfg.t_merge and _segments_overlap(seg_i, seg_j):
                if best_d is None or d < best_d:
                    best, best_d = j, d
        if best is not None:
            used[best] = True
            seg_j, _, xz_j, lo_j, hi_j = items[best]
            shape = MultiPoint(np.vstack([xz_i, xz_j])).convex_hull
            slabs.append(_Slab(shape, min(lo_i, lo_j), max(hi_i, hi_j)))
        else:
            slabs.append(_Slab(seg_i.buffer(FOOTPRINT_WELD, cap_style="flat"), lo_i, hi_i))
    return slabs


def _segments_overlap(a: LineString, b: LineString) -> bool:
    pa = np.asarray(a.coords)
    pb = np.asarray(b.coords)
    d = pa[1] - pa[0]
    L = np.linalg.norm(d)
    if L == 0:
        return False
    d = d / L
    ta = sorted(pa @ d)
    tb = sorted(pb @ d)
    return min(ta[1], tb[1]) - max(ta[0], tb[0]) > FOOTPRINT_WELD


def _rises_through(slab: _Slab, height: float, cfg: SupportConfig) -> bool:
    return slab.y_min <= height + cfg.t_merge and slab.y_max > height + HEIGHT_EPS


def _pieces(geom: BaseGeometry) -> list[Polygon]:
    if geom.is_empty:
        return []
    parts = list(geom.geoms) if hasattr(geom, "geoms") else [geom]
    return [p for p in parts if isinstance(p, Polygon) and p.area > MIN_REGION_AREA]


def _closing(geom: BaseGeometry, r: float) -> BaseGeometry:
    return geom.buffer(r, join_style="mitre").buffer(-r, join_style="mitre")


def _merge(surfaces: list[HorizontalSurface], slabs: list[_Slab], cfg: SupportConfig) -> list[HorizontalSurface]:
    parent = list(range(len(surfaces)))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    half = cfg.t_merge / 2
    for i in range(len(surfaces)):
        for j in range(i + 1, len(surfaces)):
            a, b = surfaces[i], surfaces[j]
            if abs(a.height - b.height) > cfg.t_merge or a.shape.distance(b.shape) > cfg.t_merge:
                continue
            union = a.shape.union(b.shape)
            bridge = _closing(union, half).difference(union)
            blocked = any(
                _rises_through(s, max(a.height, b.height), cfg) and s.shape.intersection(bridge).area > 1e-10
                for s in slabs
            )
            if not blocked:
                parent[find(j)] = find(i)
    groups: dict[int, list[HorizontalSurface]] = {}
    for i, s in enumerate(surfaces):
        groups.setdefault(find(i), []).append(s)
    merged = []
    for members in groups.values():
        if len(members) == 1:
            merged.append(members[0])
            continue
        union = shapely.union_all([m.shape for m in members])
        if len(_pieces(union)) > 1:
            union = _closing(union, half)
        merged.append(
            HorizontalSurface(
                faces=tuple(sorted(f for m in members for f in m.faces)),
                shape=union,
                height=max(m.height for m in members),
                clearance=min(m.clearance for m in members),
                is_top=all(m.is_top for m in members),
            )
        )
    return merged


def _split(surface: HorizontalSurface, slabs: list[_Slab], cfg: SupportConfig) -> list[BaseGeometry]:
    pieces = _pieces(surface.shape)
    for slab in slabs:
        if not _rises_through(slab, surface.height, cfg):
            continue
        nxt = []
        for p in pieces:
            if not p.intersects(slab.shape):
                nxt.append(p)
                continue
            cut = _pieces(p.difference(slab.shape))
            nxt.extend(cut if len(cut) >= 2 else [p])
        pieces = nxt
    return pieces


def _assign_faces(mesh: TriMesh, faces: tuple[int, ...], piece: BaseGeometry) -> tuple[int, ...]:
    if not faces:
        return ()
    tri = mesh.vertices[mesh.faces[list(faces)]][:, :, [0, 2]]
    polys = shapely.polygons(tri)
    inter = shapely.area(shapely.intersection(polys, piece))
    return tuple(f for f, a in zip(faces, inter) if a > 1e-12)


def _to_polygon2(p: Polygon) -> tuple[Optional[Polygon2], tuple[Polygon2, ...]]:
    ext = Polygon(p.exterior).simplify(0.0)
    try:
        outer = Polygon2(tuple(ext.exterior.coords))
    except Exception:  # noqa: BLE001 - sliver after welding
        return None, ()
    holes = []
    for ring in p.interiors:
        try:
            holes.append(Polygon2(tuple(Polygon(ring).simplify(0.0).exterior.coords)))
        except Exception:  # noqa: BLE001
            continue
    return outer, tuple(holes)


def refine_regions(
    mesh: TriMesh, horizontals: list[HorizontalSurface], clusters: list[SurfaceCluster], cfg: SupportConfig = SupportConfig()
) -> list[SupportRegion]:
    """Merge close coplanar surfaces, then cut along vertical dividers."""
    slabs = _vertical_slabs(mesh, clusters, cfg)
    merged = _merge(horizontals, slabs, cfg)
    out = []
    for s in merged:
        pieces = _split(s, slabs, cfg)
        whole = len(pieces) == 1 and len(_pieces(s.shape)) == 1
        for piece in pieces:
            poly, holes = _to_polygon2(piece)
            if poly is None:
                continue
            faces = s.faces if whole else _assign_faces(mesh, s.faces, piece)
            out.append(SupportRegion("", poly, s.height, s.clearance, s.is_top, faces, holes))
    return _sorted_with_ids(out)


def _sorted_with_ids(regions: list[SupportRegion]) -> list[SupportRegion]:
    def key(r: SupportRegion):
        cx, cz = r.footprint.centroid()
        return (round(r.surface_height, 9), -round(r.area, 12), round(cx, 9), round(cz, 9))

    ordered = sorted(regions, key=key)
    return [replace(r, id=f"s{i}") for i, r in enumerate(ordered)]


def extract_support_regions(mesh: TriMesh, cfg: SupportConfig = SupportConfig()) -> list[SupportRegion]:
    """Support regions of a mesh in its canonical upright frame."""
    clusters = extract_planar_surfaces(mesh, cfg)
    ups, blockers = _horizontal_surfaces(mesh, clusters)
    if not ups:
        return []
    kept = compute_clearances(ups, blockers, cfg)
    return refine_regions(mesh, kept, clusters, cfg)


def top_surface_baseline(mesh: TriMesh, cfg: SupportConfig = SupportConfig()) -> list[SupportRegion]:
    """Only the topmost horizontal surface(s), each with the default top clearance."""
    clusters = extract_planar_surfaces(mesh, cfg)
    ups, _ = _horizontal_surfaces(mesh, clusters)
    if not ups:
        return []
    top_y = max(s.height for s in ups)
    tops = [s for s in ups if top_y - s.height <= cfg.t_merge]
    for s in tops:
        s.clearance, s.is_top = cfg.h_top, True
    return refine_regions(mesh, tops, clusters, cfg)


def regions_to_json(regions: list[SupportRegion]) -> dict:
    return {"regions": [r.to_dict() for r in regions]}


def regions_from_json(doc: dict) -> list[SupportRegion]:
    return [SupportRegion.from_dict(r) for r in doc.get("regions", [])]


def region_overlap_area(a: SupportRegion, b: SupportRegion) -> float:
    return polygon_intersection_area(a.footprint, b.footprint)
