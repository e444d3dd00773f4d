"""Grid-based depth-first layout search over rotated-rectangle footprints."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np
import shapely
from shapely.geometry import Point

from roomstack.geom.polygon import Polygon2, distance_to_boundary, rect_corners
from roomstack.geom.pose import normalize_yaw, yaw_towards

ALPHA = 1.5
BEAM = 3
TIME_LIMIT = 10.0
# fixed node budget per second of time limit, so layouts do not depend on machine speed
NODES_PER_SECOND = 2000
FLOOR_STEP = 0.1
FURNITURE_STEP = 0.01

_EPS = 1e-9
_CACHE_SIZE = 4000  # bool masks; bounds memory at floor scale


@dataclass(frozen=True)
class Wall:
    index: int
    start: tuple[float, float]
    end: tuple[float, float]

    @property
    def length(self) -> float:
        return math.dist(self.start, self.end)

    @property
    def direction(self) -> tuple[float, float]:
        L = self.length
        return ((self.end[0] - self.start[0]) / L, (self.end[1] - self.start[1]) / L)

    @property
    def inward_normal(self) -> tuple[float, float]:
        # walls run clockwise, so the interior lies to the right of each edge
        ux, uz = self.direction
        return (uz, -ux)

    @property
    def facing_yaw(self) -> float:
        return yaw_towards(*self.inward_normal)


def clockwise_walls(boundary: Polygon2) -> tuple[Wall, ...]:
    """Boundary edges numbered clockwise from the first vertex."""
    v = list(boundary.vertices)
    if not boundary.is_clockwise:
        v = [v[0]] + v[:0:-1]
    return tuple(Wall(i, v[i], v[(i + 1) % len(v)]) for i in range(len(v)))


@dataclass(frozen=True)
class SolveDomain:
    boundary: Polygon2
    obstacles: tuple[Polygon2, ...] = ()
    grid_step: float = FLOOR_STEP

    def __post_init__(self) -> None:
        if not self.grid_step > 0:
            raise ValueError("grid_step must be positive")
        object.__setattr__(self, "obstacles", tuple(self.obstacles))

    @property
    def walls(self) -> tuple[Wall, ...]:
        return clockwise_walls(self.boundary)

    def obstacle_shape(self):
        """Union of obstacles clipped to the boundary (None when there are none)."""
        if not self.obstacles:
            return None
        u = shapely.union_all([o.shape for o in self.obstacles]).intersection(self.boundary.shape)
        return None if u.is_empty or u.area <= _EPS else u

    def to_dict(self) -> dict:
        return {
            "boundary": self.boundary.to_list(),
            "obstacles": [o.to_list() for o in self.obstacles],
            "grid_step": self.grid_step,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SolveDomain":
        return cls(
            Polygon2.from_list(d["boundary"]),
            tuple(Polygon2.from_list(o) for o in d.get("obstacles", [])),
            float(d.get("grid_step", FLOOR_STEP)),
        )


@dataclass(frozen=True)
class PlacementRequest:
    id: str
    footprint: tuple[float, float]  # width, depth in the motif's own frame
    initial: tuple[float, float, float]  # x, z, yaw
    wall_align: bool = False
    wall_id: Optional[int] = None
    ignore_collision: bool = False

    def __post_init__(self) -> None:
        w, d = (float(v) for v in self.footprint)
        if not (w > 0 and d > 0):
            raise ValueError(f"{self.id}: footprint must be positive")
        if self.wall_id is not None and not self.wall_align:
            raise ValueError(f"{self.id}: wall_id given without wall_align")
        x, z, yaw = (float(v) for v in self.initial)
        object.__setattr__(self, "footprint", (w, d))
        object.__setattr__(self, "initial", (x, z, normalize_yaw(yaw)))

    @property
    def area(self) -> float:
        return self.footprint[0] * self.footprint[1]

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "footprint": list(self.footprint),
            "initial": list(self.initial),
            "wall_align": self.wall_align,
            "wall_id": self.wall_id,
            "ignore_collision": self.ignore_collision,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlacementRequest":
        return cls(
            str(d["id"]),
            tuple(d["footprint"]),
            tuple(d["initial"]),
            bool(d.get("wall_align", False)),
            d.get("wall_id"),
            bool(d.get("ignore_collision", False)),
        )


@dataclass(frozen=True)
class Placement:
    x: float
    z: float
    yaw: float
    score: float

    def to_dict(self) -> dict:
        return {"x": self.x, "z": self.z, "yaw": self.yaw, "score": self.score}


@dataclass(frozen=True)
class Layout:
    poses: dict[str, Optional[Placement]]
    score: float
    feasible: bool
    elapsed: float = field(default=0.0, compare=False)
    nodes: int = 0
    unplaced: tuple[str, ...] = ()

    def to_dict(self, include_elapsed: bool = True) -> dict:
        d = {
            "feasible": self.feasible,
            "score": self.score,
            "nodes": self.nodes,
            "unplaced": list(self.unplaced),
            "poses": {k: (None if p is None else p.to_dict()) for k, p in self.poses.items()},
        }
        if include_elapsed:
            d["elapsed"] = self.elapsed
        return d


def score_placement(pose: Sequence[float], req: PlacementRequest, dom: SolveDomain, alpha: float = ALPHA) -> float:
    """Displacement from the seeded pose, plus an inverse boundary-distance term for wall-aligned motifs."""
    x, z = float(pose[0]), float(pose[1])
    phi = distance_to_boundary((x, z), dom.boundary)
    s = alpha * math.hypot(x - req.initial[0], z - req.initial[1])
    if req.wall_align:
        s += 1.0 / max(phi, dom.grid_step / 2)
    return s


def _grid_axis(lo: float, hi: float, step: float) -> np.ndarray:
    i0, i1 = math.ceil(lo / step - 1e-9), math.floor(hi / step + 1e-9)
    return np.arange(i0, i1 + 1) * step


def _yaws(initial_yaw: float) -> list[float]:
    out = []
    for dy in (0.0, 90.0, -90.0, 180.0):
        y = normalize_yaw(initial_yaw + dy)
        if all(abs(y - o) > 1e-9 for o in out):
            out.append(y)
    return out


def _corners_batch(x: np.ndarray, z: np.ndarray, w: float, d: float, yaw: np.ndarray) -> np.ndarray:
    c, s = np.cos(np.radians(yaw)), np.sin(np.radians(yaw))
    ux, uz = c * w / 2, -s * w / 2
    vx, vz = s * d / 2, c * d / 2
    xs = np.stack([x - ux - vx, x + ux - vx, x + ux + vx, x - ux + vx], axis=1)
    zs = np.stack([z - uz - vz, z + uz - vz, z + uz + vz, z - uz + vz], axis=1)
    return np.stack([xs, zs], axis=2)


@dataclass
class CandidateSet:
    """Statically feasible poses for one request, sorted by ascending score."""

    req: PlacementRequest
    x: np.ndarray
    z: np.ndarray
    yaw: np.ndarray
    score: np.ndarray
    corners: np.ndarray  # (n, 4, 2)
    distinct: np.ndarray = field(default=None)  # False for a later pose with an identical footprint

    def __post_init__(self) -> None:
        r = np.radians(self.yaw)
        self.cos, self.sin = np.cos(r), np.sin(r)
        if self.distinct is None:
            self.distinct = _distinct_footprints(self.req, self.x, self.z, self.yaw)

    def __len__(self) -> int:
        return len(self.score)

    def overlaps(self, sl: slice, other: "CandidateSet", k: int, eps: float = 1e-9) -> np.ndarray:
        """Positive-area overlap of candidates ``sl`` with candidate ``k`` of ``other``."""
        hw, hd = self.req.footprint[0] / 2, self.req.footprint[1] / 2
        bw, bd = other.req.footprint[0] / 2, other.req.footprint[1] / 2
        ca, sa = self.cos[sl], self.sin[sl]
        cb, sb = other.cos[k], other.sin[k]
        dx, dz = other.x[k] - self.x[sl], other.z[k] - self.z[sl]
        # width axis (cos, -sin), depth axis (sin, cos)
        uu = np.abs(ca * cb + sa * sb)
        uv = np.abs(ca * sb - sa * cb)
        vu = np.abs(sa * cb - ca * sb)
        vv = np.abs(sa * sb + ca * cb)
        sep = np.abs(dx * ca - dz * sa) >= hw + bw * uu + bd * uv - eps
        sep |= np.abs(dx * sa + dz * ca) >= hd + bw * vu + bd * vv - eps
        sep |= np.abs(dx * cb - dz * sb) >= bw + hw * uu + hd * vu - eps
        sep |= np.abs(dx * sb + dz * cb) >= bd + hw * uv + hd * vv - eps
        return ~sep

    def placement(self, i: int) -> Placement:
        return Placement(float(self.x[i]), float(self.z[i]), float(self.yaw[i]), float(self.score[i]))


def _distinct_footprints(req: PlacementRequest, x, z, yaw) -> np.ndarray:
    w, d = req.footprint
    period = 90.0 if abs(w - d) <= 1e-12 else 180.0
    key = np.round(np.stack([x, z, np.mod(yaw, period) % period], axis=1), 7)
    out = np.zeros(len(x), dtype=bool)
    if len(x):
        _, first = np.unique(key, axis=0, return_index=True)
        out[first] = True
    return out


def _raw_candidates(req: PlacementRequest, dom: SolveDomain) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    w, d = req.footprint
    x0, z0, yaw0 = req.initial
    step = dom.grid_step
    if req.wall_align:
        walls = dom.walls
        if req.wall_id is not None:
            if not 0 <= req.wall_id < len(walls):
                return np.empty(0), np.empty(0), np.empty(0)
            walls = (walls[req.wall_id],)
        xs, zs, ys = [], [], []
        for wall in walls:
            (ax, az), (ux, uz), (nx, nz) = wall.start, wall.direction, wall.inward_normal
            L = wall.length
            t = np.arange(0, math.floor(L / step + 1e-9) + 1) * step
            t0 = (x0 - ax) * ux + (z0 - az) * uz
            t = np.concatenate([[min(max(t0, 0.0), L)], t])
            xs.append(ax + t * ux + nx * d / 2)
            zs.append(az + t * uz + nz * d / 2)
            ys.append(np.full(len(t), wall.facing_yaw))
        return np.concatenate(xs), np.concatenate(zs), np.concatenate(ys)
    minx, minz, maxx, maxz = dom.boundary.bounds()
    gx, gz = np.meshgrid(_grid_axis(minx, maxx, step), _grid_axis(minz, maxz, step), indexing="ij")
    px = np.concatenate([[x0], gx.ravel()])
    pz = np.concatenate([[z0], gz.ravel()])
    # cell centres must lie in the region and outside obstacles
    region = shapely.Polygon(dom.boundary.shape.exterior)
    shapely.prepare(region)
    pts = shapely.points(px, pz)
    keep = shapely.covers(region, pts)
    obst = dom.obstacle_shape()
    if obst is not None:
        keep &= ~shapely.contains(obst, pts)
    px, pz = px[keep], pz[keep]
    yaws = _yaws(yaw0)
    return np.tile(px, len(yaws)), np.tile(pz, len(yaws)), np.repeat(np.array(yaws), len(px))


def static_candidates(req: PlacementRequest, dom: SolveDomain, alpha: float = ALPHA) -> CandidateSet:
    """Grid poses whose footprint is inside the region and clear of obstacles."""
    x, z, yaw = _raw_candidates(req, dom)
    w, d = req.footprint
    if len(x) == 0:
        return CandidateSet(req, x, z, yaw, np.empty(0), np.empty((0, 4, 2)))
    corners = _corners_batch(x, z, w, d, yaw)
    polys = shapely.polygons(corners)
    region = dom.boundary.shape.buffer(1e-7, join_style="mitre")
    shapely.prepare(region)
    ok = shapely.covers(region, polys)
    obst = dom.obstacle_shape()
    if obst is not None:
        ok &= shapely.area(shapely.intersection(polys, obst)) <= _EPS
    x, z, yaw, corners = x[ok], z[ok], yaw[ok], corners[ok]
    # unique poses keep their first (generation-order) occurrence
    key = np.round(np.stack([x, z, yaw], axis=1), 9)
    _, first = np.unique(key, axis=0, return_index=True)
    first.sort()
    x, z, yaw, corners = x[first], z[first], yaw[first], corners[first]
    ring = dom.boundary.shape.exterior
    phi = shapely.distance(ring, shapely.points(x, z))
    score = alpha * np.hypot(x - req.initial[0], z - req.initial[1])
    if req.wall_align:
        score = score + 1.0 / np.maximum(phi, dom.grid_step / 2)
    order = np.argsort(score, kind="stable")
    return CandidateSet(req, x[order], z[order], yaw[order], score[order], corners[order])


def _axes(poly: np.ndarray) -> np.ndarray:
    e = np.roll(poly, -1, axis=-2) - poly
    n = np.stack([-e[..., 1], e[..., 0]], axis=-1)
    return n / np.maximum(np.linalg.norm(n, axis=-1, keepdims=True), 1e-300)


def sat_overlap(rects: np.ndarray, other: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    """True where a rectangle in ``rects`` (n, 4, 2) overlaps the convex polygon ``other``.

    Overlap means positive-area intersection: touching edges do not count.
    """
    rects = np.asarray(rects, dtype=float)
    other = np.asarray(other, dtype=float)
    n = len(rects)
    if n == 0:
        return np.zeros(0, dtype=bool)
    own = _axes(rects)[:, :2]  # a rectangle has two distinct edge directions
    theirs = np.broadcast_to(_axes(other), (n, len(other), 2))
    axes = np.concatenate([own, theirs], axis=1)  # (n, k, 2)
    pa = np.einsum("nvc,nkc->nkv", rects, axes)
    pb = np.einsum("vc,nkc->nkv", other, axes)
    sep = (pa.max(axis=2) <= pb.min(axis=2) + eps) | (pb.max(axis=2) <= pa.min(axis=2) + eps)
    return ~sep.any(axis=1)


def _as_corners(p) -> np.ndarray:
    if isinstance(p, Polygon2):
        return np.asarray(p.vertices, dtype=float)
    return np.asarray(p, dtype=float)


def candidate_positions(
    req: PlacementRequest, dom: SolveDomain, placed: Sequence = (), alpha: float = ALPHA
) -> list[tuple[Placement, np.ndarray]]:
    """All feasible poses for ``req`` given already placed convex footprints, best first."""
    cands = static_candidates(req, dom, alpha)
    mask = np.ones(len(cands), dtype=bool)
    if not req.ignore_collision:
        for p in placed:
            mask &= ~sat_overlap(cands.corners, _as_corners(p))
    return [(cands.placement(i), cands.corners[i]) for i in np.flatnonzero(mask)]


class _Budget(Exception):
    pass


class _Search:
    def __init__(self, reqs, cand_sets, node_budget, deadline, beam):
        self.reqs = reqs
        self.cands = cand_sets
        self.node_budget = node_budget
        self.deadline = deadline
        self.beam = beam
        self.nodes = 0
        self.lower = [float(c.score[0]) if len(c) else 0.0 for c in cand_sets]
        self.best_score = math.inf
        self.best: Optional[dict[int, int]] = None
        self.best_partial: tuple = (-1, math.inf, {})
        self.placed: dict[int, int] = {}
        self.exhausted = False
        self._cache: dict[tuple[int, int, int], np.ndarray] = {}

    def _tick(self) -> None:
        self.nodes += 1
        if self.nodes > self.node_budget or time.perf_counter() > self.deadline:
            self.exhausted = True
            raise _Budget

    def _blocked(self, i: int, j: int, k: int) -> np.ndarray:
        key = (i, j, k)
        hit = self._cache.get(key)
        if hit is None:
            hit = self.cands[i].overlaps(slice(None), self.cands[j], k)
            if len(self._cache) >= _CACHE_SIZE:
                self._cache.pop(next(iter(self._cache)))
            self._cache[key] = hit
        return hit

    def feasible(self, i: int) -> Iterator[int]:
        mask = self.cands[i].distinct
        if not self.reqs[i].ignore_collision:
            for j, k in self.placed.items():
                if not self.reqs[j].ignore_collision:
                    mask = mask & ~self._blocked(i, j, k)
        for k in np.flatnonzero(mask):
            yield int(k)

    def record(self, score: float, unplaced: tuple[int, ...]) -> None:
        if not unplaced:
            if score < self.best_score - 1e-12:
                self.best_score, self.best = score, dict(self.placed)
        else:
            n = len(self.placed)
            bn, bs, _ = self.best_partial
            if n > bn or (n == bn and score < bs - 1e-12):
                self.best_partial = (n, score, dict(self.placed))

    def run(self, order: tuple[int, ...]) -> None:
        try:
            self._dfs(order, (), (), False, 0.0)
        except _Budget:
            pass

    def _dfs(self, remaining, deferred, unplaced, retry, score) -> None:
        if not remaining:
            if deferred and not retry:
                self._dfs(deferred, (), unplaced, True, score)
                return
            self.record(score, unplaced)
            return
        i, rest = remaining[0], remaining[1:]
        bound = sum(self.lower[j] for j in rest + deferred)
        self._tick()
        expanded, fits = 0, False
        for k in self.feasible(i):
            fits = True
            s = float(self.cands[i].score[k])
            if score + s + bound >= self.best_score - 1e-12:
                break
            self.placed[i] = k
            self._dfs(rest, deferred, unplaced, retry, score + s)
            del self.placed[i]
            expanded += 1
            if self.beam is not None and expanded >= self.beam:
                break
        if not fits:
            # nothing fits here: defer once, then give up on this motif
            if retry:
                self._dfs(rest, deferred, unplaced + (i,), retry, score)
            else:
                self._dfs(rest, deferred + (i,), unplaced, retry, score)


def solve_layout(
    reqs: Sequence[PlacementRequest],
    dom: SolveDomain,
    time_limit: float = TIME_LIMIT,
    node_budget: Optional[int] = None,
    beam: int = BEAM,
    exhaustive: bool = True,
    alpha: float = ALPHA,
) -> Layout:
    """Place every request, largest footprint first, minimising the summed score.

    A beam search keeps the best ``beam`` candidates per motif. With
    ``exhaustive`` the remaining node budget then runs an unrestricted
    branch-and-bound seeded with the beam result, which proves optimality
    on small instances. Search effort is capped by a node budget (by default
    proportional to ``time_limit``) so results are reproducible; the wall
    clock is only a backstop.
    """
    if not reqs:
        raise ValueError("solve_layout needs at least one request")
    ids = [r.id for r in reqs]
    if len(set(ids)) != len(ids):
        raise ValueError("request ids must be unique")
    t0 = time.perf_counter()
    budget = node_budget if node_budget is not None else max(1, int(NODES_PER_SECOND * time_limit))
    deadline = t0 + time_limit
    cand_sets = [static_candidates(r, dom, alpha) for r in reqs]
    order = tuple(sorted(range(len(reqs)), key=lambda i: (-reqs[i].area, i)))

    search = _Search(reqs, cand_sets, budget, deadline, beam)
    search.run(order)
    tried = {order}
    while search.best is None and not search.exhausted:
        # restart with the motifs that could not be placed at the front
        placed = search.best_partial[2]
        failed = tuple(i for i in order if i not in placed)
        order = failed + tuple(i for i in order if i in placed)
        if order in tried:
            break
        tried.add(order)
        search.run(order)
    if exhaustive and not search.exhausted:
        search.beam = None
        search.run(order)

    if search.best is not None:
        chosen, total, feasible = search.best, search.best_score, True
    else:
        _, total, chosen = search.best_partial
        feasible = False
        total = total if math.isfinite(total) else 0.0
    poses = {r.id: (cand_sets[i].placement(chosen[i]) if i in chosen else None) for i, r in enumerate(reqs)}
    unplaced = tuple(r.id for i, r in enumerate(reqs) if i not in chosen)
    return Layout(poses, float(total), feasible, time.perf_counter() - t0, search.nodes, unplaced)


def footprint_corners(req: PlacementRequest, p: Placement) -> np.ndarray:
    return rect_corners(p.x, p.z, req.footprint[0], req.footprint[1], p.yaw)


def verify_layout(layout: Layout, reqs: Sequence[PlacementRequest], dom: SolveDomain, tol: float = 1e-7) -> list[str]:
    """Re-check every hard constraint with plain polygon geometry; returns violations."""
    problems = []
    region = dom.boundary.shape
    obst = dom.obstacle_shape()
    polys = {}
    by_id = {r.id: r for r in reqs}
    for rid, p in layout.poses.items():
        if p is None:
            continue
        req = by_id[rid]
        poly = shapely.Polygon(footprint_corners(req, p))
        polys[rid] = poly
        if poly.difference(region).area > tol:
            problems.append(f"{rid}: footprint leaves the region")
        if obst is not None and poly.intersection(obst).area > tol:
            problems.append(f"{rid}: footprint hits an obstacle")
        if req.wall_align:
            walls = dom.walls if req.wall_id is None else (dom.walls[req.wall_id],)
            back = footprint_corners(req, p)[:2]  # back-left, back-right
            fx, fz = math.sin(math.radians(p.yaw)), math.cos(math.radians(p.yaw))
            ok = False
            for wall in walls:
                line = shapely.LineString([wall.start, wall.end])
                nx, nz = wall.inward_normal
                near = max(line.distance(Point(*c)) for c in back) <= dom.grid_step / 2 + tol
                if near and fx * nx + fz * nz > 1 - 1e-9:
                    ok = True
            if not ok:
                problems.append(f"{rid}: back edge is not against its wall")
    ids = sorted(polys)
    for a_i, a in enumerate(ids):
        for b in ids[a_i + 1 :]:
            if by_id[a].ignore_collision or by_id[b].ignore_collision:
                continue
            if polys[a].intersection(polys[b]).area > tol:
                problems.append(f"{a} overlaps {b}")
    if layout.feasible and layout.unplaced:
        problems.append("layout marked feasible with unplaced motifs")
    return problems

