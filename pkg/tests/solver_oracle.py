"""Exhaustive reference for the layout solver, written without reusing solver internals."""

from __future__ import annotations

import math
import random

import numpy as np
import shapely

from roomstack.geom.polygon import Polygon2
from roomstack.solver import PlacementRequest, SolveDomain

ALPHA = 1.5


def corners(x, z, w, d, yaw):
    """(n, 4, 2) rectangle corners; yaw counterclockwise about +y, yaw 0 facing +z."""
    x, z, yaw = np.broadcast_arrays(np.asarray(x, float), np.asarray(z, float), np.asarray(yaw, float))
    r = np.radians(yaw)
    c, s = np.cos(r), np.sin(r)
    local = np.array([[-w / 2, -d / 2], [w / 2, -d / 2], [w / 2, d / 2], [-w / 2, d / 2]])
    lx, lz = local[:, 0], local[:, 1]
    px = x[:, None] + c[:, None] * lx + s[:, None] * lz
    pz = z[:, None] - s[:, None] * lx + c[:, None] * lz
    return np.stack([px, pz], axis=2)


def overlap_matrix(a: np.ndarray, b: np.ndarray, eps: float = 1e-9) -> np.ndarray:
    """SAT on every pair: True where rectangle a[i] and b[j] share positive area."""
    A, B = a[:, None], b[None, :]
    sep = np.zeros((len(a), len(b)), dtype=bool)
    for poly in (a, b):
        for e in range(2):
            edge = poly[:, (e + 1) % 4] - poly[:, e]
            n = np.stack([-edge[:, 1], edge[:, 0]], axis=1)
            n = n / np.linalg.norm(n, axis=1, keepdims=True)
            n = n[:, None] if poly is a else n[None, :]
            pa = np.einsum("ijvc,ijc->ijv", np.broadcast_to(A, (len(a), len(b), 4, 2)), np.broadcast_to(n, (len(a), len(b), 2)))
            pb = np.einsum("ijvc,ijc->ijv", np.broadcast_to(B, (len(a), len(b), 4, 2)), np.broadcast_to(n, (len(a), len(b), 2)))
            sep |= (pa.max(-1) <= pb.min(-1) + eps) | (pb.max(-1) <= pa.min(-1) + eps)
    return ~sep


def walls(boundary: Polygon2):
    """Clockwise edges of the boundary as (start, end) pairs."""
    v = list(boundary.vertices)
    area = 0.5 * sum(v[i][0] * v[(i + 1) % len(v)][1] - v[(i + 1) % len(v)][0] * v[i][1] for i in range(len(v)))
    if area > 0:
        v = [v[0]] + v[:0:-1]
    return [(v[i], v[(i + 1) % len(v)]) for i in range(len(v))]


def poses(req: PlacementRequest, dom: SolveDomain):
    """Every candidate pose the solver is allowed to consider, before feasibility filtering."""
    x0, z0, yaw0 = req.initial
    step = dom.grid_step
    out = []
    if req.wall_align:
        ws = walls(dom.boundary)
        if req.wall_id is not None:
            ws = [ws[req.wall_id]]
        for (ax, az), (bx, bz) in ws:
            L = math.dist((ax, az), (bx, bz))
            ux, uz = (bx - ax) / L, (bz - az) / L
            nx, nz = uz, -ux  # interior on the right of a clockwise edge
            yaw = math.degrees(math.atan2(nx, nz)) % 360.0
            t0 = min(max((x0 - ax) * ux + (z0 - az) * uz, 0.0), L)
            ts = [t0] + [k * step for k in range(int(math.floor(L / step + 1e-9)) + 1)]
            d = req.footprint[1]
            out += [(ax + t * ux + nx * d / 2, az + t * uz + nz * d / 2, yaw) for t in ts]
        return out
    minx, minz, maxx, maxz = dom.boundary.shape.bounds
    xs = [i * step for i in range(math.ceil(minx / step - 1e-9), math.floor(maxx / step + 1e-9) + 1)]
    zs = [i * step for i in range(math.ceil(minz / step - 1e-9), math.floor(maxz / step + 1e-9) + 1)]
    yaws = sorted({(yaw0 + dy) % 360.0 for dy in (0.0, 90.0, -90.0, 180.0)})
    pts = [(x0, z0)] + [(x, z) for x in xs for z in zs]
    return [(x, z, y) for (x, z) in pts for y in yaws]


def score(x, z, req: PlacementRequest, dom: SolveDomain) -> float:
    s = ALPHA * math.hypot(x - req.initial[0], z - req.initial[1])
    if req.wall_align:
        phi = dom.boundary.shape.exterior.distance(shapely.Point(x, z))
        s += 1.0 / max(phi, dom.grid_step / 2)
    return s


def feasible_poses(req: PlacementRequest, dom: SolveDomain):
    """(poses, corners, scores) of statically feasible candidates, sorted by score."""
    w, d = req.footprint
    ps = poses(req, dom)
    if not ps:
        return [], np.empty((0, 4, 2)), np.empty(0)
    arr = np.array(ps)
    cs = corners(arr[:, 0], arr[:, 1], w, d, arr[:, 2])
    polys = shapely.polygons(cs)
    region = dom.boundary.shape
    ok = shapely.area(shapely.difference(polys, region)) <= 1e-9
    inside_pt = shapely.covers(shapely.Polygon(region.exterior), shapely.points(arr[:, 0], arr[:, 1]))
    ok &= inside_pt
    for ob in dom.obstacles:
        ok &= shapely.area(shapely.intersection(polys, ob.shape.intersection(region))) <= 1e-9
    keep = np.flatnonzero(ok)
    x, z = arr[keep, 0], arr[keep, 1]
    sc = ALPHA * np.hypot(x - req.initial[0], z - req.initial[1])
    if req.wall_align:
        phi = shapely.distance(dom.boundary.shape.exterior, shapely.points(x, z))
        sc = sc + 1.0 / np.maximum(phi, dom.grid_step / 2)
    order = np.argsort(sc, kind="stable")
    keep = keep[order]
    return [ps[i] for i in keep], cs[keep], sc[order]


def exhaustive_optimum(reqs, dom: SolveDomain) -> float:
    """Minimum total score over every jointly feasible assignment (inf if none)."""
    sets = [feasible_poses(r, dom) for r in reqs]
    n = len(reqs)
    if any(len(s[0]) == 0 for s in sets):
        return math.inf
    rows: dict = {}
    centres = [c.mean(axis=1) for _, c, _ in sets]
    radius = [math.hypot(*r.footprint) / 2 for r in reqs]

    def clash(j, k, i):
        """Candidates of motif i that overlap candidate k of motif j."""
        if reqs[i].ignore_collision or reqs[j].ignore_collision:
            return np.zeros(len(sets[i][0]), dtype=bool)
        key = (j, k, i)
        if key not in rows:
            a, b = sets[j][1][k], sets[i][1]
            # only rectangles whose circumcircles meet can overlap
            gap = centres[i] - centres[j][k]
            near = np.einsum("nc,nc->n", gap, gap) < (radius[i] + radius[j]) ** 2 + 1e-9
            row = np.zeros(len(b), dtype=bool)
            idx = np.flatnonzero(near)
            if len(idx):
                row[idx] = overlap_matrix(a[None], b[idx])[0]
            rows[key] = row
        return rows[key]

    lower = [s[2][0] for s in sets]
    best = [math.inf]

    def rec(i, chosen, total):
        if i == n:
            best[0] = min(best[0], total)
            return
        rest = sum(lower[i + 1 :])
        ok = np.ones(len(sets[i][0]), dtype=bool)
        for j, k in enumerate(chosen):
            ok &= ~clash(j, k, i)
        for k in np.flatnonzero(ok):
            s = total + sets[i][2][k]
            if s + rest >= best[0] - 1e-12:
                break
            rec(i + 1, chosen + [int(k)], s)

    rec(0, [], 0.0)
    return best[0]


def _rect(w, d):
    return Polygon2(((0.0, 0.0), (0.0, d), (w, d), (w, 0.0)))


def random_small_instance(rng: random.Random):
    """At most 3 motifs in a region of at most 400 grid points at 0.1 m."""
    step = 0.1
    while True:
        nx, nz = rng.randint(8, 20), rng.randint(8, 20)
        if nx * nz <= 400:
            break
    W, D = (nx - 1) * step, (nz - 1) * step
    obstacles = ()
    if rng.random() < 0.3:
        ox, oz = rng.uniform(0, W - 0.3), rng.uniform(0, D - 0.3)
        obstacles = (Polygon2.rectangle(ox, oz, ox + 0.3, oz + 0.3),)
    dom = SolveDomain(_rect(W, D), obstacles, step)
    reqs = []
    for k in range(rng.randint(1, 3)):
        w, d = round(rng.uniform(0.2, 0.6), 2), round(rng.uniform(0.2, 0.6), 2)
        init = (round(rng.uniform(0, W), 2), round(rng.uniform(0, D), 2), rng.choice([0.0, 90.0, 180.0, 270.0, 30.0]))
        align = rng.random() < 0.25
        wall = rng.randrange(4) if align and rng.random() < 0.7 else None
        reqs.append(PlacementRequest(f"m{k}", (w, d), init, align, wall, rng.random() < 0.1))
    return reqs, dom


def random_large_instance(rng: random.Random):
    """Eight motifs in a 6 x 6 m room at 0.1 m, a mix of walls and free placement."""
    dom = SolveDomain(_rect(6.0, 6.0), (Polygon2.rectangle(4.6, 0.0, 5.4, 0.8),), 0.1)
    reqs = []
    for k in range(8):
        w, d = round(rng.uniform(0.5, 1.8), 2), round(rng.uniform(0.4, 1.0), 2)
        init = (round(rng.uniform(0.5, 5.5), 2), round(rng.uniform(0.5, 5.5), 2), rng.choice([0.0, 90.0, 180.0, 270.0]))
        align = k < 4
        reqs.append(PlacementRequest(f"m{k}", (w, d), init, align, rng.randrange(4) if align and k % 2 else None))
    return reqs, dom
