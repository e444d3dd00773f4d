"""End-to-end scene generation from validated plans."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

from roomstack.errors import HierarchyError, PlanError, RoomstackError, StageError
from roomstack.geom.mesh import TriMesh
from roomstack.geom.polygon import Polygon2
from roomstack.geom.pose import Pose, rotate_xz
from roomstack.motifs.hierarchy import instantiate_scene_motif
from roomstack.motifs.model import Arrangement, MotifNode, ObjectSpec
from roomstack.pipeline.planner import PlannerClient, request_plan
from roomstack.pipeline.plans import (
    ArrangementPlan,
    GroupingPlan,
    ObjectPlan,
    PlacementPlan,
    PlanSet,
    check_augment,
    check_hierarchy,
    default_hierarchy,
    merge_augment,
    small_parent,
    validate_plans,
)
from roomstack.scene.assets import AssetQuery, Embedder, HashEmbedder, Manifest, retrieve_asset
from roomstack.scene.model import MotifRecord, Parent, RegionRecord, Scene, SceneObject, audit_scene, occupancy_ratio
from roomstack.scene.room import Room, door_obstacles
from roomstack.solver.core import FURNITURE_STEP, TIME_LIMIT, PlacementRequest, SolveDomain, solve_layout, static_candidates
from roomstack.support import SupportConfig, SupportRegion, extract_support_regions

log = logging.getLogger(__name__)

T_OCC = 0.3
AUGMENT_TAG = "augmented"


@dataclass(frozen=True)
class GenerateConfig:
    seed: int = 0
    t_occ: float = T_OCC
    time_limit: float = TIME_LIMIT
    workers: int = 1
    support: SupportConfig = field(default_factory=SupportConfig)


@dataclass(frozen=True)
class _Built:
    arrangement: ArrangementPlan
    unit: Arrangement
    tree: MotifNode


@dataclass
class _State:
    room: Room
    seed: int
    plans: PlanSet
    objects: list[SceneObject] = field(default_factory=list)
    motifs: list[MotifRecord] = field(default_factory=list)
    regions: list[RegionRecord] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def scene(self) -> Scene:
        return Scene(
            self.room,
            tuple(self.objects),
            tuple(self.motifs),
            tuple(self.regions),
            self.seed,
            self.plans.hashes(),
            tuple(self.notes),
        )

    def fail(self, stage: str, message: str, arrangement: Optional[str] = None) -> StageError:
        return StageError(stage, message, arrangement, self.scene())


# retrieval


def resolve_specs(
    objects: Sequence[ObjectPlan], manifest: Optional[Manifest], embedder: Optional[Embedder]
) -> dict[int, ObjectSpec]:
    """Pick an asset per requested object; its measured dimensions replace the requested ones."""
    out = {}
    for o in objects:
        if manifest is None:
            out[o.id] = ObjectSpec(o.name, o.dimensions, None, o.amount, o.description)
            continue
        query = AssetQuery(o.asset_category, f"{o.name} {o.description}".strip(), o.dimensions)
        asset = retrieve_asset(query, manifest, embedder or HashEmbedder(manifest.embedding_dim or 32))
        out[o.id] = ObjectSpec(o.name, asset.dimensions, asset.id, o.amount, o.description)
    return out


def _build(
    arr: ArrangementPlan, plans: PlanSet, objects: dict[int, ObjectPlan], specs: dict[int, ObjectSpec], seed: int
) -> _Built:
    h = plans.hierarchies.get(arr.id)
    tree = h.to_node() if h is not None else default_hierarchy(arr, objects)
    assets = {specs[m.id].name: specs[m.id] for m in arr.composition.furniture}
    return _Built(arr, instantiate_scene_motif(tree, assets, seed=f"{seed}:{arr.id}"), tree)


# floor


def _floor_stage(state: _State, built: list[_Built], cfg: GenerateConfig, tags: dict[str, tuple[str, ...]]) -> None:
    if not built:
        return
    room = state.room
    positions = {p.id: p for p in state.plans.placement.positions}
    reqs = []
    for b in built:
        w, _, d = b.unit.dimensions
        p = positions[b.arrangement.id]
        reqs.append(
            PlacementRequest(
                b.arrangement.id,
                (w, d),
                (p.position[0], p.position[1], p.rotation),
                p.wall_alignment,
                p.wall_alignment_id,
                p.ignore_collision,
            )
        )
    dom = SolveDomain(room.boundary, tuple(door_obstacles(room)))
    layout = solve_layout(reqs, dom, time_limit=cfg.time_limit)
    if not layout.feasible:
        raise state.fail("floor-layout", f"no feasible placement for {', '.join(layout.unplaced)}", layout.unplaced[0])
    for b in built:
        pl = layout.poses[b.arrangement.id]
        _emit(state, b, Pose((pl.x, 0.0, pl.z), pl.yaw), Parent(), tags.get(b.arrangement.id, ()))


def _emit(state: _State, b: _Built, pose: Pose, parent: Parent, tags: tuple[str, ...], prefix: str = "") -> list[str]:
    base = f"{prefix}{b.arrangement.id}"
    placed = b.unit.moved(pose.yaw, pose.position)
    ids = []
    for o in placed.objects:
        oid = f"{base}/{o.label}"
        state.objects.append(SceneObject(oid, o.spec, o.pose, parent, b.arrangement.id, o.round, tags))
        ids.append(oid)
    w, _, d = b.unit.dimensions
    state.motifs.append(
        MotifRecord(base, b.arrangement.composition.description, parent, pose, (w, d), tuple(ids), b.tree.to_json())
    )
    return ids


# small objects on furniture


def _to_world(region: SupportRegion, pose: Pose) -> SupportRegion:
    def move(p: Polygon2) -> Polygon2:
        pts = []
        for x, z in p.vertices:
            rx, rz = rotate_xz(x, z, pose.yaw)
            pts.append((rx + pose.x, rz + pose.z))
        return Polygon2(tuple(pts))

    return SupportRegion(
        region.id,
        move(region.footprint),
        region.surface_height + pose.y,
        region.clearance,
        region.is_top,
        region.faces,
        tuple(move(h) for h in region.holes),
    )


@dataclass(frozen=True)
class _ChildJob:
    built: _Built
    region: Optional[str]
    position: Optional[tuple[float, float]]
    rotation: float


@dataclass(frozen=True)
class _ParentResult:
    parent_id: str
    regions: tuple[SupportRegion, ...]  # furniture frame
    placed: tuple[tuple[_ChildJob, str, Pose], ...]  # job, region id, pose in the furniture frame


def _fits(b: _Built, region: SupportRegion, step: float) -> bool:
    w, h, d = b.unit.dimensions
    if h > region.clearance or w * d > region.area:
        return False
    rep = region.footprint.representative_point()
    req = PlacementRequest("probe", (w, d), (rep[0], rep[1], 0.0))
    return len(static_candidates(req, SolveDomain(region.footprint, region.holes, step))) > 0


def _solve_parent(
    parent_id: str, mesh: TriMesh, jobs: list[_ChildJob], cfg: GenerateConfig
) -> _ParentResult:
    regions = extract_support_regions(mesh, cfg.support)
    by_id = {r.id: r for r in regions}
    # largest first; among equal areas prefer the top surface
    ranked = sorted(regions, key=lambda r: (-round(r.area, 6), not r.is_top, r.id))
    assigned: dict[str, list[_ChildJob]] = {}
    for job in jobs:
        aid = job.built.arrangement.id
        if job.region is not None:
            if job.region not in by_id:
                raise StageError("small-objects", f"{parent_id} has no support region {job.region!r}", aid)
            target = by_id[job.region]
            if not _fits(job.built, target, FURNITURE_STEP):
                raise StageError("small-objects", f"does not fit on region {job.region} of {parent_id}", aid)
        else:
            target = next((r for r in ranked if _fits(job.built, r, FURNITURE_STEP)), None)
            if target is None:
                raise StageError("small-objects", f"no support region of {parent_id} fits it", aid)
        assigned.setdefault(target.id, []).append(job)
    placed = []
    for rid in sorted(assigned):
        region = by_id[rid]
        group = assigned[rid]
        rep = region.footprint.representative_point()
        reqs = []
        for job in group:
            w, _, d = job.built.unit.dimensions
            x, z = job.position if job.position is not None else rep
            reqs.append(PlacementRequest(job.built.arrangement.id, (w, d), (x, z, job.rotation)))
        dom = SolveDomain(region.footprint, region.holes, FURNITURE_STEP)
        layout = solve_layout(reqs, dom, time_limit=cfg.time_limit)
        if not layout.feasible:
            raise StageError("small-objects", f"region {rid} of {parent_id} cannot hold them all", layout.unplaced[0])
        for job in group:
            p = layout.poses[job.built.arrangement.id]
            placed.append((job, rid, Pose((p.x, region.surface_height, p.z), p.yaw)))
    return _ParentResult(parent_id, tuple(regions), tuple(placed))


def _small_stage(
    state: _State,
    built: list[_Built],
    specs: dict[int, ObjectSpec],
    manifest: Optional[Manifest],
    cfg: GenerateConfig,
    instances: dict[int, list[str]],
) -> None:
    if not built:
        return
    small = {o.id: o for o in state.plans.requirement.small_objects}
    positions = {p.id: p for p in state.plans.placement.small_positions}
    jobs: dict[str, list[_ChildJob]] = {}
    parent_spec: dict[str, ObjectSpec] = {}
    for b in built:
        aid = b.arrangement.id
        sp = positions.get(aid)
        parent_obj = sp.parent_object if sp is not None else small_parent(b.arrangement, small)
        ids = instances.get(parent_obj, [])
        k = sp.instance if sp is not None else 0
        if k >= len(ids):
            raise state.fail("small-objects", f"parent object {parent_obj} has no placed instance {k}", aid)
        pid = ids[k]
        parent_spec[pid] = specs[parent_obj]
        job = _ChildJob(b, sp.region if sp else None, sp.position if sp else None, sp.rotation if sp else 0.0)
        jobs.setdefault(pid, []).append(job)

    meshes = {}
    for pid in sorted(jobs):
        spec = parent_spec[pid]
        if manifest is None or spec.asset_id is None:
            raise state.fail("support-regions", f"{pid} has no asset mesh to extract support regions from")
        mesh = manifest.load_mesh(manifest.get(spec.asset_id))
        if mesh is None:
            raise state.fail("support-regions", f"asset {spec.asset_id} has no mesh")
        meshes[pid] = mesh

    def work(pid: str) -> _ParentResult:
        return _solve_parent(pid, meshes[pid], jobs[pid], cfg)

    order = sorted(jobs)
    try:
        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                results = list(pool.map(work, order))
        else:
            results = [work(pid) for pid in order]
    except StageError as exc:
        exc.partial_scene = state.scene()
        raise
    except RoomstackError as exc:
        raise state.fail("support-regions", str(exc)) from exc

    floor_pose = {o.id: o.pose for o in state.objects}
    for res in results:
        ppose = floor_pose[res.parent_id]
        for r in res.regions:
            state.regions.append(RegionRecord(res.parent_id, _to_world(r, ppose)))
        for job, rid, local in res.placed:
            x, z = rotate_xz(local.x, local.z, ppose.yaw)
            world = Pose((x + ppose.x, local.y + ppose.y, z + ppose.z), local.yaw + ppose.yaw)
            _emit(state, job.built, world, Parent(res.parent_id, rid), (), prefix=f"{res.parent_id}/")


def _instances(state: _State, built: list[_Built], objects: dict[int, ObjectPlan]) -> dict[int, list[str]]:
    """Requirement object id -> scene ids of its placed copies, in arrangement order."""
    out: dict[int, list[str]] = {}
    for b in built:
        for m in b.arrangement.composition.furniture:
            name = objects[m.id].name
            out[m.id] = [o.id for o in state.objects if o.motif == b.arrangement.id and o.spec.name == name]
    return out


def _assemble(
    plans: PlanSet,
    room: Room,
    manifest: Optional[Manifest],
    embedder: Optional[Embedder],
    cfg: GenerateConfig,
    tags: dict[str, tuple[str, ...]],
    notes: Sequence[str] = (),
) -> _State:
    state = _State(room, cfg.seed, plans, notes=list(notes))
    req = plans.requirement
    large = {o.id: o for o in req.objects}
    small = {o.id: o for o in req.small_objects}
    try:
        specs = resolve_specs(list(req.objects) + list(req.small_objects), manifest, embedder)
    except RoomstackError as exc:
        raise state.fail("retrieve", str(exc)) from exc

    def build_all(arrs: Sequence[ArrangementPlan], objects: dict[int, ObjectPlan]) -> list[_Built]:
        out = []
        for a in arrs:
            try:
                out.append(_build(a, plans, objects, specs, cfg.seed))
            except (HierarchyError, RoomstackError, ValueError) as exc:
                raise state.fail("motifs", str(exc), a.id) from exc
        return out

    built_large = build_all(plans.grouping.arrangements, large)
    built_small = build_all(plans.grouping.small_arrangements, small)
    _floor_stage(state, built_large, cfg, tags)
    _small_stage(state, built_small, specs, manifest, cfg, _instances(state, built_large, large))
    return state


def run_generate(
    plans: PlanSet,
    manifest: Optional[Manifest] = None,
    seed: int = 0,
    t_occ: float = T_OCC,
    planner: Optional[PlannerClient] = None,
    room: Optional[Room] = None,
    embedder: Optional[Embedder] = None,
    time_limit: float = TIME_LIMIT,
    workers: int = 1,
) -> Scene:
    """Validate, retrieve, build motifs, solve floor and furniture surfaces, augment once if sparse, audit.

    Raises PlanError when the plans do not validate and StageError (with the
    partial scene attached) when a later stage fails.
    """
    cfg = GenerateConfig(seed, t_occ, time_limit, workers)
    room = room or plans.room()
    violations = validate_plans(plans, room)
    if violations:
        raise PlanError(f"{len(violations)} plan violation(s)", violations)

    state = _assemble(plans, room, manifest, embedder, cfg, {})
    occ = occupancy_ratio(state.scene())
    if occ < t_occ:
        if planner is None:
            state.notes.append(f"augmentation skipped: occupancy {occ:.3f} below t_occ {t_occ:.2f} and no planner attached")
        else:
            payload = {
                "room": room.to_dict(),
                "occupancy": occ,
                "existing": sorted({o.spec.name for o in state.objects}),
                "request": "add a few more (1-3) large furniture",
            }
            extra, raw = request_plan(planner, "augment", payload, lambda p: check_augment(plans, p, room))
            merged = merge_augment(plans, extra)
            merged.documents["augment.json"] = raw
            tags = {a.id: (AUGMENT_TAG,) for a in extra.arrangements}
            note = f"augmented with {len(extra.arrangements)} arrangement(s): occupancy {occ:.3f} below t_occ {t_occ:.2f}"
            state = _assemble(merged, room, manifest, embedder, cfg, tags, [note])
    else:
        state.notes.append(f"occupancy {occ:.3f} meets t_occ {t_occ:.2f}")

    scene = state.scene()
    problems = audit_scene(scene)
    if problems:
        raise StageError("audit", "; ".join(problems), None, scene)
    log.info("generated %d objects, occupancy %.3f", len(scene.objects), occupancy_ratio(scene))
    return scene


def plans_from_planner(planner: PlannerClient, brief: str, room: Optional[Room] = None) -> PlanSet:
    """Collect a full plan set from a planner, validating each response before the next request."""
    docs = {}
    req, docs["requirement.json"] = request_plan(
        planner,
        "decompose",
        {"brief": brief},
        lambda p: [] if (room is not None or p.room is not None) else ["requirement: room is required"],
    )

    def grouping_ok(g: GroupingPlan) -> list[str]:
        probe = PlanSet(req, g, PlacementPlan(), {})
        return [v for v in validate_plans(probe, room) if not v.startswith(("hierarchy-", "placement"))]

    grouping, docs["grouping.json"] = request_plan(planner, "group", {"requirement": req.model_dump()}, grouping_ok)
    objects = {o.id: o for o in list(req.objects) + list(req.small_objects)}
    hierarchies = {}
    for arr in list(grouping.arrangements) + list(grouping.small_arrangements):
        if sum(m.amount for m in arr.composition.furniture) < 2:
            continue
        tree, docs[f"hierarchy-{arr.id}.json"] = request_plan(
            planner,
            "hierarchy",
            {"arrangement": arr.id, "composition": arr.composition.model_dump()},
            lambda t, a=arr: check_hierarchy(a, t, objects),
        )
        hierarchies[arr.id] = tree

    def placement_ok(p: PlacementPlan) -> list[str]:
        return validate_plans(PlanSet(req, grouping, p, hierarchies), room)

    placement, docs["placement.json"] = request_plan(
        planner, "place", {"arrangements": [a.id for a in grouping.arrangements]}, placement_ok
    )
    return PlanSet(req, grouping, placement, hierarchies, docs)
