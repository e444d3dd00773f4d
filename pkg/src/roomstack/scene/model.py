"""Scene value types, the scene.json format and the scene audit."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Optional

import shapely

from roomstack.errors import SceneFormatError
from roomstack.geom.polygon import Polygon2, disc_polygon, rect_polygon
from roomstack.geom.pose import Pose
from roomstack.motifs.model import ObjectSpec
from roomstack.scene.room import Room
from roomstack.support import SupportRegion

SCENE_FORMAT = "roomstack.scene"
SCENE_VERSION = 1
FLOOR = "floor"

_HEIGHT_TOL = 1e-6
_AREA_TOL = 1e-9


@dataclass(frozen=True)
class Parent:
    """``floor`` or a support region ``region`` of furniture object ``object``."""

    object: Optional[str] = None
    region: Optional[str] = None

    @property
    def is_floor(self) -> bool:
        return self.object is None

    def to_json(self) -> Any:
        return FLOOR if self.is_floor else {"object": self.object, "region": self.region}

    @classmethod
    def from_json(cls, d: Any) -> "Parent":
        if d == FLOOR:
            return cls()
        if isinstance(d, dict) and "object" in d and "region" in d:
            return cls(str(d["object"]), str(d["region"]))
        raise SceneFormatError(f"bad parent {d!r}")


@dataclass(frozen=True)
class SceneObject:
    id: str
    spec: ObjectSpec
    pose: Pose
    parent: Parent = Parent()
    motif: Optional[str] = None
    round: bool = False
    tags: tuple[str, ...] = ()

    def footprint(self) -> Polygon2:
        w, _, d = self.spec.dimensions
        if self.round:
            return disc_polygon(self.pose.x, self.pose.z, max(w, d) / 2)
        return rect_polygon(self.pose.x, self.pose.z, w, d, self.pose.yaw)

    def to_dict(self) -> dict:
        d = {
            "id": self.id,
            "spec": self.spec.to_dict(),
            "pose": self.pose.to_dict(),
            "parent": self.parent.to_json(),
            "motif": self.motif,
            "round": self.round,
        }
        if self.tags:
            d["tags"] = list(self.tags)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SceneObject":
        return cls(
            str(d["id"]),
            ObjectSpec.from_dict(d["spec"]),
            Pose.from_dict(d["pose"]),
            Parent.from_json(d.get("parent", FLOOR)),
            d.get("motif"),
            bool(d.get("round", False)),
            tuple(d.get("tags", ())),
        )


@dataclass(frozen=True)
class RegionRecord:
    """A support region of a placed furniture object, in world coordinates."""

    object: str
    region: SupportRegion

    def to_dict(self) -> dict:
        return {"object": self.object, "region": self.region.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "RegionRecord":
        return cls(str(d["object"]), SupportRegion.from_dict(d["region"]))


@dataclass(frozen=True)
class MotifRecord:
    id: str
    description: str
    parent: Parent
    pose: Pose
    footprint: tuple[float, float]
    objects: tuple[str, ...]
    hierarchy: Optional[dict] = field(default=None, compare=True)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "description": self.description,
            "parent": self.parent.to_json(),
            "pose": self.pose.to_dict(),
            "footprint": list(self.footprint),
            "objects": list(self.objects),
            "hierarchy": self.hierarchy,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MotifRecord":
        return cls(
            str(d["id"]),
            str(d.get("description", "")),
            Parent.from_json(d.get("parent", FLOOR)),
            Pose.from_dict(d["pose"]),
            tuple(float(v) for v in d["footprint"]),
            tuple(str(o) for o in d.get("objects", [])),
            d.get("hierarchy"),
        )


@dataclass(frozen=True)
class Scene:
    room: Room
    objects: tuple[SceneObject, ...] = ()
    motifs: tuple[MotifRecord, ...] = ()
    regions: tuple[RegionRecord, ...] = ()
    seed: int = 0
    plans: tuple[tuple[str, str], ...] = ()  # (document name, sha256)
    notes: tuple[str, ...] = ()

    def object(self, oid: str) -> SceneObject:
        for o in self.objects:
            if o.id == oid:
                return o
        raise KeyError(oid)

    def region(self, parent: Parent) -> Optional[SupportRegion]:
        for r in self.regions:
            if r.object == parent.object and r.region.id == parent.region:
                return r.region
        return None

    def floor_objects(self) -> list[SceneObject]:
        return [o for o in self.objects if o.parent.is_floor]


def occupancy_ratio(scene: Scene) -> float:
    """Union area of floor-standing footprints over floor area."""
    floor = scene.room.boundary.shape
    shapes = [o.footprint().shape for o in scene.floor_objects()]
    if not shapes:
        return 0.0
    covered = shapely.union_all(shapes).intersection(floor).area
    return float(min(1.0, covered / floor.area))


def _rests_on_motif_peer(o: SceneObject, scene: Scene) -> bool:
    """True when ``o`` sits flush on top of another object of the same motif."""
    if o.motif is None:
        return False
    fp = o.footprint().shape
    for other in scene.objects:
        if other.id == o.id or other.motif != o.motif or other.parent != o.parent:
            continue
        top = other.pose.y + other.spec.height
        if abs(top - o.pose.y) <= _HEIGHT_TOL and fp.intersection(other.footprint().shape).area > _AREA_TOL:
            return True
    return False


def audit_scene(scene: Scene) -> list[str]:
    """Scene invariants: unique ids, support consistency and containment.

    An object is supported when it rests on its parent region's surface, or
    flush on top of another object of its own motif (stacks, piles, pyramids).
    Either way its top must stay within the region's clearance.
    """
    problems = []
    ids = [o.id for o in scene.objects]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        problems.append(f"duplicate object ids: {dup}")
    floor = scene.room.boundary.shape
    for o in scene.objects:
        fp = o.footprint().shape
        if o.parent.is_floor:
            height, clearance, region_shape = 0.0, scene.room.height, floor
        else:
            region = scene.region(o.parent)
            if region is None:
                problems.append(f"{o.id}: parent region {o.parent.object}/{o.parent.region} does not exist")
                continue
            height, clearance = region.surface_height, region.clearance
            region_shape = region.footprint.shape
            for hole in region.holes:
                region_shape = region_shape.difference(hole.shape)
        if abs(o.pose.y - height) > _HEIGHT_TOL and not _rests_on_motif_peer(o, scene):
            problems.append(f"{o.id}: rests at y={o.pose.y:.6f}, surface is at {height:.6f}")
        if o.pose.y + o.spec.height > height + clearance + _HEIGHT_TOL:
            problems.append(f"{o.id}: top {o.pose.y + o.spec.height:.3f} exceeds clearance {clearance:.3f} above the surface")
        if fp.area - fp.intersection(region_shape).area > _AREA_TOL:
            problems.append(f"{o.id}: footprint leaves its support region")
    return problems


def serialize_scene(scene: Scene) -> str:
    doc = {
        "format": SCENE_FORMAT,
        "version": SCENE_VERSION,
        "seed": scene.seed,
        "room": scene.room.to_dict(),
        "plans": [{"name": n, "sha256": h} for n, h in scene.plans],
        "notes": list(scene.notes),
        "regions": [r.to_dict() for r in scene.regions],
        "motifs": [m.to_dict() for m in scene.motifs],
        "objects": [o.to_dict() for o in scene.objects],
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _at(path: str, fn, *args):
    try:
        return fn(*args)
    except SceneFormatError as exc:
        raise SceneFormatError(f"{path}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise SceneFormatError(f"{path}: {type(exc).__name__}: {exc}") from exc


def parse_scene(text: str | dict) -> Scene:
    doc = json.loads(text) if isinstance(text, str) else text
    if not isinstance(doc, dict) or doc.get("format") != SCENE_FORMAT:
        raise SceneFormatError("not a scene document")
    if doc.get("version") != SCENE_VERSION:
        raise SceneFormatError(f"scene version {doc.get('version')!r} is not supported (expected {SCENE_VERSION})")
    room = _at("room", Room.from_dict, doc["room"])
    regions = tuple(_at(f"regions[{i}]", RegionRecord.from_dict, r) for i, r in enumerate(doc.get("regions", [])))
    motifs = tuple(_at(f"motifs[{i}]", MotifRecord.from_dict, m) for i, m in enumerate(doc.get("motifs", [])))
    objects = tuple(_at(f"objects[{i}]", SceneObject.from_dict, o) for i, o in enumerate(doc.get("objects", [])))
    known = {(r.object, r.region.id) for r in regions}
    for i, o in enumerate(objects):
        if not o.parent.is_floor and (o.parent.object, o.parent.region) not in known:
            raise SceneFormatError(
                f"objects[{i}].parent: object {o.id!r} is parented to unknown region "
                f"{o.parent.region!r} of {o.parent.object!r}"
            )
    plans = tuple((str(p["name"]), str(p["sha256"])) for p in doc.get("plans", []))
    return Scene(room, objects, motifs, regions, int(doc.get("seed", 0)), plans, tuple(doc.get("notes", [])))
