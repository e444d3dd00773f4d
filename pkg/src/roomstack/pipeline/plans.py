"""Plan documents: typed schemas for decomposition, grouping, hierarchy and placement, plus cross-validation."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from roomstack.errors import InvalidPolygonError, PlanError
from roomstack.geom.polygon import Polygon2
from roomstack.motifs.hierarchy import validate_hierarchy
from roomstack.motifs.model import OBJECT_TYPE, MotifNode
from roomstack.scene.room import DOOR_WIDTH, ROOM_HEIGHT, Door, Room

PLAN_VERSION = 1
KINDS = ("requirement", "grouping", "hierarchy", "placement", "augment")

REQUIREMENT_FILE = "requirement.json"
GROUPING_FILE = "grouping.json"
PLACEMENT_FILE = "placement.json"
HIERARCHY_PREFIX = "hierarchy-"


class _Doc(BaseModel):
    model_config = ConfigDict(extra="forbid")


class _Versioned(_Doc):
    version: int = PLAN_VERSION

    @field_validator("version")
    @classmethod
    def _known_version(cls, v: int) -> int:
        if v != PLAN_VERSION:
            raise ValueError(f"plan version {v} is not supported (expected {PLAN_VERSION})")
        return v


Vec3 = tuple[float, float, float]


def _positive_dims(v: Vec3) -> Vec3:
    if not all(d > 0 for d in v):
        raise ValueError("dimensions must be positive")
    return v


class RoomPlan(_Doc):
    floorplan: list[tuple[float, float]]
    door_location: Optional[tuple[float, float]] = None
    door_width: float = Field(DOOR_WIDTH, gt=0)
    room_height: float = Field(ROOM_HEIGHT, gt=0)

    @field_validator("floorplan")
    @classmethod
    def _starts_at_origin(cls, v: list[tuple[float, float]]) -> list[tuple[float, float]]:
        if len(v) < 3:
            raise ValueError("floorplan needs at least 3 vertices")
        if tuple(v[0]) != (0.0, 0.0):
            raise ValueError(f"floorplan must start at (0,0), got ({v[0][0]:g},{v[0][1]:g})")
        return v

    def to_room(self) -> Room:
        door = Door(self.door_location, self.door_width) if self.door_location is not None else None
        return Room(Polygon2(tuple(self.floorplan)), self.room_height, door)


class ObjectPlan(_Doc):
    id: int
    name: str = Field(min_length=1)
    description: str = ""
    dimensions: Vec3
    amount: int = Field(1, ge=1)
    category: Optional[str] = None  # asset category; defaults to the name

    _dims = field_validator("dimensions")(_positive_dims)

    @property
    def asset_category(self) -> str:
        return self.category or self.name


class SmallObjectPlan(ObjectPlan):
    parent_object: int


class RequirementPlan(_Versioned):
    room_type: str = ""
    room: Optional[RoomPlan] = None
    objects: list[ObjectPlan] = []
    small_objects: list[SmallObjectPlan] = []

    @model_validator(mode="after")
    def _references(self) -> "RequirementPlan":
        ids = [o.id for o in self.objects] + [o.id for o in self.small_objects]
        dup = sorted({i for i in ids if ids.count(i) > 1})
        if dup:
            raise ValueError(f"object ids must be unique, repeated: {dup}")
        large = {o.id for o in self.objects}
        for k, s in enumerate(self.small_objects):
            if s.parent_object not in large:
                raise ValueError(
                    f"small_objects[{k}].parent_object: {s.parent_object} does not reference an objects id"
                )
        return self

    def object(self, oid: int) -> ObjectPlan:
        for o in list(self.objects) + list(self.small_objects):
            if o.id == oid:
                return o
        raise KeyError(oid)


class Member(_Doc):
    id: int
    amount: int = Field(1, ge=1)


class Composition(_Doc):
    description: str = ""
    furniture: list[Member] = Field(min_length=1)
    total_footprint: Vec3
    clearance: float = Field(0.0, ge=0)

    _dims = field_validator("total_footprint")(_positive_dims)


class ArrangementPlan(_Doc):
    id: str = Field(min_length=1)
    area_name: str = ""
    composition: Composition
    rationale: str = ""


class GroupingPlan(_Versioned):
    arrangements: list[ArrangementPlan] = []
    small_arrangements: list[ArrangementPlan] = []


class HierarchyPlan(_Versioned):
    """A motif tree in the compositional JSON shape."""

    model_config = ConfigDict(extra="forbid")
    type: str = Field(min_length=1)
    description: str = ""
    elements: list["HierarchyPlan"] = []
    amount: Optional[int] = None
    make_tight: bool = False
    name: Optional[str] = None
    params: dict[str, Any] = {}

    def to_node(self) -> MotifNode:
        return MotifNode.from_json(self.model_dump(exclude={"version"}))


class Position(_Doc):
    id: str
    position: tuple[float, float]
    rotation: float = 0.0
    rationale: str = ""
    wall_alignment: bool = False
    wall_alignment_id: Optional[int] = Field(None, ge=0)
    ignore_collision: bool = False

    @model_validator(mode="after")
    def _wall_id_needs_alignment(self) -> "Position":
        if self.wall_alignment_id is not None and not self.wall_alignment:
            raise ValueError("wall_alignment_id is set but wall_alignment is false")
        return self


class SmallPosition(_Doc):
    """Placement of a small arrangement on a furniture object, in the furniture's own frame."""

    id: str
    parent_object: int
    instance: int = Field(0, ge=0)  # which copy of the parent when its amount > 1
    region: Optional[str] = None  # pin a support region id; default is the largest that fits
    position: Optional[tuple[float, float]] = None
    rotation: float = 0.0
    rationale: str = ""


class PlacementPlan(_Versioned):
    positions: list[Position] = []
    small_positions: list[SmallPosition] = []


class AugmentPlan(_Versioned):
    """Extra large furniture suggested when the room is sparse, with its grouping and placement."""

    objects: list[ObjectPlan] = Field(min_length=1)
    arrangements: list[ArrangementPlan] = Field(min_length=1)
    hierarchies: dict[str, HierarchyPlan] = {}
    positions: list[Position] = []


_MODELS: dict[str, type[BaseModel]] = {
    "requirement": RequirementPlan,
    "grouping": GroupingPlan,
    "hierarchy": HierarchyPlan,
    "placement": PlacementPlan,
    "augment": AugmentPlan,
}


def _loc(loc: tuple) -> str:
    out = ""
    for part in loc:
        if isinstance(part, int):
            out += f"[{part}]"
        else:
            out += ("." if out else "") + str(part)
    return out or "<document>"


def parse_plan(kind: str, document: Any) -> BaseModel:
    """Typed plan, or a PlanError with one ``field.path: reason`` line per problem."""
    if kind not in _MODELS:
        raise PlanError(f"unknown plan kind {kind!r} (expected one of {', '.join(KINDS)})")
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise PlanError(f"{kind}: not valid JSON: {exc}") from exc
    try:
        return _MODELS[kind].model_validate(document)
    except ValidationError as exc:
        lines = []
        for err in exc.errors():
            msg = err["msg"].removeprefix("Value error, ")
            lines.append(f"{kind}: {_loc(err['loc'])}: {msg}")
        raise PlanError(f"{kind} plan is invalid: {lines[0]}", lines) from None


def canonical_json(doc: Any) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def digest(doc: Any) -> str:
    return hashlib.sha256(canonical_json(doc).encode()).hexdigest()


@dataclass
class PlanSet:
    requirement: RequirementPlan
    grouping: GroupingPlan
    placement: PlacementPlan
    hierarchies: dict[str, HierarchyPlan] = field(default_factory=dict)
    documents: dict[str, Any] = field(default_factory=dict)  # file name -> raw JSON, for provenance

    def hashes(self) -> tuple[tuple[str, str], ...]:
        return tuple((name, digest(doc)) for name, doc in sorted(self.documents.items()))

    def room(self) -> Optional[Room]:
        return self.requirement.room.to_room() if self.requirement.room is not None else None


def load_plan_dir(directory: Path | str) -> PlanSet:
    """Read requirement.json, grouping.json, placement.json and every hierarchy-<id>.json."""
    directory = Path(directory)
    if not directory.is_dir():
        raise PlanError(f"{directory}: not a directory")
    docs: dict[str, Any] = {}
    for name in (REQUIREMENT_FILE, GROUPING_FILE, PLACEMENT_FILE):
        path = directory / name
        if not path.exists():
            raise PlanError(f"{directory}: missing {name}")
        docs[name] = _read(path)
    hierarchies = {}
    for path in sorted(directory.glob(f"{HIERARCHY_PREFIX}*.json")):
        arr_id = path.stem[len(HIERARCHY_PREFIX) :]
        docs[path.name] = _read(path)
        hierarchies[arr_id] = _parse_named("hierarchy", docs[path.name], path.name)
    return PlanSet(
        _parse_named("requirement", docs[REQUIREMENT_FILE], REQUIREMENT_FILE),
        _parse_named("grouping", docs[GROUPING_FILE], GROUPING_FILE),
        _parse_named("placement", docs[PLACEMENT_FILE], PLACEMENT_FILE),
        hierarchies,
        docs,
    )


def _read(path: Path) -> Any:
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise PlanError(f"{path.name}: not valid JSON: {exc}") from exc


def _parse_named(kind: str, doc: Any, name: str):
    try:
        return parse_plan(kind, doc)
    except PlanError as exc:
        raise PlanError(f"{name}: {exc}", [f"{name}: {v}" for v in exc.violations]) from None


# cross-document checks


def _coverage(arrs: list[ArrangementPlan], objects: dict[int, ObjectPlan], what: str) -> list[str]:
    out = []
    seen: dict[int, str] = {}
    for a in arrs:
        for m in a.composition.furniture:
            if m.id not in objects:
                out.append(f"arrangement {a.id!r}: unknown {what} id {m.id}")
                continue
            if m.id in seen:
                out.append(f"{what} {m.id} ({objects[m.id].name}) appears in arrangements {seen[m.id]!r} and {a.id!r}")
                continue
            seen[m.id] = a.id
            if m.amount != objects[m.id].amount:
                out.append(
                    f"arrangement {a.id!r}: {what} {m.id} ({objects[m.id].name}) amount {m.amount} "
                    f"does not match the required {objects[m.id].amount}"
                )
        names = [objects[m.id].name for m in a.composition.furniture if m.id in objects]
        dup = sorted({n for n in names if names.count(n) > 1})
        if dup:
            out.append(f"arrangement {a.id!r}: member names must be distinct, repeated: {dup}")
    for oid, o in objects.items():
        if oid not in seen:
            out.append(f"{what} {oid} ({o.name}) is not in any arrangement")
    return out


def check_hierarchy(arr: ArrangementPlan, tree: Optional[HierarchyPlan], objects: dict[int, ObjectPlan]) -> list[str]:
    """The tree must be valid and use each member object exactly once with the grouped amount."""
    label = f"hierarchy-{arr.id}"
    members = {objects[m.id].name: m.amount for m in arr.composition.furniture if m.id in objects}
    if tree is None:
        if len(arr.composition.furniture) > 1:
            return [f"{label}: missing; arrangements with several member objects need a motif hierarchy"]
        return []
    node = tree.to_node()
    out = [f"{label}: {v}" for v in validate_hierarchy(node)]
    if out:
        return out
    leaves = node.leaves()
    by_key = {}
    for leaf in leaves:
        key = leaf.key if leaf.key in members else leaf.description.strip()
        if key not in members:
            out.append(f"{label}: object {leaf.key!r} is not a member of the arrangement")
            continue
        by_key[key] = leaf
        if leaf.amount != members[key]:
            out.append(f"{label}: object {key!r} has amount {leaf.amount}, the grouping says {members[key]}")
    for name in members:
        if name not in by_key:
            out.append(f"{label}: member {name!r} does not appear in the hierarchy")
    return out


def _placement_checks(plans: PlanSet, room: Optional[Room], small: dict[int, SmallObjectPlan]) -> list[str]:
    out = []
    req, grouping, placement = plans.requirement, plans.grouping, plans.placement
    large_ids = [a.id for a in grouping.arrangements]
    small_ids = [a.id for a in grouping.small_arrangements]
    n_walls = len(room.walls) if room is not None else None
    seen = set()
    for k, p in enumerate(placement.positions):
        if p.id not in large_ids:
            out.append(f"placement positions[{k}]: unknown arrangement id {p.id!r}")
        if p.id in seen:
            out.append(f"placement positions[{k}]: arrangement {p.id!r} is placed twice")
        seen.add(p.id)
        if p.wall_alignment_id is not None and n_walls is not None and not p.wall_alignment_id < n_walls:
            out.append(
                f"placement positions[{k}]: wall_alignment_id {p.wall_alignment_id} is out of range [0, {n_walls - 1}]"
            )
    for a in large_ids:
        if a not in seen:
            out.append(f"placement: arrangement {a!r} has no position")
    parents = {o.id: o for o in req.objects}
    small_by_arr = {a.id: a for a in grouping.small_arrangements}
    seen_small = set()
    for k, sp in enumerate(placement.small_positions):
        if sp.id not in small_ids:
            out.append(f"placement small_positions[{k}]: unknown small arrangement id {sp.id!r}")
            continue
        if sp.id in seen_small:
            out.append(f"placement small_positions[{k}]: small arrangement {sp.id!r} is placed twice")
        seen_small.add(sp.id)
        expected = small_parent(small_by_arr[sp.id], small)
        if expected is not None and sp.parent_object != expected:
            out.append(
                f"placement small_positions[{k}]: parent_object {sp.parent_object} differs from the members' parent {expected}"
            )
        if sp.parent_object in parents and sp.instance >= parents[sp.parent_object].amount:
            out.append(f"placement small_positions[{k}]: instance {sp.instance} exceeds the parent's amount")
    return out


def small_parent(arr: ArrangementPlan, small: dict[int, SmallObjectPlan]) -> Optional[int]:
    parents = {small[m.id].parent_object for m in arr.composition.furniture if m.id in small}
    return parents.pop() if len(parents) == 1 else None


def validate_plans(plans: PlanSet, room: Optional[Room] = None) -> list[str]:
    """Cross-document consistency; an empty list means the plan set is usable."""
    req, grouping = plans.requirement, plans.grouping
    out = []
    if room is None:
        try:
            room = plans.room()
        except (InvalidPolygonError, ValueError) as exc:
            out.append(f"requirement room: {exc}")
    if room is None and not out:
        out.append("requirement: no room given and none supplied")
    large = {o.id: o for o in req.objects}
    small = {o.id: o for o in req.small_objects}
    out += _coverage(grouping.arrangements, large, "object")
    out += _coverage(grouping.small_arrangements, small, "small object")
    ids = [a.id for a in grouping.arrangements] + [a.id for a in grouping.small_arrangements]
    dup = sorted({i for i in ids if ids.count(i) > 1})
    if dup:
        out.append(f"grouping: arrangement ids must be unique, repeated: {dup}")
    for a in grouping.small_arrangements:
        members = [m.id for m in a.composition.furniture if m.id in small]
        if members and small_parent(a, small) is None:
            out.append(f"small arrangement {a.id!r}: members rest on different parent objects")
    for a in grouping.arrangements:
        out += check_hierarchy(a, plans.hierarchies.get(a.id), large)
    for a in grouping.small_arrangements:
        out += check_hierarchy(a, plans.hierarchies.get(a.id), small)
    for hid in sorted(set(plans.hierarchies) - set(ids)):
        out.append(f"hierarchy-{hid}: no arrangement with this id")
    out += _placement_checks(plans, room, small)
    return out


def default_hierarchy(arr: ArrangementPlan, objects: dict[int, ObjectPlan]) -> MotifNode:
    """Single-member arrangements without a tree: one leaf carrying the grouped amount."""
    m = arr.composition.furniture[0]
    o = objects[m.id]
    return MotifNode(OBJECT_TYPE, o.description or o.name, amount=m.amount, name=o.name)


def merge_augment(plans: PlanSet, extra: AugmentPlan) -> PlanSet:
    """Plan set extended with augmentation furniture; ids must not collide."""
    req = plans.requirement.model_copy(update={"objects": list(plans.requirement.objects) + list(extra.objects)})
    grouping = plans.grouping.model_copy(
        update={"arrangements": list(plans.grouping.arrangements) + list(extra.arrangements)}
    )
    placement = plans.placement.model_copy(
        update={"positions": list(plans.placement.positions) + list(extra.positions)}
    )
    hier = dict(plans.hierarchies)
    hier.update(extra.hierarchies)
    return PlanSet(req, grouping, placement, hier, dict(plans.documents))


def check_augment(plans: PlanSet, extra: AugmentPlan, room: Optional[Room] = None) -> list[str]:
    out = []
    old_ids = {o.id for o in plans.requirement.objects} | {o.id for o in plans.requirement.small_objects}
    for o in extra.objects:
        if o.id in old_ids:
            out.append(f"augment: object id {o.id} is already used")
    old_arr = {a.id for a in plans.grouping.arrangements} | {a.id for a in plans.grouping.small_arrangements}
    for a in extra.arrangements:
        if a.id in old_arr:
            out.append(f"augment: arrangement id {a.id!r} is already used")
    if out:
        return out
    try:
        merged = merge_augment(plans, extra)
        merged.requirement = RequirementPlan.model_validate(merged.requirement.model_dump())
    except ValidationError as exc:
        return [f"augment: {e['msg']}" for e in exc.errors()]
    return validate_plans(merged, room)

