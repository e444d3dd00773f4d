"""Data model for motifs: object specs, placed objects, arrangements and motif trees."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional, Union

import numpy as np

from roomstack.geom.polygon import Polygon2, disc_polygon, rect_corners, rect_polygon
from roomstack.geom.pose import Pose, normalize_yaw, rotate_xz


class MotifType(str, Enum):
    STACK = "stack"
    PILE = "pile"
    ROW = "row"
    GRID = "grid"
    PYRAMID = "pyramid"
    LEFT_OF = "left_of"
    IN_FRONT_OF = "in_front_of"
    ON_TOP = "on_top"
    SURROUND = "surround"
    RECTANGULAR_PERIMETER = "rectangular_perimeter"
    BED_NIGHTSTAND = "bed_nightstand"
    ON_EACH_SIDE = "on_each_side"

    @property
    def arity(self) -> int:
        return ARITY[self]


SINGLE_OBJECT = frozenset({MotifType.STACK, MotifType.PILE, MotifType.ROW, MotifType.GRID, MotifType.PYRAMID})
TWO_OBJECT = frozenset(
    {
        MotifType.BED_NIGHTSTAND,
        MotifType.SURROUND,
        MotifType.RECTANGULAR_PERIMETER,
        MotifType.LEFT_OF,
        MotifType.IN_FRONT_OF,
        MotifType.ON_TOP,
    }
)
THREE_OBJECT = frozenset({MotifType.ON_EACH_SIDE})
ARITY = {**{t: 1 for t in SINGLE_OBJECT}, **{t: 2 for t in TWO_OBJECT}, **{t: 3 for t in THREE_OBJECT}}

# the motif library lists "in_front"; prompts and hierarchies use "in_front_of"
_ALIASES = {"in_front": MotifType.IN_FRONT_OF}

OBJECT_TYPE = "object"


def parse_motif_type(name: str) -> MotifType:
    key = str(name).strip().lower()
    if key in _ALIASES:
        return _ALIASES[key]
    return MotifType(key)


@dataclass(frozen=True)
class ObjectSpec:
    name: str
    dimensions: tuple[float, float, float]  # width (x), height (y), depth (z)
    asset_id: Optional[str] = None
    amount: int = 1
    description: str = ""

    def __post_init__(self) -> None:
        dims = tuple(float(d) for d in self.dimensions)
        if len(dims) != 3 or not all(math.isfinite(d) and d > 0 for d in dims):
            raise ValueError(f"{self.name}: dimensions must be three positive numbers, got {self.dimensions}")
        if int(self.amount) != self.amount or self.amount < 1:
            raise ValueError(f"{self.name}: amount must be a positive integer")
        object.__setattr__(self, "dimensions", dims)
        object.__setattr__(self, "amount", int(self.amount))

    @property
    def width(self) -> float:
        return self.dimensions[0]

    @property
    def height(self) -> float:
        return self.dimensions[1]

    @property
    def depth(self) -> float:
        return self.dimensions[2]

    def with_amount(self, amount: int) -> "ObjectSpec":
        return ObjectSpec(self.name, self.dimensions, self.asset_id, amount, self.description)

    def to_dict(self) -> dict:
        d: dict[str, Any] = {"name": self.name, "dimensions": list(self.dimensions), "amount": self.amount}
        if self.asset_id is not None:
            d["asset_id"] = self.asset_id
        if self.description:
            d["description"] = self.description
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ObjectSpec":
        return cls(d["name"], tuple(d["dimensions"]), d.get("asset_id"), d.get("amount", 1), d.get("description", ""))


@dataclass(frozen=True)
class PlacedObject:
    """One object instance; ``pose.position`` is the bottom centre of its box."""

    label: str
    spec: ObjectSpec
    pose: Pose
    round: bool = False

    def corners_xz(self) -> np.ndarray:
        w, _, d = self.spec.dimensions
        return rect_corners(self.pose.x, self.pose.z, w, d, self.pose.yaw)

    def footprint(self) -> Polygon2:
        w, _, d = self.spec.dimensions
        if self.round:
            return disc_polygon(self.pose.x, self.pose.z, max(w, d) / 2)
        return rect_polygon(self.pose.x, self.pose.z, w, d, self.pose.yaw)

    def aabb(self) -> tuple[np.ndarray, np.ndarray]:
        c = self.corners_xz()
        lo = np.array([c[:, 0].min(), self.pose.y, c[:, 1].min()])
        hi = np.array([c[:, 0].max(), self.pose.y + self.spec.height, c[:, 1].max()])
        return lo, hi

    def moved(self, yaw: float = 0.0, offset=(0.0, 0.0, 0.0)) -> "PlacedObject":
        """Rotate about the origin by ``yaw`` then translate."""
        x, z = rotate_xz(self.pose.x, self.pose.z, yaw)
        pos = (x + offset[0], self.pose.y + offset[1], z + offset[2])
        return PlacedObject(self.label, self.spec, Pose(pos, normalize_yaw(self.pose.yaw + yaw)), self.round)


@dataclass(frozen=True)
class Arrangement:
    objects: tuple[PlacedObject, ...]
    motif: Optional[str] = None
    description: str = ""
    provenance: Optional["MotifNode"] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(self.objects))

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.objects:
            z = np.zeros(3)
            return z, z.copy()
        los, his = zip(*(o.aabb() for o in self.objects))
        return np.min(los, axis=0), np.max(his, axis=0)

    @property
    def dimensions(self) -> tuple[float, float, float]:
        lo, hi = self.bounds
        w, h, d = (hi - lo).tolist()
        return (w, h, d)

    def moved(self, yaw: float = 0.0, offset=(0.0, 0.0, 0.0)) -> "Arrangement":
        return Arrangement(tuple(o.moved(yaw, offset) for o in self.objects), self.motif, self.description, self.provenance)

    def anchored(self) -> "Arrangement":
        """Translate so the bottom centre of the bounds sits at the origin."""
        lo, hi = self.bounds
        c = (lo + hi) / 2
        return self.moved(0.0, (-c[0], -lo[1], -c[2]))

    def grounded(self) -> "Arrangement":
        lo, _ = self.bounds
        return self.moved(0.0, (0.0, -lo[1], 0.0))

    def with_provenance(self, node: "MotifNode", motif: Optional[str] = None) -> "Arrangement":
        return Arrangement(self.objects, motif or self.motif, node.description, node)

    def labels(self) -> list[str]:
        return [o.label for o in self.objects]

    def to_dict(self) -> dict:
        lo, hi = self.bounds
        return {
            "motif": self.motif,
            "description": self.description,
            "bounds": [lo.tolist(), hi.tolist()],
            "objects": [
                {"label": o.label, "spec": o.spec.to_dict(), "pose": o.pose.to_dict(), "round": o.round}
                for o in self.objects
            ],
        }


@dataclass(frozen=True)
class MotifNode:
    """Motif tree node in the hierarchy JSON shape (leaves have ``type`` "object")."""

    type: str
    description: str = ""
    elements: tuple["MotifNode", ...] = ()
    amount: Optional[int] = None
    make_tight: bool = False
    name: Optional[str] = None
    params: dict = field(default_factory=dict, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "elements", tuple(self.elements))

    @property
    def is_leaf(self) -> bool:
        return self.type == OBJECT_TYPE

    @property
    def key(self) -> str:
        """Identity of a leaf object: its name, falling back to the description."""
        return (self.name or self.description).strip()

    def leaves(self) -> list["MotifNode"]:
        if self.is_leaf:
            return [self]
        return [leaf for e in self.elements for leaf in e.leaves()]

    def to_json(self) -> dict:
        d: dict[str, Any] = {"type": self.type, "description": self.description}
        if self.is_leaf:
            if self.name is not None:
                d["name"] = self.name
            d["amount"] = self.amount
        else:
            d["elements"] = [e.to_json() for e in self.elements]
        if self.make_tight or not self.is_leaf:
            d["make_tight"] = self.make_tight
        if self.params:
            d["params"] = dict(self.params)
        return d

    @classmethod
    def from_json(cls, doc: dict) -> "MotifNode":
        if not isinstance(doc, dict):
            raise TypeError("motif node must be a JSON object")
        return cls(
            type=str(doc.get("type", "")).strip(),
            description=str(doc.get("description", "")),
            elements=tuple(cls.from_json(e) for e in doc.get("elements", []) or []),
            amount=doc.get("amount"),
            make_tight=bool(doc.get("make_tight", False)),
            name=doc.get("name"),
            params=dict(doc.get("params", {}) or {}),
        )


Unit = Union[ObjectSpec, Arrangement]
