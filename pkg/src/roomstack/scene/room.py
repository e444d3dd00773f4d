"""Rooms, doors and the floor support region."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from roomstack.errors import InvalidPolygonError
from roomstack.geom.polygon import Polygon2, segment_distance
from roomstack.solver.core import Wall, clockwise_walls
from roomstack.support import SupportRegion

ROOM_HEIGHT = 2.5
DOOR_WIDTH = 0.8
DOOR_LEAF = 0.04  # leaf thickness of the open door (m)
SWING_SEGMENTS = 16
ON_WALL_TOL = 1e-6


@dataclass(frozen=True)
class Door:
    """A door centred at ``position`` on a wall, hinged at the wall-start side, swinging inward."""

    position: tuple[float, float]
    width: float = DOOR_WIDTH

    def __post_init__(self) -> None:
        x, z = (float(c) for c in self.position)
        if not self.width > 0:
            raise ValueError("door width must be positive")
        object.__setattr__(self, "position", (x, z))


@dataclass(frozen=True)
class Room:
    boundary: Polygon2
    height: float = ROOM_HEIGHT
    door: Optional[Door] = None

    def __post_init__(self) -> None:
        if self.boundary.vertices[0] != (0.0, 0.0):
            raise InvalidPolygonError(f"room boundary must start at (0,0), got {self.boundary.vertices[0]}")
        if not self.boundary.is_clockwise:
            raise InvalidPolygonError("room boundary vertices must be in clockwise order")
        if not self.height > 0:
            raise ValueError("room height must be positive")
        if self.door is not None:
            self.door_wall()  # validates placement

    @property
    def walls(self) -> tuple[Wall, ...]:
        return clockwise_walls(self.boundary)

    def door_wall(self) -> Wall:
        if self.door is None:
            raise ValueError("room has no door")
        for wall in self.walls:
            if segment_distance(self.door.position, wall.start, wall.end) <= ON_WALL_TOL:
                return wall
        raise InvalidPolygonError(f"door {self.door.position} does not lie on a wall")

    def to_dict(self) -> dict:
        d = {"floorplan": self.boundary.to_list(), "room_height": self.height}
        if self.door is not None:
            d["door_location"] = list(self.door.position)
            d["door_width"] = self.door.width
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Room":
        door = None
        if d.get("door_location") is not None:
            door = Door(tuple(d["door_location"]), float(d.get("door_width", DOOR_WIDTH)))
        return cls(Polygon2.from_list(d["floorplan"]), float(d.get("room_height", ROOM_HEIGHT)), door)

    @classmethod
    def rectangle(cls, width: float, depth: float, height: float = ROOM_HEIGHT, door: Optional[Door] = None) -> "Room":
        return cls(Polygon2(((0.0, 0.0), (0.0, depth), (width, depth), (width, 0.0))), height, door)


def door_obstacles(room: Room, leaf: float = DOOR_LEAF, segments: int = SWING_SEGMENTS) -> list[Polygon2]:
    """Open door leaf plus its quarter-circle swing sector, both inside the room.

    The hinge sits at the end of the door nearer the wall start. The leaf is
    the open door standing along the inward normal, just outside the sector.
    """
    if room.door is None:
        return []
    wall = room.door_wall()
    w = room.door.width
    (ux, uz), (nx, nz) = wall.direction, wall.inward_normal
    px, pz = room.door.position
    hx, hz = px - ux * w / 2, pz - uz * w / 2
    angles = np.linspace(0.0, math.pi / 2, segments + 1)
    arc = [(hx + w * (math.cos(a) * ux + math.sin(a) * nx), hz + w * (math.cos(a) * uz + math.sin(a) * nz)) for a in angles]
    sector = Polygon2(tuple([(hx, hz)] + arc))
    leaf_poly = Polygon2(
        (
            (hx, hz),
            (hx + nx * w, hz + nz * w),
            (hx + nx * w - ux * leaf, hz + nz * w - uz * leaf),
            (hx - ux * leaf, hz - uz * leaf),
        )
    )
    return [leaf_poly, sector]


def floor_support_region(room: Room) -> tuple[SupportRegion, list[Polygon2]]:
    region = SupportRegion(
        id="floor",
        footprint=room.boundary,
        surface_height=0.0,
        clearance=room.height,
        is_top=False,
    )
    return region, door_obstacles(room)
