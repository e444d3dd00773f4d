"""Object poses: bottom-centre anchor plus yaw about +y."""

from __future__ import annotations

import math
from dataclasses import dataclass


def normalize_yaw(yaw_deg: float) -> float:
    y = math.fmod(float(yaw_deg), 360.0)
    if y < 0:
        y += 360.0
    # fmod of tiny negatives can round up to exactly 360
    return 0.0 if y >= 360.0 else y


def facing_vector(yaw_deg: float) -> tuple[float, float]:
    """(x, z) direction an object faces; yaw 0 faces +z."""
    r = math.radians(yaw_deg)
    return (math.sin(r), math.cos(r))


def yaw_towards(dx: float, dz: float) -> float:
    """Yaw whose facing vector points along (dx, dz)."""
    return normalize_yaw(math.degrees(math.atan2(dx, dz)))


def rotate_xz(x: float, z: float, yaw_deg: float) -> tuple[float, float]:
    """Rotate a point about the origin by a right-handed turn about +y."""
    c, s = math.cos(math.radians(yaw_deg)), math.sin(math.radians(yaw_deg))
    return (c * x + s * z, -s * x + c * z)


@dataclass(frozen=True)
class Pose:
    position: tuple[float, float, float]
    yaw: float = 0.0

    def __post_init__(self) -> None:
        x, y, z = (float(c) for c in self.position)
        if not all(math.isfinite(c) for c in (x, y, z, self.yaw)):
            raise ValueError("pose components must be finite")
        object.__setattr__(self, "position", (x, y, z))
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))

    @property
    def x(self) -> float:
        return self.position[0]

    @property
    def y(self) -> float:
        return self.position[1]

    @property
    def z(self) -> float:
        return self.position[2]

    def facing(self) -> tuple[float, float]:
        return facing_vector(self.yaw)

    def to_dict(self) -> dict:
        return {"position": list(self.position), "yaw": self.yaw}

    @classmethod
    def from_dict(cls, d: dict) -> "Pose":
        return cls(tuple(d["position"]), d.get("yaw", 0.0))
