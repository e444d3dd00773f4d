"""Exception hierarchy shared across the package."""

from __future__ import annotations


class RoomstackError(Exception):
    """Base class for all errors raised by roomstack."""


class DegenerateGeometryError(RoomstackError):
    """Input points or faces do not span enough dimensions."""


class InvalidPolygonError(RoomstackError):
    """Polygon is self-intersecting, has too few vertices or zero area."""


class OutsideRegionError(RoomstackError):
    """A point that must lie in a region lies strictly outside it."""


class MeshFormatError(RoomstackError):
    """Malformed mesh file or out-of-range face indices."""


class MotifError(RoomstackError):
    """A motif program was called with inputs it cannot arrange."""


class HierarchyError(RoomstackError):
    """A motif hierarchy failed validation or instantiation.

    ``path`` names the failing node, e.g. ``root/elements[0]``.
    """

    def __init__(self, message: str, path: str = "root", violations: list[str] | None = None):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.violations = list(violations or [])


class CategoryMissError(RoomstackError):
    """No asset in the manifest carries the requested category."""

    def __init__(self, category: str, nearest: list[str]):
        hint = f" (nearest: {', '.join(nearest)})" if nearest else ""
        super().__init__(f"no asset with category {category!r}{hint}")
        self.category = category
        self.nearest = nearest


class SceneFormatError(RoomstackError):
    """scene.json version mismatch or schema violation."""


class PlanError(RoomstackError):
    """A plan document failed to parse or validate.

    ``violations`` holds one human-readable line per problem.
    """

    def __init__(self, message: str, violations: list[str] | None = None):
        super().__init__(message)
        self.violations = list(violations or [message])


class StageError(RoomstackError):
    """A pipeline stage failed; carries enough context to debug the run."""

    def __init__(self, stage: str, message: str, arrangement: str | None = None, partial_scene=None):
        where = f" [{arrangement}]" if arrangement else ""
        super().__init__(f"stage {stage}{where}: {message}")
        self.stage = stage
        self.arrangement = arrangement
        self.partial_scene = partial_scene
