"""Geometry primitives: meshes, oriented boxes, planar classification, polygons, poses."""

from roomstack.geom.mesh import TriMesh, concatenate, format_obj, load_obj, parse_obj, save_obj, weld
from roomstack.geom.obb import (
    Obb,
    PlaneClass,
    classify_plane,
    fit_obb,
    fit_unconstrained_obb,
    fit_upright_obb,
    min_area_rect,
)
from roomstack.geom.polygon import (
    Polygon2,
    disc_polygon,
    distance_to_boundary,
    polygon_intersection_area,
    polygons_from_shape,
    rect_corners,
    rect_polygon,
    segment_distance,
    union_area,
)
from roomstack.geom.pose import Pose, facing_vector, normalize_yaw, rotate_xz, yaw_towards

__all__ = [
    "Obb",
    "PlaneClass",
    "Polygon2",
    "Pose",
    "TriMesh",
    "classify_plane",
    "concatenate",
    "disc_polygon",
    "distance_to_boundary",
    "facing_vector",
    "fit_obb",
    "fit_unconstrained_obb",
    "fit_upright_obb",
    "format_obj",
    "load_obj",
    "min_area_rect",
    "normalize_yaw",
    "parse_obj",
    "polygon_intersection_area",
    "polygons_from_shape",
    "rect_corners",
    "rect_polygon",
    "rotate_xz",
    "save_obj",
    "segment_distance",
    "union_area",
    "weld",
    "yaw_towards",
]
