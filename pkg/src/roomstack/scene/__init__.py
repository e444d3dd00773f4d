"""Rooms, scenes, the floor region and asset retrieval."""

from roomstack.scene.assets import (
    TOP_K,
    AssetQuery,
    AssetRecord,
    Embedder,
    HashEmbedder,
    HttpEmbedder,
    Manifest,
    cosine,
    dimension_mismatch,
    rank_by_similarity,
    retrieve_asset,
)
from roomstack.scene.model import (
    FLOOR,
    SCENE_VERSION,
    MotifRecord,
    Parent,
    RegionRecord,
    Scene,
    SceneObject,
    audit_scene,
    occupancy_ratio,
    parse_scene,
    serialize_scene,
)
from roomstack.scene.room import DOOR_LEAF, DOOR_WIDTH, ROOM_HEIGHT, Door, Room, door_obstacles, floor_support_region

T_OCC = 0.3

__all__ = [
    "DOOR_LEAF",
    "DOOR_WIDTH",
    "FLOOR",
    "ROOM_HEIGHT",
    "SCENE_VERSION",
    "TOP_K",
    "T_OCC",
    "AssetQuery",
    "AssetRecord",
    "Door",
    "Embedder",
    "HashEmbedder",
    "HttpEmbedder",
    "Manifest",
    "MotifRecord",
    "Parent",
    "RegionRecord",
    "Room",
    "Scene",
    "SceneObject",
    "audit_scene",
    "cosine",
    "dimension_mismatch",
    "door_obstacles",
    "floor_support_region",
    "occupancy_ratio",
    "parse_scene",
    "rank_by_similarity",
    "retrieve_asset",
    "serialize_scene",
]
