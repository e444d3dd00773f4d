"""Motif programs and scene-motif hierarchies."""

from roomstack.motifs.hierarchy import instantiate_scene_motif, validate_hierarchy
from roomstack.motifs.library import (
    allocate_sides,
    default_gap,
    execute_motif,
    grid_shape,
    pyramid_layers,
    tight_params,
)
from roomstack.motifs.model import (
    ARITY,
    OBJECT_TYPE,
    SINGLE_OBJECT,
    THREE_OBJECT,
    TWO_OBJECT,
    Arrangement,
    MotifNode,
    MotifType,
    ObjectSpec,
    PlacedObject,
    parse_motif_type,
)

__all__ = [
    "ARITY",
    "OBJECT_TYPE",
    "SINGLE_OBJECT",
    "THREE_OBJECT",
    "TWO_OBJECT",
    "Arrangement",
    "MotifNode",
    "MotifType",
    "ObjectSpec",
    "PlacedObject",
    "allocate_sides",
    "default_gap",
    "execute_motif",
    "grid_shape",
    "instantiate_scene_motif",
    "parse_motif_type",
    "pyramid_layers",
    "tight_params",
    "validate_hierarchy",
]
