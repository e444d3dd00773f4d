"""Layout search inside a support region."""

from roomstack.solver.core import (
    ALPHA,
    BEAM,
    FLOOR_STEP,
    FURNITURE_STEP,
    NODES_PER_SECOND,
    TIME_LIMIT,
    CandidateSet,
    Layout,
    Placement,
    PlacementRequest,
    SolveDomain,
    Wall,
    candidate_positions,
    clockwise_walls,
    footprint_corners,
    sat_overlap,
    score_placement,
    solve_layout,
    static_candidates,
    verify_layout,
)

__all__ = [
    "ALPHA",
    "BEAM",
    "FLOOR_STEP",
    "FURNITURE_STEP",
    "NODES_PER_SECOND",
    "TIME_LIMIT",
    "CandidateSet",
    "Layout",
    "Placement",
    "PlacementRequest",
    "SolveDomain",
    "Wall",
    "candidate_positions",
    "clockwise_walls",
    "footprint_corners",
    "sat_overlap",
    "score_placement",
    "solve_layout",
    "static_candidates",
    "verify_layout",
]
