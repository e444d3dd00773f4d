"""Plan documents, planner clients and end-to-end scene generation."""

from roomstack.pipeline.generate import AUGMENT_TAG, T_OCC, GenerateConfig, plans_from_planner, run_generate
from roomstack.pipeline.planner import RETRIES, FilePlanner, HttpPlanner, PlannerClient, request_plan
from roomstack.pipeline.plans import (
    PLAN_VERSION,
    AugmentPlan,
    GroupingPlan,
    HierarchyPlan,
    PlacementPlan,
    PlanSet,
    RequirementPlan,
    load_plan_dir,
    parse_plan,
    validate_plans,
)

__all__ = [
    "AUGMENT_TAG",
    "PLAN_VERSION",
    "RETRIES",
    "T_OCC",
    "AugmentPlan",
    "FilePlanner",
    "GenerateConfig",
    "GroupingPlan",
    "HierarchyPlan",
    "HttpPlanner",
    "PlacementPlan",
    "PlanSet",
    "PlannerClient",
    "RequirementPlan",
    "load_plan_dir",
    "parse_plan",
    "plans_from_planner",
    "request_plan",
    "run_generate",
    "validate_plans",
]
