"""Command-line entry point: ``roomstack <command> ...``.

Exit codes: 0 ok, 1 other error, 2 validation failure, 3 solver infeasible.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from roomstack.errors import HierarchyError, InvalidPolygonError, PlanError, RoomstackError, SceneFormatError, StageError
from roomstack.eval import dataset_eval, load_dataset
from roomstack.geom.mesh import load_obj
from roomstack.support import SupportConfig, extract_support_regions, regions_to_json, top_surface_baseline

log = logging.getLogger("roomstack")

EXIT_OK, EXIT_ERROR, EXIT_INVALID, EXIT_INFEASIBLE = 0, 1, 2, 3
INFEASIBLE_STAGES = ("floor-layout", "small-objects")


def _write(path: Optional[str], text: str) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PlanError(f"{path}: not valid JSON: {exc}") from exc


def cmd_extract_regions(args) -> int:
    cfg = SupportConfig.from_dict(_load_json(args.config)) if args.config else SupportConfig()
    mesh = load_obj(args.mesh)
    regions = (top_surface_baseline if args.baseline else extract_support_regions)(mesh, cfg)
    _write(args.out, _dump(regions_to_json(regions)))
    log.info("%d support region(s)", len(regions))
    return EXIT_OK


def cmd_solve_layout(args) -> int:
    from roomstack.solver import PlacementRequest, SolveDomain, solve_layout, verify_layout
    from roomstack.solver.plot import write_layout_svg

    dom = SolveDomain.from_dict(_load_json(args.domain))
    doc = _load_json(args.requests)
    items = doc["requests"] if isinstance(doc, dict) else doc
    reqs = [PlacementRequest.from_dict(r) for r in items]
    layout = solve_layout(reqs, dom, time_limit=args.time_limit)
    _write(args.out, _dump(layout.to_dict(include_elapsed=False)))
    if args.plot:
        write_layout_svg(args.plot, layout, reqs, dom)
    if not layout.feasible:
        log.error("infeasible: could not place %s", ", ".join(layout.unplaced))
        return EXIT_INFEASIBLE
    problems = verify_layout(layout, reqs, dom)
    for p in problems:
        log.error("verification: %s", p)
    return EXIT_ERROR if problems else EXIT_OK


def cmd_eval_regions(args) -> int:
    extractor = top_surface_baseline if args.baseline else extract_support_regions
    report = dataset_eval(load_dataset(args.dataset), extractor)
    if args.csv:
        report.write_csv(args.csv)
    for row in report.rows:
        if row.error:
            log.warning("%s: %s", row.name, row.error)
    sys.stdout.write(_dump(report.summary()))
    return EXIT_OK


def _planner(spec: Optional[str]):
    from roomstack.pipeline import FilePlanner, HttpPlanner

    if spec is None:
        return None
    if spec.startswith(("http://", "https://")):
        return HttpPlanner(spec)
    if Path(spec).is_dir():
        return FilePlanner(spec)
    raise PlanError(f"--planner must be an http(s) URL or a directory, got {spec!r}")


def cmd_generate(args) -> int:
    from roomstack.pipeline import load_plan_dir, plans_from_planner, run_generate
    from roomstack.scene import Manifest, serialize_scene
    from roomstack.scene.plot import write_scene_svg

    planner = _planner(args.planner)
    if args.plans:
        plans = load_plan_dir(args.plans)
    elif planner is not None and args.prompt:
        plans = plans_from_planner(planner, args.prompt)
    else:
        raise PlanError("generate needs --plans, or --planner together with --prompt")
    manifest = Manifest.load(args.assets)
    try:
        scene = run_generate(
            plans, manifest, seed=args.seed, t_occ=args.t_occ, planner=planner, time_limit=args.time_limit, workers=args.workers
        )
    except StageError as exc:
        if exc.partial_scene is not None:
            partial = Path(args.out or "scene.json").with_suffix(".partial.json")
            partial.write_text(serialize_scene(exc.partial_scene))
            log.error("partial scene written to %s", partial)
        raise
    _write(args.out, serialize_scene(scene))
    if args.plot:
        write_scene_svg(args.plot, scene)
    for note in scene.notes:
        log.info("%s", note)
    return EXIT_OK


def cmd_validate_plans(args) -> int:
    from roomstack.pipeline import load_plan_dir, validate_plans

    violations = validate_plans(load_plan_dir(args.plans))
    for v in violations:
        sys.stdout.write(f"{v}\n")
    if violations:
        return EXIT_INVALID
    sys.stdout.write("ok\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="roomstack", description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract-regions", parents=[common], help="support regions of an OBJ mesh")
    p.add_argument("mesh")
    p.add_argument("--config", help="JSON object of extraction thresholds")
    p.add_argument("--out", help="regions.json (default stdout)")
    p.add_argument("--baseline", action="store_true", help="report only the top surface")
    p.set_defaults(func=cmd_extract_regions)

    p = sub.add_parser("solve-layout", parents=[common], help="place footprints in a region")
    p.add_argument("domain", help="domain.json: boundary, obstacles, grid_step")
    p.add_argument("requests", help="requests.json: list of placement requests")
    p.add_argument("--time-limit", type=float, default=10.0)
    p.add_argument("--out", help="layout.json (default stdout)")
    p.add_argument("--plot", help="write a top-down SVG")
    p.set_defaults(func=cmd_solve_layout)

    p = sub.add_parser("eval-regions", parents=[common], help="score extraction against annotations")
    p.add_argument("dataset", help="directory of per-object annotation JSON files")
    p.add_argument("--baseline", action="store_true", help="score the top-surface baseline instead")
    p.add_argument("--csv", help="per-object CSV output")
    p.set_defaults(func=cmd_eval_regions)

    p = sub.add_parser("generate", parents=[common], help="build a scene from plan documents")
    p.add_argument("--plans", help="directory with requirement/grouping/placement/hierarchy-*.json")
    p.add_argument("--assets", required=True, help="asset manifest.json")
    p.add_argument("--planner", help="planner service URL, or a directory of plan responses")
    p.add_argument("--prompt", help="scene brief for the planner when --plans is not given")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--t-occ", type=float, default=0.3)
    p.add_argument("--time-limit", type=float, default=10.0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="scene.json (default stdout)")
    p.add_argument("--plot", help="write a top-down SVG")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("validate-plans", parents=[common], help="cross-check a plan directory")
    p.add_argument("plans")
    p.set_defaults(func=cmd_validate_plans)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (PlanError, HierarchyError) as exc:
        for v in getattr(exc, "violations", None) or [str(exc)]:
            sys.stderr.write(f"invalid: {v}\n")
        return EXIT_INVALID
    except StageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_INFEASIBLE if exc.stage in INFEASIBLE_STAGES else EXIT_ERROR
    except (InvalidPolygonError, SceneFormatError, ValueError, KeyError) as exc:
        sys.stderr.write(f"invalid: {exc}\n")
        return EXIT_INVALID
    except (RoomstackError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
