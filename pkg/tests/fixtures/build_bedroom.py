"""Writes the bedroom plan set, asset manifest and meshes under tests/fixtures/bedroom.

Run with ``--freeze`` to also regenerate the golden scene.json (only after
checking the new output by hand).
"""

from __future__ import annotations

import argparse
import json
from pathlib import Path

from roomstack.geom.mesh import save_obj
from roomstack.scene.assets import HashEmbedder
from roomstack.synth import nightstand, solid, table

HERE = Path(__file__).parent / "bedroom"
PLANS = HERE / "plans"
ASSETS = HERE / "assets"

# id, category, (w, h, d), mesh builder, description
CATALOG = [
    ("bed-queen", "bed", (1.6, 0.5, 2.0), lambda: solid(1.6, 0.5, 2.0), "queen bed wooden frame"),
    ("bed-single", "bed", (0.9, 0.45, 1.9), lambda: solid(0.9, 0.45, 1.9), "single bed"),
    ("nightstand-open", "nightstand", (0.5, 0.6, 0.4), lambda: nightstand(0.5, 0.4, 0.6), "open nightstand with shelf"),
    ("wardrobe-tall", "wardrobe", (1.2, 2.0, 0.6), lambda: solid(1.2, 2.0, 0.6), "tall wardrobe two doors"),
    ("wardrobe-low", "wardrobe", (1.0, 1.4, 0.5), lambda: solid(1.0, 1.4, 0.5), "low wardrobe"),
    ("desk-oak", "desk", (1.2, 0.75, 0.6), lambda: table(1.2, 0.6, 0.75), "oak writing desk"),
    ("book-hardcover", "book", (0.2, 0.04, 0.28), lambda: solid(0.2, 0.04, 0.28), "hardcover book"),
    ("lamp-drum", "lamp", (0.25, 0.4, 0.25), lambda: solid(0.25, 0.4, 0.25), "table lamp drum shade"),
    ("dresser-wide", "dresser", (1.0, 0.8, 0.45), lambda: solid(1.0, 0.8, 0.45), "wide dresser"),
]

REQUIREMENT = {
    "version": 1,
    "room_type": "bedroom",
    "room": {"floorplan": [[0, 0], [0, 4], [4, 4], [4, 0]], "door_location": [3.2, 0.0], "room_height": 2.6},
    "objects": [
        {"id": 1, "name": "bed", "description": "queen bed wooden frame", "dimensions": [1.6, 0.5, 2.0], "amount": 1},
        {"id": 2, "name": "nightstand", "description": "open nightstand", "dimensions": [0.5, 0.6, 0.4], "amount": 2},
        {"id": 3, "name": "wardrobe", "description": "tall wardrobe", "dimensions": [1.2, 2.0, 0.6], "amount": 1},
        {"id": 4, "name": "desk", "description": "oak writing desk", "dimensions": [1.2, 0.75, 0.6], "amount": 1},
    ],
    "small_objects": [
        {
            "id": 5,
            "name": "book",
            "description": "hardcover book",
            "dimensions": [0.2, 0.04, 0.28],
            "amount": 3,
            "parent_object": 4,
        },
        {
            "id": 6,
            "name": "lamp",
            "description": "table lamp",
            "dimensions": [0.25, 0.4, 0.25],
            "amount": 1,
            "parent_object": 2,
        },
    ],
}


def _arr(aid, name, desc, members, footprint):
    return {
        "id": aid,
        "area_name": name,
        "composition": {
            "description": desc,
            "furniture": [{"id": i, "amount": n} for i, n in members],
            "total_footprint": footprint,
            "clearance": 0.6,
        },
        "rationale": "",
    }


GROUPING = {
    "version": 1,
    "arrangements": [
        _arr("bed_nightstands", "sleeping area", "a bed with a nightstand on each side", [(1, 1), (2, 2)], [2.6, 0.6, 2.0]),
        _arr("wardrobe", "storage", "a wardrobe", [(3, 1)], [1.2, 2.0, 0.6]),
        _arr("desk", "work area", "a desk", [(4, 1)], [1.2, 0.75, 0.6]),
    ],
    "small_arrangements": [
        _arr("books", "reading", "a stack of three books", [(5, 3)], [0.2, 0.2, 0.28]),
        _arr("lamp", "bedside light", "a lamp", [(6, 1)], [0.25, 0.4, 0.25]),
    ],
}

HIERARCHIES = {
    "bed_nightstands": {
        "type": "bed_nightstand",
        "description": "a bed with a nightstand on each side",
        "make_tight": False,
        "elements": [
            {"type": "object", "description": "bed", "name": "bed", "amount": 1},
            {"type": "object", "description": "nightstand", "name": "nightstand", "amount": 2},
        ],
    },
    "books": {
        "type": "stack",
        "description": "a stack of three books",
        "make_tight": False,
        "elements": [{"type": "object", "description": "book", "name": "book", "amount": 3}],
    },
}

PLACEMENT = {
    "version": 1,
    "positions": [
        {"id": "bed_nightstands", "position": [2.0, 3.0], "rotation": 180, "wall_alignment": True, "wall_alignment_id": 1},
        {"id": "wardrobe", "position": [0.3, 1.4], "rotation": 90, "wall_alignment": True, "wall_alignment_id": 0},
        {"id": "desk", "position": [3.7, 1.6], "rotation": 270, "wall_alignment": True, "wall_alignment_id": 2},
    ],
    "small_positions": [{"id": "books", "parent_object": 4, "position": [0.3, 0.0], "rotation": 15},
        {"id": "lamp", "parent_object": 2, "instance": 1},
    ],
}

AUGMENT = {
    "version": 1,
    "objects": [{"id": 10, "name": "dresser", "description": "wide dresser", "dimensions": [1.0, 0.8, 0.45], "amount": 1}],
    "arrangements": [_arr("dresser", "storage", "a dresser", [(10, 1)], [1.0, 0.8, 0.45])],
    "positions": [{"id": "dresser", "position": [1.5, 0.3], "rotation": 0, "wall_alignment": True, "wall_alignment_id": 3}],
}


def _dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=2) + "\n")


def build() -> None:
    PLANS.mkdir(parents=True, exist_ok=True)
    (ASSETS / "meshes").mkdir(parents=True, exist_ok=True)
    emb = HashEmbedder(32)
    assets = []
    for aid, cat, dims, make, desc in CATALOG:
        mesh_rel = f"meshes/{aid}.obj"
        save_obj(make(), ASSETS / mesh_rel)
        assets.append(
            {"id": aid, "category": cat, "dimensions": list(dims), "mesh": mesh_rel, "embedding": emb.embed(f"{cat} {desc}").tolist()}
        )
    _dump(ASSETS / "manifest.json", {"version": 1, "assets": assets})
    _dump(PLANS / "requirement.json", REQUIREMENT)
    _dump(PLANS / "grouping.json", GROUPING)
    _dump(PLANS / "placement.json", PLACEMENT)
    for aid, tree in HIERARCHIES.items():
        _dump(PLANS / f"hierarchy-{aid}.json", tree)
    (HERE / "augment").mkdir(exist_ok=True)
    _dump(HERE / "augment" / "augment.json", AUGMENT)


def freeze() -> None:
    from roomstack.pipeline import load_plan_dir, run_generate
    from roomstack.scene import Manifest, serialize_scene

    scene = run_generate(load_plan_dir(PLANS), Manifest.load(ASSETS / "manifest.json"), seed=7)
    (HERE / "scene.json").write_text(serialize_scene(scene))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--freeze", action="store_true")
    args = ap.parse_args()
    build()
    if args.freeze:
        freeze()
