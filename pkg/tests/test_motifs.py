import math
import random

import pytest

from motif_checks import check_arrangement, group, random_case, relative_poses, run_case, yaw_error
from roomstack.errors import HierarchyError, MotifError
from roomstack.motifs import (
    ARITY,
    MotifNode,
    MotifType,
    ObjectSpec,
    allocate_sides,
    execute_motif,
    grid_shape,
    instantiate_scene_motif,
    parse_motif_type,
    pyramid_layers,
    validate_hierarchy,
)

BOOK = ObjectSpec("book", (0.2, 0.05, 0.15))


def leaf(name, amount=1, description=""):
    return MotifNode("object", description or name, amount=amount, name=name)


def node(kind, *elements, **kw):
    return MotifNode(kind, kw.pop("description", kind), tuple(elements), **kw)


# catalog


def test_twelve_motifs_with_arity_classes():
    assert len(MotifType) == 12
    assert {k.value for k, a in ARITY.items() if a == 1} == {"stack", "pile", "row", "grid", "pyramid"}
    assert {k.value for k, a in ARITY.items() if a == 3} == {"on_each_side"}
    assert parse_motif_type("in_front") is MotifType.IN_FRONT_OF
    with pytest.raises(ValueError):
        parse_motif_type("corner")


def test_object_spec_validation():
    with pytest.raises(ValueError):
        ObjectSpec("x", (0.1, 0, 0.1))
    with pytest.raises(ValueError):
        ObjectSpec("x", (0.1, 0.1, 0.1), amount=0)


# execute_motif examples


def test_stack_of_three_books():
    arr = execute_motif("stack", [BOOK.with_amount(3)], {"gap": 0})
    assert [o.pose.y for o in arr.objects] == pytest.approx([0.0, 0.05, 0.10], abs=1e-12)
    assert {(o.pose.x, o.pose.z) for o in arr.objects} == {(0.0, 0.0)}


def test_surround_round_table_four_chairs():
    table = ObjectSpec("table", (1.2, 0.75, 1.2))
    chair = ObjectSpec("chair", (0.45, 0.9, 0.5), amount=4)
    arr = execute_motif("surround", [table, chair], {"gap": 0.05})
    chairs = group(arr, chair)
    assert len(chairs) == 4
    angles = sorted(math.degrees(math.atan2(c.pose.x, c.pose.z)) % 360 for c in chairs)
    assert angles == pytest.approx([0, 90, 180, 270], abs=1e-9)
    for c in chairs:
        assert math.hypot(c.pose.x, c.pose.z) == pytest.approx(0.9, abs=1e-12)
        assert yaw_error(c, (0.0, 0.0)) < 1e-9


def test_on_each_side_plate_fork_knife():
    plate = ObjectSpec("plate", (0.26, 0.02, 0.26))
    fork = ObjectSpec("fork", (0.03, 0.01, 0.19))
    knife = ObjectSpec("knife", (0.02, 0.01, 0.22))
    arr = execute_motif("on_each_side", [plate, fork, knife], {"gap": 0.03})
    [f] = group(arr, fork)
    [k] = group(arr, knife)
    assert f.pose.x == pytest.approx(-(0.13 + 0.03 + 0.015))
    assert k.pose.x == pytest.approx(0.13 + 0.03 + 0.01)
    assert f.pose.z == k.pose.z == 0.0


def test_pyramid_six_is_three_two_one():
    assert pyramid_layers(6) == [3, 2, 1]
    arr = execute_motif("pyramid", [ObjectSpec("can", (0.07, 0.12, 0.07), amount=6)])
    ys = sorted(o.pose.y for o in arr.objects)
    assert ys == pytest.approx([0, 0, 0, 0.12, 0.12, 0.24])


@pytest.mark.parametrize("n,want", [(1, [1]), (2, [2]), (3, [2, 1]), (7, [4, 2, 1]), (10, [4, 3, 2, 1])])
def test_pyramid_schedule(n, want):
    assert pyramid_layers(n) == want


def test_pyramid_explicit_layers_must_decrease():
    can = ObjectSpec("can", (0.07, 0.12, 0.07), amount=6)
    with pytest.raises(MotifError):
        execute_motif("pyramid", [can], {"layers": [2, 2, 2]})
    with pytest.raises(MotifError):
        execute_motif("pyramid", [can], {"layers": [4, 1]})
    arr = execute_motif("pyramid", [can], {"layers": [4, 2]})
    assert len(arr.objects) == 6


def test_grid_shape():
    assert grid_shape(6) == (2, 3)
    assert grid_shape(7) == (1, 7)
    assert grid_shape(6, rows=3) == (3, 2)
    with pytest.raises(MotifError):
        grid_shape(7, rows=2)
    with pytest.raises(MotifError):
        grid_shape(6, 2, 2)


def test_default_gaps():
    row = execute_motif("row", [ObjectSpec("cup", (0.1, 0.1, 0.1), amount=3)])
    assert row.objects[1].pose.x - row.objects[0].pose.x == pytest.approx(0.11)
    small = execute_motif("left_of", [ObjectSpec("a", (0.3, 0.1, 0.3)), ObjectSpec("b", (0.1, 0.1, 0.1))])
    big = execute_motif("left_of", [ObjectSpec("a", (1.3, 0.1, 0.3)), ObjectSpec("b", (0.1, 0.1, 0.1))])
    assert small.objects[0].aabb()[0][0] - small.objects[1].aabb()[1][0] == pytest.approx(0.03)
    assert big.objects[0].aabb()[0][0] - big.objects[1].aabb()[1][0] == pytest.approx(0.1)


def test_in_front_of_faces_primary_at_larger_z():
    desk = ObjectSpec("desk", (1.2, 0.75, 0.6))
    chair = ObjectSpec("chair", (0.5, 0.9, 0.5))
    arr = execute_motif("in_front_of", [desk, chair], {"gap": 0.1})
    [c] = group(arr, chair)
    assert c.aabb()[0][2] == pytest.approx(0.3 + 0.1)
    assert c.pose.yaw == pytest.approx(180.0)
    away = execute_motif("in_front_of", [desk, chair], {"face_primary": False})
    assert group(away, chair)[0].pose.yaw == 0.0


def test_bed_nightstand_backs_flush_with_headboard():
    bed = ObjectSpec("bed", (1.6, 0.5, 2.1))
    stand = ObjectSpec("stand", (0.5, 0.6, 0.4), amount=2)
    arr = execute_motif("bed_nightstand", [bed, stand])
    assert check_arrangement(MotifType.BED_NIGHTSTAND, [bed, stand], {}, arr) == []
    with pytest.raises(MotifError):
        execute_motif("bed_nightstand", [bed, stand.with_amount(3)])


def test_rectangular_perimeter_allocation():
    assert allocate_sides(6, 2.0, 1.0, 0.5) == [2, 2, 1, 1]
    assert sum(allocate_sides(1, 2.0, 1.0, 0.5)) == 1
    table = ObjectSpec("table", (2.0, 0.75, 1.0))
    chair = ObjectSpec("chair", (0.45, 0.9, 0.45), amount=6)
    arr = execute_motif("rectangular_perimeter", [table, chair])
    assert check_arrangement(MotifType.RECTANGULAR_PERIMETER, [table, chair], {}, arr) == []


def test_too_many_chairs_is_an_error():
    with pytest.raises(MotifError):
        execute_motif("surround", [ObjectSpec("t", (0.6, 0.7, 0.6)), ObjectSpec("c", (0.5, 0.9, 0.5), amount=12)])


def test_execute_errors():
    with pytest.raises(MotifError):
        execute_motif("stack", [BOOK, BOOK])
    with pytest.raises(MotifError):
        execute_motif("row", [BOOK], {"spin": 1})
    with pytest.raises(MotifError):
        execute_motif("pile", [BOOK.with_amount(3)], {"offset": 0.9})
    arr = execute_motif("row", [BOOK.with_amount(2)])
    with pytest.raises(MotifError):
        execute_motif("stack", [arr], {"count": 0})


def test_pile_determinism_and_bounds():
    pile = BOOK.with_amount(5)
    a = execute_motif("pile", [pile], seed=3)
    b = execute_motif("pile", [pile], seed=3)
    c = execute_motif("pile", [pile], seed=4)
    assert a == b
    assert [o.pose for o in a.objects] != [o.pose for o in c.objects]
    for arr in (a, c):
        assert check_arrangement(MotifType.PILE, [pile], {}, arr) == []


def test_arrangement_input_is_rigid_unit():
    stack = execute_motif("stack", [BOOK.with_amount(2)])
    arr = execute_motif("row", [stack], {"count": 3})
    assert len(arr.objects) == 6
    assert len({round(o.pose.x, 9) for o in arr.objects}) == 3


@pytest.mark.parametrize("kind", list(MotifType), ids=lambda k: k.value)
def test_random_parameterizations(kind):
    rng = random.Random(f"unit:{kind.value}")
    bad = [m for i in range(40) for m in run_case(kind, rng, seed=i)]
    assert bad == []


@pytest.mark.parametrize("kind", list(MotifType), ids=lambda k: k.value)
def test_execution_is_deterministic(kind):
    inputs, params = random_case(kind, random.Random(11))
    assert execute_motif(kind, inputs, params, seed=5) == execute_motif(kind, inputs, params, seed=5)


# hierarchy validation


def test_in_front_of_with_three_children_is_arity_violation():
    tree = node("in_front_of", leaf("sofa"), leaf("coffee table"), leaf("tv stand"))
    [v] = validate_hierarchy(tree)
    assert "arity" in v and v.startswith("root")


def test_stack_of_five_is_ok():
    assert validate_hierarchy(node("stack", leaf("book", 5))) == []


def test_duplicate_object_in_sibling_subtrees():
    tree = node("left_of", node("stack", leaf("book", 2)), node("row", leaf("book", 3)))
    violations = validate_hierarchy(tree)
    assert any("already appears" in v for v in violations)


def test_all_violations_reported():
    tree = node("teleport", leaf("a", 0), MotifNode("stack", "empty"))
    violations = validate_hierarchy(tree)
    assert len(violations) >= 3
    assert any("unknown motif" in v for v in violations)
    assert any("amount" in v for v in violations)
    assert any("no elements" in v for v in violations)


def test_motif_node_json_roundtrip():
    doc = {
        "type": "in_front_of",
        "description": "setting with cup",
        "make_tight": False,
        "elements": [
            {
                "type": "on_each_side",
                "description": "setting",
                "make_tight": False,
                "elements": [
                    {"type": "object", "description": "plate", "amount": 1},
                    {"type": "object", "description": "fork", "amount": 1},
                    {"type": "object", "description": "knife", "amount": 1},
                ],
            },
            {"type": "object", "description": "cup", "amount": 1},
        ],
    }
    assert MotifNode.from_json(doc).to_json() == doc


# instantiation

TABLEWARE = {
    "plate": ObjectSpec("plate", (0.26, 0.02, 0.26)),
    "fork": ObjectSpec("fork", (0.03, 0.01, 0.19)),
    "knife": ObjectSpec("knife", (0.02, 0.01, 0.22)),
    "cup": ObjectSpec("cup", (0.08, 0.1, 0.08)),
    "vase": ObjectSpec("vase", (0.15, 0.3, 0.15)),
    "book": BOOK,
}


def test_single_leaf_is_one_object_at_origin():
    arr = instantiate_scene_motif(leaf("vase"), TABLEWARE)
    [o] = arr.objects
    assert (o.pose.x, o.pose.y, o.pose.z, o.pose.yaw) == (0, 0, 0, 0)


def test_nested_setting_and_cup_is_rigid():
    setting = node("on_each_side", leaf("plate"), leaf("fork"), leaf("knife"))
    tree = node("in_front_of", setting, leaf("cup"))
    inner = instantiate_scene_motif(setting, TABLEWARE)
    outer = instantiate_scene_motif(tree, TABLEWARE)
    assert len(outer.objects) == 4
    cup = [o for o in outer.objects if o.spec.name == "cup"][0]
    rest = [o for o in outer.objects if o.spec.name != "cup"]
    assert cup.pose.z > max(o.aabb()[1][2] for o in rest)
    before, after = relative_poses(inner.objects), relative_poses(rest)
    assert before.keys() == after.keys()
    for k in before:
        assert after[k] == pytest.approx(before[k], abs=1e-9)
    lo, _ = outer.bounds
    assert lo[1] == pytest.approx(0.0, abs=1e-12)


def test_make_tight_removes_gaps():
    tree = MotifNode("row", "books", (leaf("book", 3),), make_tight=True, params={"gap": 0.2})
    arr = instantiate_scene_motif(tree, TABLEWARE)
    xs = sorted(o.pose.x for o in arr.objects)
    assert xs[1] - xs[0] == pytest.approx(BOOK.width)


def test_duplicates_rejected_before_execution():
    tree = node("left_of", leaf("vase"), leaf("vase"))
    with pytest.raises(HierarchyError) as err:
        instantiate_scene_motif(tree, {})
    assert err.value.violations


def test_errors_carry_node_path():
    tree = node("left_of", leaf("vase"), node("stack", leaf("ghost", 2)))
    with pytest.raises(HierarchyError) as err:
        instantiate_scene_motif(tree, TABLEWARE)
    assert err.value.path == "root.elements[1].elements[0]"


def test_instantiation_is_seed_deterministic():
    tree = node("left_of", leaf("vase"), node("pile", leaf("book", 4)))
    assert instantiate_scene_motif(tree, TABLEWARE, seed=1) == instantiate_scene_motif(tree, TABLEWARE, seed=1)
    assert instantiate_scene_motif(tree, TABLEWARE, seed=1) != instantiate_scene_motif(tree, TABLEWARE, seed=2)
