"""Validation and bottom-up instantiation of scene-motif hierarchies."""

from __future__ import annotations

from typing import Mapping

from roomstack.errors import HierarchyError, MotifError
from roomstack.motifs.library import execute_motif, expand, tight_params
from roomstack.motifs.model import OBJECT_TYPE, Arrangement, MotifNode, MotifType, ObjectSpec, Unit, parse_motif_type


def _child_path(path: str, i: int) -> str:
    return f"{path}.elements[{i}]"


def validate_hierarchy(root: MotifNode) -> list[str]:
    """Every structural problem in the tree, one line each; empty means valid."""
    violations: list[str] = []
    seen: dict[str, str] = {}

    def visit(node: MotifNode, path: str) -> None:
        if node.type == OBJECT_TYPE:
            if node.elements:
                violations.append(f"{path}: object node must not have elements")
            amount = node.amount
            if not isinstance(amount, int) or isinstance(amount, bool) or amount < 1:
                violations.append(f"{path}: object amount must be a positive integer, got {amount!r}")
            key = node.key
            if not key:
                violations.append(f"{path}: object node needs a name or description")
            elif key in seen:
                violations.append(f"{path}: object {key!r} already appears at {seen[key]}")
            else:
                seen[key] = path
            return
        try:
            kind = parse_motif_type(node.type)
        except ValueError:
            violations.append(f"{path}: unknown motif type {node.type!r}")
            kind = None
        if node.amount is not None:
            violations.append(f"{path}: amount belongs on object nodes, not on motif {node.type!r}")
        if not node.elements:
            violations.append(f"{path}: motif {node.type!r} has no elements")
        elif kind is not None and len(node.elements) != kind.arity:
            violations.append(
                f"{path}: arity violation: {kind.value} takes {kind.arity} object type(s), got {len(node.elements)}"
            )
        for i, child in enumerate(node.elements):
            visit(child, _child_path(path, i))

    visit(root, "root")
    return violations


def _resolve(node: MotifNode, assets: Mapping[str, ObjectSpec], path: str) -> ObjectSpec:
    spec = assets.get(node.key)
    if spec is None and node.name and node.description:
        spec = assets.get(node.description.strip())
    if spec is None:
        raise HierarchyError(f"no asset for object {node.key!r}", path)
    return spec.with_amount(node.amount)


def instantiate_scene_motif(root: MotifNode, assets: Mapping[str, ObjectSpec], seed: int | str = 0) -> Arrangement:
    """Build the arrangement bottom-up, innermost motifs first.

    Children reach their parent as rigid units. With ``make_tight`` on the
    root, every gap in the tree is zeroed. The result is anchored with the
    bottom centre of its bounds at the origin.
    """
    violations = validate_hierarchy(root)
    if violations:
        raise HierarchyError(f"{len(violations)} hierarchy violation(s)", "root", violations)
    tight = root.make_tight

    def build(node: MotifNode, path: str) -> Unit:
        if node.is_leaf:
            return _resolve(node, assets, path)
        inputs = [build(child, _child_path(path, i)) for i, child in enumerate(node.elements)]
        params = tight_params(node.params) if tight else dict(node.params)
        try:
            arr = execute_motif(node.type, inputs, params, seed=f"{seed}:{path}")
        except MotifError as exc:
            raise HierarchyError(str(exc), path) from exc
        return arr.with_provenance(node, arr.motif)

    result = build(root, "root")
    if isinstance(result, ObjectSpec):
        units = expand(result)
        if len(units) == 1:
            return units[0].with_provenance(root, OBJECT_TYPE)
        arr = execute_motif(MotifType.ROW, [result], tight_params({}) if tight else {}, seed=f"{seed}:root")
        return arr.anchored().with_provenance(root)
    return result.anchored()
