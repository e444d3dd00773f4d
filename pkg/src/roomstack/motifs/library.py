"""The twelve motif programs.

Every program receives its inputs as *units*: an :class:`ObjectSpec` expands
into ``amount`` single-object units, an :class:`Arrangement` is one rigid unit.
Units are anchored (bottom centre of their bounds at the origin) before
placement, and the primary unit of a multi-object motif sits at the origin.
"""

from __future__ import annotations

import math
import random
from typing import Any, Callable, Mapping, Optional, Sequence

from roomstack.errors import MotifError
from roomstack.geom.polygon import polygon_intersection_area
from roomstack.geom.pose import Pose, yaw_towards
from roomstack.motifs.model import Arrangement, MotifType, ObjectSpec, PlacedObject, Unit, parse_motif_type

SMALL_SCALE = 0.5  # largest unit dimension (m) still treated as a small object
SMALL_GAP = 0.03
LARGE_GAP = 0.1
CHAIR_GAP = 0.05
PILE_OFFSET = 0.1
PILE_YAW = 30.0
GAP_KEYS = ("gap", "gap_x", "gap_z", "spacing")

_OVERLAP_EPS = 1e-9


def _unit_from_spec(spec: ObjectSpec, label: str, round_: bool = False) -> Arrangement:
    one = spec.with_amount(1)
    return Arrangement((PlacedObject(label, one, Pose((0.0, 0.0, 0.0)), round_),), description=spec.description)


def expand(inp: Unit, count: Optional[int] = None, round_: bool = False) -> list[Arrangement]:
    """Anchored units for one motif input."""
    if isinstance(inp, ObjectSpec):
        n = inp.amount if count is None else count
        if n < 1:
            raise MotifError(f"{inp.name}: count must be positive")
        return [_unit_from_spec(inp, f"{inp.name}_{k}", round_) for k in range(n)]
    if isinstance(inp, Arrangement):
        n = 1 if count is None else count
        if n < 1:
            raise MotifError("count must be positive")
        base = inp.anchored()
        if n == 1:
            return [base]
        return [
            Arrangement(
                tuple(PlacedObject(f"{o.label}_{k}", o.spec, o.pose, o.round) for o in base.objects),
                base.motif,
                base.description,
                base.provenance,
            )
            for k in range(n)
        ]
    raise MotifError(f"unsupported motif input {type(inp).__name__}")


def turned(unit: Arrangement, yaw: float) -> Arrangement:
    """``unit`` rotated about +y and re-anchored."""
    return unit.moved(yaw).anchored() if yaw else unit


def _merge(parts: Sequence[Arrangement], motif: MotifType) -> Arrangement:
    objs = tuple(o for p in parts for o in p.objects)
    return Arrangement(objs, motif.value).grounded()


def default_gap(units: Sequence[Arrangement]) -> float:
    biggest = max(max(u.dimensions) for u in units)
    return SMALL_GAP if biggest <= SMALL_SCALE else LARGE_GAP


def _get(params: Mapping[str, Any], key: str, default: float, lo: float = 0.0, hi: float = math.inf) -> float:
    value = params.get(key)
    if value is None:
        return default
    value = float(value)
    if not (lo <= value <= hi):
        raise MotifError(f"parameter {key}={value} outside [{lo}, {hi}]")
    return value


def _int(params: Mapping[str, Any], key: str) -> Optional[int]:
    value = params.get(key)
    if value is None:
        return None
    if int(value) != value or value < 1:
        raise MotifError(f"parameter {key} must be a positive integer, got {value}")
    return int(value)


def _single(units: list[Arrangement], what: str) -> Arrangement:
    if len(units) != 1:
        raise MotifError(f"the {what} of a motif must be a single unit, got {len(units)}")
    return units[0]


def _centred_offsets(n: int, step: float) -> list[float]:
    return [(k - (n - 1) / 2) * step for k in range(n)]


def _row_along_x(units: Sequence[Arrangement], spacing: float) -> list[tuple[Arrangement, float]]:
    """Pack units side by side along x with ``spacing`` between bounds, centred at 0."""
    widths = [u.dimensions[0] for u in units]
    total = sum(widths) + spacing * (len(units) - 1)
    out, cursor = [], -total / 2
    for u, w in zip(units, widths):
        out.append((u, cursor + w / 2))
        cursor += w + spacing
    return out


# single-object motifs


def _stack(units, params, rng):
    gap = _get(params, "gap", 0.0)
    h = units[0].dimensions[1]
    return [u.moved(0.0, (0.0, k * (h + gap), 0.0)) for k, u in enumerate(units)]


def _pile(units, params, rng):
    frac = _get(params, "offset", PILE_OFFSET, 0.0, 0.5)
    max_yaw = _get(params, "max_yaw", PILE_YAW, 0.0, 180.0)
    w, h, d = units[0].dimensions
    out = []
    for k, u in enumerate(units):
        dx = rng.uniform(-frac * w, frac * w)
        dz = rng.uniform(-frac * d, frac * d)
        yaw = rng.uniform(-max_yaw, max_yaw)
        out.append(u.moved(yaw, (dx, k * h, dz)))
    return out


def _row(units, params, rng):
    w = units[0].dimensions[0]
    gap = _get(params, "gap", 0.1 * w)
    return [u.moved(0.0, (x, 0.0, 0.0)) for u, x in zip(units, _centred_offsets(len(units), w + gap))]


def grid_shape(n: int, rows: Optional[int] = None, cols: Optional[int] = None) -> tuple[int, int]:
    """Rows and columns with rows * cols == n; the most square split by default."""
    if rows is not None and cols is not None:
        if rows * cols != n:
            raise MotifError(f"grid {rows}x{cols} does not hold {n} objects")
        return rows, cols
    if rows is not None or cols is not None:
        k = rows if rows is not None else cols
        if n % k:
            raise MotifError(f"{n} objects do not split into {k} equal lines")
        return (k, n // k) if rows is not None else (n // k, k)
    r = max(d for d in range(1, int(math.isqrt(n)) + 1) if n % d == 0)
    return r, n // r


def _grid(units, params, rng):
    w, _, d = units[0].dimensions
    rows, cols = grid_shape(len(units), _int(params, "rows"), _int(params, "cols"))
    gx = _get(params, "gap_x", _get(params, "gap", 0.1 * w))
    gz = _get(params, "gap_z", _get(params, "gap", 0.1 * d))
    xs = _centred_offsets(cols, w + gx)
    zs = _centred_offsets(rows, d + gz)
    return [units[r * cols + c].moved(0.0, (xs[c], 0.0, zs[r])) for r in range(rows) for c in range(cols)]


def pyramid_layers(n: int) -> list[int]:
    """Largest k with k(k+1)/2 <= n, extra objects added one per layer from the bottom."""
    if n < 1:
        raise MotifError("pyramid needs at least one object")
    k = int((math.isqrt(8 * n + 1) - 1) // 2)
    layers = list(range(k, 0, -1))
    for i in range(n - k * (k + 1) // 2):
        layers[i] += 1
    return layers


def _pyramid(units, params, rng):
    n = len(units)
    layers = params.get("layers")
    if layers is None:
        layers = pyramid_layers(n)
    else:
        layers = [int(c) for c in layers]
        if sum(layers) != n or any(c < 1 for c in layers) or any(a <= b for a, b in zip(layers, layers[1:])):
            raise MotifError(f"pyramid layers {layers} must strictly decrease and sum to {n}")
    w, h, _ = units[0].dimensions
    gap = _get(params, "gap", 0.0)
    out, it = [], iter(units)
    for level, count in enumerate(layers):
        for x in _centred_offsets(count, w + gap):
            out.append(next(it).moved(0.0, (x, level * h, 0.0)))
    return out


# two- and three-object motifs


def _left_of(primary, secondary, params, gap):
    lo, _ = primary.bounds
    cursor = lo[0] - gap
    out = [primary]
    for u in secondary:
        w = u.dimensions[0]
        out.append(u.moved(0.0, (cursor - w / 2, 0.0, 0.0)))
        cursor -= w + gap
    return out


def _in_front_of(primary, secondary, params, gap):
    face = params.get("face_primary", True)
    yaw = float(params.get("yaw", 180.0 if face else 0.0))
    turned_units = [turned(u, yaw) for u in secondary]
    _, hi = primary.bounds
    spacing = _get(params, "spacing", gap)
    out = [primary]
    for u, x in _row_along_x(turned_units, spacing):
        out.append(u.moved(0.0, (x, 0.0, hi[2] + gap + u.dimensions[2] / 2)))
    return out


def _on_top(primary, secondary, params, gap):
    _, hi = primary.bounds
    spacing = _get(params, "spacing", 0.1 * secondary[0].dimensions[0])
    return [primary] + [u.moved(0.0, (x, hi[1] + gap, 0.0)) for u, x in _row_along_x(secondary, spacing)]


def _check_chairs(chairs: Sequence[Arrangement], what: str) -> None:
    polys = [[o.footprint() for o in c.objects] for c in chairs]
    for i in range(len(chairs)):
        for j in range(i + 1, len(chairs)):
            for a in polys[i]:
                for b in polys[j]:
                    if polygon_intersection_area(a, b) > _OVERLAP_EPS:
                        raise MotifError(f"too many chairs for the {what}: neighbours overlap")


def _surround(primary, secondary, params, gap):
    w, _, d = primary.dimensions
    radius = max(w, d) / 2
    start = _get(params, "start_angle", 0.0, -360.0, 360.0)
    n = len(secondary)
    out = [primary]
    for k, u in enumerate(secondary):
        theta = start + 360.0 * k / n
        r = radius + u.dimensions[2] / 2 + gap
        x, z = r * math.sin(math.radians(theta)), r * math.cos(math.radians(theta))
        yaw = yaw_towards(-x, -z)
        out.append(u.moved(yaw, (x, 0.0, z)))
    _check_chairs(out[1:], "table")
    return out


_SIDES = (
    # name, outward normal, along-side axis
    ("front", (0.0, 1.0), (1.0, 0.0)),
    ("back", (0.0, -1.0), (-1.0, 0.0)),
    ("left", (-1.0, 0.0), (0.0, 1.0)),
    ("right", (1.0, 0.0), (0.0, -1.0)),
)


def allocate_sides(n: int, width: float, depth: float, chair_width: float, gap: float = 0.0) -> list[int]:
    """Chairs per side (front, back, left, right): each goes where it gets the most room."""
    lengths = [width, width, depth, depth]
    counts = [0, 0, 0, 0]
    for _ in range(n):
        best, best_room = None, -1.0
        for i, L in enumerate(lengths):
            if (counts[i] + 1) * chair_width + counts[i] * gap > L + 1e-9 and any(
                (counts[j] + 1) * chair_width + counts[j] * gap <= L2 + 1e-9 for j, L2 in enumerate(lengths)
            ):
                continue
            room = L / (counts[i] + 1)
            if room > best_room + 1e-12:
                best, best_room = i, room
        counts[best] += 1
    return counts


def _clear_of(chair: Arrangement, table_polys, gap: float) -> bool:
    for o in chair.objects:
        fp = o.footprint().shape
        for t in table_polys:
            if fp.distance(t.shape) < gap - 1e-9 or fp.intersection(t.shape).area > _OVERLAP_EPS:
                return False
    return True


def _rect_perimeter(primary, secondary, params, gap):
    w, _, d = primary.dimensions
    table_polys = [o.footprint() for o in primary.objects]
    cw = secondary[0].dimensions[0]
    counts = allocate_sides(len(secondary), w, d, cw)
    half = {"front": d / 2, "back": d / 2, "left": w / 2, "right": w / 2}
    length = {"front": w, "back": w, "left": d, "right": d}
    it = iter(secondary)
    out = [primary]
    for (name, (nx, nz), (ax, az)), count in zip(_SIDES, counts):
        L = length[name]
        for j in range(count):
            u = next(it)
            t = -L / 2 + L * (j + 0.5) / count
            base_off = half[name] + u.dimensions[2] / 2

            def place(off: float, u=u, t=t) -> Arrangement:
                x, z = ax * t + nx * off, az * t + nz * off
                return u.moved(yaw_towards(-x, -z), (x, 0.0, z))

            lo_off, hi_off = base_off + gap, base_off + gap + max(u.dimensions) + L
            if _clear_of(place(lo_off), table_polys, gap):
                out.append(place(lo_off))
                continue
            for _ in range(60):
                mid = (lo_off + hi_off) / 2
                if _clear_of(place(mid), table_polys, gap):
                    hi_off = mid
                else:
                    lo_off = mid
            out.append(place(hi_off))
    _check_chairs(out[1:], "table")
    return out


def _bed_nightstand(primary, secondary, params, gap):
    if len(secondary) > 2:
        raise MotifError(f"a bed takes at most 2 nightstands, got {len(secondary)}")
    lo, hi = primary.bounds
    out = [primary]
    for side, u in zip((-1.0, 1.0), secondary):
        w, _, d = u.dimensions
        x = lo[0] - gap - w / 2 if side < 0 else hi[0] + gap + w / 2
        # backs flush with the headboard plane at the bed's rear (-z) face
        out.append(u.moved(0.0, (x, 0.0, lo[2] + d / 2)))
    return out


def _on_each_side(primary, secondary, tertiary, params, gap):
    lo, hi = primary.bounds
    out = [primary]
    cursor = lo[0] - gap
    for u in secondary:
        w = u.dimensions[0]
        out.append(u.moved(0.0, (cursor - w / 2, 0.0, 0.0)))
        cursor -= w + gap
    cursor = hi[0] + gap
    for u in tertiary:
        w = u.dimensions[0]
        out.append(u.moved(0.0, (cursor + w / 2, 0.0, 0.0)))
        cursor += w + gap
    return out


_SINGLE: dict[MotifType, tuple[Callable, set[str]]] = {
    MotifType.STACK: (_stack, {"gap", "count"}),
    MotifType.PILE: (_pile, {"offset", "max_yaw", "count"}),
    MotifType.ROW: (_row, {"gap", "count"}),
    MotifType.GRID: (_grid, {"rows", "cols", "gap", "gap_x", "gap_z", "count"}),
    MotifType.PYRAMID: (_pyramid, {"layers", "gap", "count"}),
}

_MULTI: dict[MotifType, tuple[Callable, set[str], Optional[float]]] = {
    # default gap of None means the small/large scale rule
    MotifType.LEFT_OF: (_left_of, {"gap"}, None),
    MotifType.IN_FRONT_OF: (_in_front_of, {"gap", "face_primary", "yaw", "spacing"}, None),
    MotifType.ON_TOP: (_on_top, {"gap", "spacing"}, 0.0),
    MotifType.SURROUND: (_surround, {"gap", "start_angle"}, CHAIR_GAP),
    MotifType.RECTANGULAR_PERIMETER: (_rect_perimeter, {"gap"}, CHAIR_GAP),
    MotifType.BED_NIGHTSTAND: (_bed_nightstand, {"gap"}, 0.0),
    MotifType.ON_EACH_SIDE: (_on_each_side, {"gap"}, None),
}


def tight_params(params: Mapping[str, Any] | None) -> dict:
    """Copy of ``params`` with every gap forced to zero."""
    out = dict(params or {})
    for key in GAP_KEYS:
        out[key] = 0.0
    return out


def execute_motif(
    motif: MotifType | str,
    inputs: Sequence[Unit],
    params: Mapping[str, Any] | None = None,
    seed: int | str = 0,
) -> Arrangement:
    """Run one motif program and return its arrangement (grounded at y = 0).

    For single-object motifs an :class:`ObjectSpec` contributes ``amount``
    copies; an :class:`Arrangement` contributes ``params["count"]`` copies
    (default 1). The first input of a multi-object motif is the primary and
    must be a single unit.
    """
    kind = parse_motif_type(motif) if not isinstance(motif, MotifType) else motif
    params = dict(params or {})
    if len(inputs) != kind.arity:
        raise MotifError(f"{kind.value} takes {kind.arity} inputs, got {len(inputs)}")
    rng = random.Random(f"motif:{seed}")
    if kind in _SINGLE:
        fn, allowed = _SINGLE[kind]
        _check_keys(kind, params, allowed)
        count = _int(params, "count")
        if isinstance(inputs[0], ObjectSpec) and count is not None:
            raise MotifError("count applies to arrangement inputs; set amount on the object instead")
        units = expand(inputs[0], count)
        parts = fn(units, params, rng)
    else:
        fn, allowed, fixed_gap = _MULTI[kind]
        _check_keys(kind, params, allowed)
        round_ = kind is MotifType.SURROUND
        primary = _single(expand(inputs[0], round_=round_), "primary")
        rest = [expand(inp) for inp in inputs[1:]]
        default = fixed_gap if fixed_gap is not None else default_gap([primary, *[u for r in rest for u in r]])
        gap = _get(params, "gap", default)
        parts = fn(primary, *rest, params, gap)
    return _merge(parts, kind)


def _check_keys(kind: MotifType, params: Mapping[str, Any], allowed: set[str]) -> None:
    unknown = sorted(set(params) - allowed - set(GAP_KEYS))
    if unknown:
        raise MotifError(f"{kind.value} does not accept parameters {unknown}")
