"""Top-down SVG debug plot of a solved layout."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence
from xml.sax.saxutils import escape

from roomstack.solver.core import Layout, PlacementRequest, SolveDomain, footprint_corners

_PX_PER_M = 100.0
_MARGIN = 0.3


def _pts(coords, tx, tz) -> str:
    return " ".join(f"{tx(x):.2f},{tz(z):.2f}" for x, z in coords)


def layout_svg(layout: Layout, reqs: Sequence[PlacementRequest], dom: SolveDomain) -> str:
    """Boundary, obstacles and solved footprints with facing arrows; +z points down the page."""
    minx, minz, maxx, maxz = dom.boundary.bounds()
    W = (maxx - minx + 2 * _MARGIN) * _PX_PER_M
    H = (maxz - minz + 2 * _MARGIN) * _PX_PER_M

    def tx(x):
        return (x - minx + _MARGIN) * _PX_PER_M

    def tz(z):
        return (z - minz + _MARGIN) * _PX_PER_M

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.0f}" height="{H:.0f}" viewBox="0 0 {W:.2f} {H:.2f}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<polygon points="{_pts(dom.boundary.vertices, tx, tz)}" fill="#f4f1ea" stroke="black" stroke-width="2"/>',
    ]
    for wall in dom.walls:
        mx, mz = (wall.start[0] + wall.end[0]) / 2, (wall.start[1] + wall.end[1]) / 2
        out.append(f'<text x="{tx(mx):.2f}" y="{tz(mz):.2f}" font-size="11" fill="#555">w{wall.index}</text>')
    for ob in dom.obstacles:
        out.append(f'<polygon points="{_pts(ob.vertices, tx, tz)}" fill="#e8b4b4" stroke="#a33" stroke-width="1"/>')
    by_id = {r.id: r for r in reqs}
    for rid, p in layout.poses.items():
        if p is None:
            continue
        req = by_id[rid]
        fill = "#cfe3f7" if not req.ignore_collision else "#e6f2d9"
        out.append(
            f'<polygon points="{_pts(footprint_corners(req, p), tx, tz)}" fill="{fill}" fill-opacity="0.8" '
            'stroke="#245" stroke-width="1.5"/>'
        )
        L = min(req.footprint) / 2
        fx, fz = math.sin(math.radians(p.yaw)), math.cos(math.radians(p.yaw))
        out.append(
            f'<line x1="{tx(p.x):.2f}" y1="{tz(p.z):.2f}" x2="{tx(p.x + fx * L):.2f}" y2="{tz(p.z + fz * L):.2f}" '
            'stroke="#c30" stroke-width="2"/>'
        )
        out.append(f'<text x="{tx(p.x):.2f}" y="{tz(p.z):.2f}" font-size="12">{escape(rid)}</text>')
    status = "feasible" if layout.feasible else "infeasible: " + ", ".join(layout.unplaced)
    out.append(f'<text x="4" y="14" font-size="12">score {layout.score:.3f} ({escape(status)})</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_layout_svg(path: str | Path, layout: Layout, reqs: Sequence[PlacementRequest], dom: SolveDomain) -> None:
    Path(path).write_text(layout_svg(layout, reqs, dom))
