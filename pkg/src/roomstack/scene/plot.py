"""Top-down SVG of a generated scene."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

from roomstack.scene.model import Scene
from roomstack.scene.room import door_obstacles

_PX_PER_M = 100.0
_MARGIN = 0.3


def scene_svg(scene: Scene) -> str:
    minx, minz, maxx, maxz = scene.room.boundary.bounds()
    W = (maxx - minx + 2 * _MARGIN) * _PX_PER_M
    H = (maxz - minz + 2 * _MARGIN) * _PX_PER_M

    def pts(coords) -> str:
        return " ".join(f"{(x - minx + _MARGIN) * _PX_PER_M:.2f},{(z - minz + _MARGIN) * _PX_PER_M:.2f}" for x, z in coords)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W:.0f}" height="{H:.0f}" viewBox="0 0 {W:.2f} {H:.2f}">',
        '<rect width="100%" height="100%" fill="white"/>',
        f'<polygon points="{pts(scene.room.boundary.vertices)}" fill="#f4f1ea" stroke="black" stroke-width="2"/>',
    ]
    for ob in door_obstacles(scene.room):
        out.append(f'<polygon points="{pts(ob.vertices)}" fill="#e8b4b4" stroke="#a33" stroke-width="1"/>')
    for rec in scene.regions:
        out.append(
            f'<polygon points="{pts(rec.region.footprint.vertices)}" fill="none" stroke="#7a7" '
            'stroke-dasharray="4 3" stroke-width="1"/>'
        )
    for o in sorted(scene.objects, key=lambda o: (o.pose.y, o.id)):
        fill = "#cfe3f7" if o.parent.is_floor else "#f7dfb5"
        out.append(
            f'<polygon points="{pts(o.footprint().vertices)}" fill="{fill}" fill-opacity="0.85" stroke="#245" stroke-width="1">'
            f"<title>{escape(o.id)}</title></polygon>"
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_scene_svg(path: str | Path, scene: Scene) -> None:
    Path(path).write_text(scene_svg(scene))
