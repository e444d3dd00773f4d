"""Indexed triangle meshes and a minimal Wavefront OBJ reader/writer."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from roomstack.errors import MeshFormatError

WELD_TOL = 1e-6
_AREA_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Immutable triangle mesh with y-up, right-handed coordinates.

    Use :meth:`from_arrays` to build one from raw data; it welds coincident
    vertices and drops zero-area faces so downstream adjacency is meaningful.
    """

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        f = np.asarray(self.faces, dtype=np.int64).reshape(-1, 3)
        if not np.all(np.isfinite(v)):
            raise MeshFormatError("vertex coordinates must be finite")
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise MeshFormatError("face index out of range")
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @classmethod
    def from_arrays(cls, vertices, faces, weld_tol: float = WELD_TOL) -> "TriMesh":
        v = np.asarray(vertices, dtype=float).reshape(-1, 3)
        f = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise MeshFormatError("face index out of range")
        return weld(v, f, weld_tol)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @cached_property
    def _cross(self) -> np.ndarray:
        tri = self.vertices[self.faces]
        return np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])

    @cached_property
    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self._cross, axis=1)

    @cached_property
    def face_normals(self) -> np.ndarray:
        norms = np.linalg.norm(self._cross, axis=1, keepdims=True)
        return self._cross / np.where(norms > 0, norms, 1.0)

    @cached_property
    def face_adjacency(self) -> tuple[tuple[int, ...], ...]:
        """Neighbours of each face through a shared (undirected) edge."""
        edge_faces: dict[tuple[int, int], list[int]] = defaultdict(list)
        for fi, (a, b, c) in enumerate(self.faces.tolist()):
            for u, w in ((a, b), (b, c), (c, a)):
                edge_faces[(u, w) if u < w else (w, u)].append(fi)
        nbrs: list[set[int]] = [set() for _ in range(self.n_faces)]
        for owners in edge_faces.values():
            for fi in owners:
                nbrs[fi].update(o for o in owners if o != fi)
        return tuple(tuple(sorted(s)) for s in nbrs)

    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        if not self.n_vertices:
            raise MeshFormatError("empty mesh has no bounds")
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def transformed(self, scale=(1.0, 1.0, 1.0), yaw_deg: float = 0.0, translate=(0.0, 0.0, 0.0)) -> "TriMesh":
        """Scale per axis, rotate about +y, then translate."""
        c, s = np.cos(np.radians(yaw_deg)), np.sin(np.radians(yaw_deg))
        rot = np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])
        v = (self.vertices * np.asarray(scale, dtype=float)) @ rot.T + np.asarray(translate, dtype=float)
        flip = np.prod(np.sign(scale)) < 0
        f = self.faces[:, ::-1] if flip else self.faces
        return TriMesh(v, f)


def weld(vertices: np.ndarray, faces: np.ndarray, tol: float = WELD_TOL) -> TriMesh:
    """Merge vertices that fall in the same ``tol`` grid cell, drop degenerate faces."""
    if not len(vertices):
        return TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
    keys = np.round(vertices / tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.reshape(-1)
    # keep representatives in first-seen order so output is stable
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[order] = np.arange(len(order))
    new_vertices = vertices[first[order]]
    new_faces = remap[inverse[faces]] if len(faces) else faces.reshape(0, 3)
    if len(new_faces):
        distinct = (
            (new_faces[:, 0] != new_faces[:, 1])
            & (new_faces[:, 1] != new_faces[:, 2])
            & (new_faces[:, 0] != new_faces[:, 2])
        )
        new_faces = new_faces[distinct]
    if len(new_faces):
        tri = new_vertices[new_faces]
        area = 0.5 * np.linalg.norm(np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0]), axis=1)
        new_faces = new_faces[area > _AREA_EPS]
    used = np.unique(new_faces) if len(new_faces) else np.zeros(0, dtype=np.int64)
    compact = np.full(len(new_vertices), -1, dtype=np.int64)
    compact[used] = np.arange(len(used))
    return TriMesh(new_vertices[used], compact[new_faces] if len(new_faces) else np.zeros((0, 3), dtype=np.int64))


def parse_obj(text: str, weld_tol: float = WELD_TOL) -> TriMesh:
    """Parse the ``v``/``f`` subset of OBJ; polygons are fan-triangulated."""
    verts: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = raw.split("#", 1)[0].split()
        if not toks:
            continue
        if toks[0] == "v":
            try:
                verts.append((float(toks[1]), float(toks[2]), float(toks[3])))
            except (IndexError, ValueError) as exc:
                raise MeshFormatError(f"line {lineno}: bad vertex record") from exc
        elif toks[0] == "f":
            idx = []
            for tok in toks[1:]:
                try:
                    i = int(tok.split("/")[0])
                except ValueError as exc:
                    raise MeshFormatError(f"line {lineno}: bad face index {tok!r}") from exc
                # OBJ indices are 1-based; negatives are relative to the end
                i = i - 1 if i > 0 else len(verts) + i
                if not 0 <= i < len(verts):
                    raise MeshFormatError(f"line {lineno}: face index out of range")
                idx.append(i)
            if len(idx) < 3:
                raise MeshFormatError(f"line {lineno}: face needs at least 3 vertices")
            faces.extend((idx[0], idx[k], idx[k + 1]) for k in range(1, len(idx) - 1))
    return TriMesh.from_arrays(np.array(verts, dtype=float).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3), weld_tol)


def load_obj(path: str | Path, weld_tol: float = WELD_TOL) -> TriMesh:
    return parse_obj(Path(path).read_text(), weld_tol)


def format_obj(mesh: TriMesh) -> str:
    lines = [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in mesh.vertices.tolist()]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.faces.tolist()]
    return "\n".join(lines) + "\n"


def save_obj(mesh: TriMesh, path: str | Path) -> None:
    Path(path).write_text(format_obj(mesh))


def concatenate(meshes: list[TriMesh], weld_tol: float = WELD_TOL) -> TriMesh:
    verts, faces, offset = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        faces.append(m.faces + offset)
        offset += m.n_vertices
    if not verts:
        return TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))
    return TriMesh.from_arrays(np.vstack(verts), np.vstack(faces), weld_tol)
