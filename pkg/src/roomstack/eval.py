"""Support-region evaluation: volume IoU, optimal matching, F1 and the dataset harness."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from roomstack.errors import RoomstackError
from roomstack.geom.mesh import TriMesh, load_obj
from roomstack.geom.polygon import Polygon2, polygons_from_shape
from roomstack.support import SupportRegion, project_faces

T_D = 0.1
IOU_THRESHOLD = 0.5
H_TOP = 1.0
ANNOTATION_VERSION = 1


@dataclass(frozen=True)
class AnnotatedRegion:
    footprint: Polygon2
    surface_height: float
    clearance: float
    is_top: bool = False
    holes: tuple[Polygon2, ...] = ()


Region = Union[AnnotatedRegion, SupportRegion]


def _shape(r: Region):
    s = r.footprint.shape
    for h in getattr(r, "holes", ()):
        s = s.difference(h.shape)
    return s


def region_iou(gt: Region, pred: Region, t_d: float = T_D) -> float:
    """Volume IoU of two regions extruded over [surface_height, surface_height + clearance]."""
    a, b = _shape(gt), _shape(pred)
    if a.area <= 0 or b.area <= 0:
        raise ValueError("region footprint has zero area")
    if abs(gt.surface_height - pred.surface_height) > t_d:
        return 0.0
    lo = max(gt.surface_height, pred.surface_height)
    hi = min(gt.surface_height + gt.clearance, pred.surface_height + pred.clearance)
    dh = max(0.0, hi - lo)
    inter = a.intersection(b).area * dh
    union = a.area * gt.clearance + b.area * pred.clearance - inter
    if union <= 0:
        raise ValueError("regions have zero volume")
    return float(min(1.0, max(0.0, inter / union)))


@dataclass(frozen=True)
class MatchReport:
    iou: np.ndarray  # (len(gt), len(pred))
    pairs: tuple[tuple[int, int, float], ...]  # matched (gt index, pred index, IoU > 0)
    n_gt: int
    n_pred: int
    tp: int
    precision: float
    recall: float
    f1: float

    @property
    def mean_iou_matched(self) -> float:
        """Mean IoU over matched pairs with positive overlap (0 when none)."""
        return float(np.mean([p[2] for p in self.pairs])) if self.pairs else 0.0

    @property
    def mean_iou_gt(self) -> float:
        """Matched IoU summed then spread over every ground-truth region."""
        return float(sum(p[2] for p in self.pairs) / self.n_gt) if self.n_gt else 0.0

    @property
    def total_iou(self) -> float:
        return float(sum(p[2] for p in self.pairs))


def f1_score(p: float, r: float) -> float:
    return 0.0 if p + r == 0 else 2 * p * r / (p + r)


def iou_matrix(gt: Sequence[Region], pred: Sequence[Region], t_d: float = T_D) -> np.ndarray:
    m = np.zeros((len(gt), len(pred)))
    for i, g in enumerate(gt):
        for j, p in enumerate(pred):
            m[i, j] = region_iou(g, p, t_d)
    return m


def match_and_score(
    gt: Sequence[Region], pred: Sequence[Region], t_d: float = T_D, threshold: float = IOU_THRESHOLD
) -> MatchReport:
    m = iou_matrix(gt, pred, t_d)
    pairs = []
    if m.size:
        n = max(m.shape)
        padded = np.zeros((n, n))
        padded[: m.shape[0], : m.shape[1]] = m
        rows, cols = linear_sum_assignment(padded, maximize=True)
        for i, j in zip(rows, cols):
            if i < m.shape[0] and j < m.shape[1] and m[i, j] > 0:
                pairs.append((int(i), int(j), float(m[i, j])))
    tp = sum(1 for p in pairs if p[2] >= threshold)
    precision = tp / len(pred) if pred else 0.0
    recall = tp / len(gt) if gt else 0.0
    return MatchReport(m, tuple(pairs), len(gt), len(pred), tp, precision, recall, f1_score(precision, recall))


# annotations


def _region_from_doc(d: dict, mesh: Optional[TriMesh], path: str) -> list[AnnotatedRegion]:
    if "footprint" in d:
        shapes = [Polygon2.from_list(d["footprint"])]
        holes = tuple(Polygon2.from_list(h) for h in d.get("holes", []))
    elif "faces" in d:
        if mesh is None:
            raise RoomstackError(f"{path}: face-index regions need the object's mesh")
        shapes = polygons_from_shape(project_faces(mesh, d["faces"]))
        holes = ()
    else:
        raise RoomstackError(f"{path}: region needs 'footprint' or 'faces'")
    if "surface_height" in d:
        h = float(d["surface_height"])
    elif "faces" in d and mesh is not None:
        h = float(mesh.vertices[mesh.faces[d["faces"]]][:, :, 1].mean())
    else:
        raise RoomstackError(f"{path}: region needs 'surface_height'")
    is_top = bool(d.get("is_top", False))
    clearance = float(d.get("clearance", d.get("height", H_TOP if is_top else math.nan)))
    if not clearance > 0:
        raise RoomstackError(f"{path}: region needs a positive 'clearance'")
    return [AnnotatedRegion(s, h, clearance, is_top, holes) for s in shapes]


@dataclass(frozen=True)
class Annotation:
    name: str
    mesh_path: Optional[Path]
    regions: tuple[AnnotatedRegion, ...]


def load_annotation(path: Path | str) -> Annotation:
    """Per-object JSON: ``{"object", "mesh", "regions": [{footprint|faces, surface_height, clearance, is_top}]}``."""
    path = Path(path)
    doc = json.loads(path.read_text())
    if doc.get("version", ANNOTATION_VERSION) != ANNOTATION_VERSION:
        raise RoomstackError(f"{path}: unsupported annotation version {doc.get('version')}")
    mesh_path = path.parent / doc["mesh"] if doc.get("mesh") else None
    mesh = load_obj(mesh_path) if mesh_path is not None else None
    regions = []
    for i, r in enumerate(doc.get("regions", [])):
        regions.extend(_region_from_doc(r, mesh, f"{path.name}: regions[{i}]"))
    return Annotation(str(doc.get("object", path.stem)), mesh_path, tuple(regions))


def annotation_doc(name: str, mesh: str, regions: Iterable[Region]) -> dict:
    return {
        "version": ANNOTATION_VERSION,
        "object": name,
        "mesh": mesh,
        "regions": [
            {
                "footprint": r.footprint.to_list(),
                "surface_height": r.surface_height,
                "clearance": r.clearance,
                "is_top": r.is_top,
                **({"holes": [h.to_list() for h in r.holes]} if getattr(r, "holes", ()) else {}),
            }
            for r in regions
        ],
    }


# dataset harness


@dataclass(frozen=True)
class ObjectRow:
    name: str
    n_gt: int
    n_pred: int
    tp: int
    precision: float
    recall: float
    f1: float
    mean_iou_matched: float
    mean_iou_gt: float
    error: str = ""


@dataclass(frozen=True)
class DatasetReport:
    rows: tuple[ObjectRow, ...]
    pair_ious: tuple[float, ...] = field(repr=False)

    @property
    def scored(self) -> list[ObjectRow]:
        return [r for r in self.rows if not r.error]

    def _mean(self, attr: str) -> float:
        rows = self.scored
        return float(np.mean([getattr(r, attr) for r in rows])) if rows else 0.0

    @property
    def precision(self) -> float:
        return self._mean("precision")

    @property
    def recall(self) -> float:
        return self._mean("recall")

    @property
    def f1(self) -> float:
        return self._mean("f1")

    @property
    def mean_iou_pairs(self) -> float:
        """Mean IoU over every matched pair in the dataset."""
        return float(np.mean(self.pair_ious)) if self.pair_ious else 0.0

    @property
    def mean_iou_objects(self) -> float:
        return self._mean("mean_iou_matched")

    def summary(self) -> dict:
        return {
            "objects": len(self.rows),
            "failed": len(self.rows) - len(self.scored),
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "mean_iou_pairs": self.mean_iou_pairs,
            "mean_iou_objects": self.mean_iou_objects,
        }

    def write_csv(self, path: Path | str) -> None:
        cols = ["name", "n_gt", "n_pred", "tp", "precision", "recall", "f1", "mean_iou_matched", "mean_iou_gt", "error"]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for r in self.rows:
                w.writerow([getattr(r, c) for c in cols])
            s = self.summary()
            w.writerow(["MEAN", "", "", "", s["precision"], s["recall"], s["f1"], s["mean_iou_objects"], self._mean("mean_iou_gt"), ""])


Extractor = Callable[[TriMesh], list[SupportRegion]]


def dataset_eval(
    pairs: Iterable[tuple[str, TriMesh | Callable[[], TriMesh], Sequence[Region]]],
    extractor: Extractor,
    t_d: float = T_D,
    threshold: float = IOU_THRESHOLD,
) -> DatasetReport:
    """Score ``extractor`` on (name, mesh, annotations) triples; failures become error rows."""
    rows, ious = [], []
    for name, mesh, gt in pairs:
        try:
            m = mesh() if callable(mesh) else mesh
            rep = match_and_score(list(gt), extractor(m), t_d, threshold)
        except Exception as exc:  # noqa: BLE001 - per-object failures are data
            rows.append(ObjectRow(name, len(gt), 0, 0, 0.0, 0.0, 0.0, 0.0, 0.0, f"{type(exc).__name__}: {exc}"))
            continue
        ious.extend(p[2] for p in rep.pairs)
        rows.append(
            ObjectRow(
                name, rep.n_gt, rep.n_pred, rep.tp, rep.precision, rep.recall, rep.f1, rep.mean_iou_matched, rep.mean_iou_gt
            )
        )
    return DatasetReport(tuple(rows), tuple(ious))


def load_dataset(directory: Path | str) -> list[tuple[str, Callable[[], TriMesh], tuple[AnnotatedRegion, ...]]]:
    """Every ``*.json`` annotation in ``directory`` (sorted by file name)."""
    out = []
    for path in sorted(Path(directory).glob("*.json")):
        ann = load_annotation(path)
        if ann.mesh_path is None:
            raise RoomstackError(f"{path}: annotation has no mesh")
        out.append((ann.name, (lambda p=ann.mesh_path: load_obj(p)), ann.regions))
    return out
