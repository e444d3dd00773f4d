"""Asset manifests, text embedders and retrieval."""

from __future__ import annotations

import difflib
import hashlib
import json
import math
import os
import re
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Protocol, Sequence

import numpy as np

from roomstack.errors import CategoryMissError, RoomstackError
from roomstack.geom.mesh import TriMesh, load_obj

TOP_K = 5
MANIFEST_VERSION = 1


@dataclass(frozen=True)
class AssetRecord:
    id: str
    category: str
    dimensions: tuple[float, float, float]
    mesh: str  # path relative to the manifest directory
    embedding: tuple[float, ...]

    def __post_init__(self) -> None:
        dims = tuple(float(d) for d in self.dimensions)
        if len(dims) != 3 or not all(d > 0 for d in dims):
            raise ValueError(f"asset {self.id}: dimensions must be three positive numbers")
        object.__setattr__(self, "dimensions", dims)
        object.__setattr__(self, "embedding", tuple(float(e) for e in self.embedding))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "category": self.category,
            "dimensions": list(self.dimensions),
            "mesh": self.mesh,
            "embedding": list(self.embedding),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "AssetRecord":
        return cls(str(d["id"]), str(d["category"]), tuple(d["dimensions"]), str(d.get("mesh", "")), tuple(d["embedding"]))


@dataclass(frozen=True)
class Manifest:
    assets: tuple[AssetRecord, ...]
    root: Path = Path(".")

    def __post_init__(self) -> None:
        ids = [a.id for a in self.assets]
        if len(set(ids)) != len(ids):
            raise RoomstackError("asset ids in a manifest must be unique")
        lengths = {len(a.embedding) for a in self.assets}
        if len(lengths) > 1:
            raise RoomstackError(f"embedding lengths differ across the manifest: {sorted(lengths)}")

    @property
    def embedding_dim(self) -> int:
        return len(self.assets[0].embedding) if self.assets else 0

    @property
    def categories(self) -> list[str]:
        return sorted({a.category for a in self.assets})

    def get(self, asset_id: str) -> AssetRecord:
        for a in self.assets:
            if a.id == asset_id:
                return a
        raise KeyError(asset_id)

    def load_mesh(self, asset: AssetRecord) -> Optional[TriMesh]:
        if not asset.mesh:
            return None
        return load_obj(self.root / asset.mesh)

    def to_dict(self) -> dict:
        return {"version": MANIFEST_VERSION, "assets": [a.to_dict() for a in self.assets]}

    @classmethod
    def from_dict(cls, d: dict, root: Path | str = ".") -> "Manifest":
        if d.get("version", MANIFEST_VERSION) != MANIFEST_VERSION:
            raise RoomstackError(f"unsupported manifest version {d.get('version')}")
        return cls(tuple(AssetRecord.from_dict(a) for a in d.get("assets", [])), Path(root))

    @classmethod
    def load(cls, path: Path | str) -> "Manifest":
        path = Path(path)
        return cls.from_dict(json.loads(path.read_text()), path.parent)


class Embedder(Protocol):
    def embed(self, text: str) -> np.ndarray: ...


_TOKEN = re.compile(r"[a-z0-9]+")


class HashEmbedder:
    """Deterministic bag-of-words projection: each token hashes to a signed bucket."""

    def __init__(self, dim: int = 32) -> None:
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        v = np.zeros(self.dim)
        for tok in _TOKEN.findall(text.lower()):
            h = hashlib.sha256(tok.encode()).digest()
            idx = int.from_bytes(h[:4], "little") % self.dim
            v[idx] += 1.0 if h[4] & 1 else -1.0
        n = np.linalg.norm(v)
        return v / n if n > 0 else v


class HttpEmbedder:
    """Client for an embedding service: POST {"text": ...} -> {"embedding": [...]}."""

    def __init__(self, url: str, token_env: str = "ROOMSTACK_EMBED_TOKEN", timeout: float = 30.0) -> None:
        self.url = url
        self.token_env = token_env
        self.timeout = timeout

    def embed(self, text: str) -> np.ndarray:
        headers = {"Content-Type": "application/json"}
        token = os.environ.get(self.token_env)
        if token:
            headers["Authorization"] = f"Bearer {token}"
        req = urllib.request.Request(self.url, json.dumps({"text": text}).encode(), headers, method="POST")
        with urllib.request.urlopen(req, timeout=self.timeout) as resp:
            body = json.loads(resp.read().decode())
        vec = body.get("embedding") if isinstance(body, dict) else None
        if not isinstance(vec, list) or not vec:
            raise RoomstackError("embedding service returned no embedding")
        return np.asarray(vec, dtype=float)


@dataclass(frozen=True)
class AssetQuery:
    category: str
    text: str
    dimensions: tuple[float, float, float]


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def dimension_mismatch(a: Sequence[float], b: Sequence[float]) -> float:
    """Sum of absolute log ratios over sorted dimensions (orientation and scale symmetric)."""
    return float(sum(abs(math.log(x / y)) for x, y in zip(sorted(a), sorted(b))))


def rank_by_similarity(query: AssetQuery, pool: Sequence[AssetRecord], embedder: Embedder) -> list[tuple[float, AssetRecord]]:
    q = np.asarray(embedder.embed(query.text), dtype=float)
    scored = [(cosine(q, np.asarray(a.embedding)), a) for a in pool]
    scored.sort(key=lambda t: (-t[0], t[1].id))
    return scored


def retrieve_asset(query: AssetQuery, manifest: Manifest | Sequence[AssetRecord], embedder: Embedder, k: int = TOP_K) -> AssetRecord:
    """Category filter, top-``k`` by embedding similarity, then the closest dimensions."""
    assets = manifest.assets if isinstance(manifest, Manifest) else tuple(manifest)
    pool = [a for a in assets if a.category == query.category]
    if not pool:
        cats = sorted({a.category for a in assets})
        raise CategoryMissError(query.category, difflib.get_close_matches(query.category, cats, n=3, cutoff=0.0))
    top = [a for _, a in rank_by_similarity(query, pool, embedder)[:k]]
    # min() keeps the first (most similar) candidate on ties
    return min(top, key=lambda a: dimension_mismatch(a.dimensions, query.dimensions))
