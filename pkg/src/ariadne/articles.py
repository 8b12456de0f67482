"""Article vectors: idf-cubed weighted averages of an article's entity
vectors, cluster-id entities excluded."""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ariadne.records import BibRecord, Entity, EntityType, entity_key
from ariadne.semindex import (
    ChecksumError,
    BadMagicError,
    BadVersionError,
    TruncatedIndexError,
    SemanticMatrix,
)

AMTX_MAGIC = b"AMTX"
AMTX_VERSION = 1


@dataclass
class IdfTable:
    """idf(e) = ln(N / occurrence_count(e)); the stored weight is its cube,
    so frequent entities are pushed toward zero contribution."""

    weights: dict[str, float]

    @classmethod
    def from_inventory(cls, inventory: list[Entity], n_articles: int) -> "IdfTable":
        if n_articles < 1:
            raise ValueError("n_articles must be >= 1")
        weights = {}
        for e in inventory:
            idf = np.log(n_articles / e.occurrence_count)
            weights[e.key] = float(idf**3)
        return cls(weights=weights)

    def weight(self, key: str) -> float:
        return self.weights.get(key, 0.0)


compute_idf = IdfTable.from_inventory


@dataclass
class ArticleMatrix:
    record_ids: list[str]
    vectors: np.ndarray  # float32, (n_articles, dim)
    zero_rows: set[str]  # articles with no resolvable (or all zero-weight) entities

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def row(self, record_id: str) -> np.ndarray | None:
        try:
            return self.vectors[self.record_ids.index(record_id)]
        except ValueError:
            return None


def article_entity_keys(rec: BibRecord, terms: list[str]) -> list[str]:
    """Deduplicated non-cluster entity keys contributing to the article
    vector (repeated entities contribute once)."""
    keys = []
    seen = set()
    for t in terms:
        k = entity_key(EntityType.TOPICAL_TERM, t)
        if k not in seen:
            seen.add(k)
            keys.append(k)
    for etype, k in rec.entity_keys():
        if etype is EntityType.CLUSTER_ID:
            continue
        if k not in seen:
            seen.add(k)
            keys.append(k)
    return keys


def embed_articles(
    records: list[BibRecord],
    sm: SemanticMatrix,
    idf: IdfTable,
    term_lists: dict[str, list[str]] | None = None,
) -> ArticleMatrix:
    """Weighted-average embedding; weights are idf cubes, normalized to sum 1
    per article.  Articles whose weight mass is zero get a zero row and are
    flagged."""
    term_lists = term_lists or {}
    vectors = np.zeros((len(records), sm.dim), dtype=np.float64)
    zero_rows: set[str] = set()
    for i, rec in enumerate(records):
        acc = np.zeros(sm.dim, dtype=np.float64)
        wsum = 0.0
        for key in article_entity_keys(rec, term_lists.get(rec.record_id, [])):
            row = sm.row(key)
            if row is None:
                continue
            w = idf.weight(key)
            if w <= 0.0:
                continue
            acc += w * row.astype(np.float64)
            wsum += w
        if wsum > 0.0:
            vectors[i] = acc / wsum
        else:
            zero_rows.add(rec.record_id)
    return ArticleMatrix(
        record_ids=[r.record_id for r in records],
        vectors=vectors.astype(np.float32),
        zero_rows=zero_rows,
    )


def related_articles(v: np.ndarray, am: ArticleMatrix, k: int) -> list[tuple[str, float]]:
    """Top-k articles by cosine to v; ties broken by record_id."""
    if k <= 0:
        return []
    v = np.asarray(v, dtype=np.float64)
    vn = np.linalg.norm(v)
    if vn == 0.0:
        return []
    mat = am.vectors.astype(np.float64)
    norms = np.linalg.norm(mat, axis=1)
    cos = np.zeros(len(norms))
    nz = norms > 0
    cos[nz] = (mat[nz] @ v) / (norms[nz] * vn)
    order = sorted(range(len(cos)), key=lambda i: (-cos[i], am.record_ids[i]))
    return [(am.record_ids[i], float(cos[i])) for i in order[:k]]


def _checksum(data: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def save_articles(am: ArticleMatrix, path: str | Path) -> None:
    """Same container conventions as the entity index, section magic AMTX."""
    parts = [AMTX_MAGIC, struct.pack("<IIQ", AMTX_VERSION, am.dim, len(am.record_ids))]
    for rid in am.record_ids:
        rb = rid.encode("utf-8")
        parts.append(struct.pack("<HB", len(rb), 1 if rid in am.zero_rows else 0))
        parts.append(rb)
    parts.append(np.ascontiguousarray(am.vectors, dtype="<f4").tobytes())
    body = b"".join(parts)
    with open(path, "wb") as fh:
        fh.write(body)
        fh.write(struct.pack("<Q", _checksum(body)))


def load_articles(path: str | Path) -> ArticleMatrix:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise TruncatedIndexError("file shorter than checksum")
    body, (stored,) = data[:-8], struct.unpack("<Q", data[-8:])
    if _checksum(body) != stored:
        raise ChecksumError("article matrix checksum mismatch")
    if body[:4] != AMTX_MAGIC:
        raise BadMagicError(f"bad magic {body[:4]!r}")
    off = 4
    try:
        version, dim, n = struct.unpack_from("<IIQ", body, off)
        off += struct.calcsize("<IIQ")
        if version != AMTX_VERSION:
            raise BadVersionError(f"unsupported article matrix version {version}")
        record_ids = []
        zero_rows = set()
        for _ in range(n):
            rlen, flag = struct.unpack_from("<HB", body, off)
            off += 3
            rid = body[off : off + rlen].decode("utf-8")
            off += rlen
            record_ids.append(rid)
            if flag:
                zero_rows.add(rid)
        if len(body) - off < int(n) * dim * 4:
            raise TruncatedIndexError("vector section truncated")
        vectors = np.frombuffer(body, dtype="<f4", count=int(n) * dim, offset=off).reshape(int(n), dim).copy()
    except struct.error as exc:
        raise TruncatedIndexError(str(exc)) from exc
    return ArticleMatrix(record_ids=record_ids, vectors=vectors, zero_rows=zero_rows)
