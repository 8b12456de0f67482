"""The semantic index: sparse entity/vocabulary co-occurrence counts reduced
to a dense matrix by a seeded signed random projection, plus its binary
persistence format.

The projection matrix is never materialized: each vocabulary row of signs is
regenerated on demand from a counter-based PRNG keyed by (seed, row), so a
rebuild with the same seed is bit-identical and memory stays O(block).
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import sparse

from ariadne.lexical import SUBJECT_KIND, TERM_KIND, Vocabulary
from ariadne.records import BYTE_TYPE, TYPE_BYTE, BibRecord, Entity, EntityType, entity_key

MAGIC = b"ARDN"
VERSION = 1
DEFAULT_DIM = 600
DEFAULT_SEED = 42
# Entities rarer than this carry mostly noise and are dropped from the index;
# cluster ids are exempt (every cluster must stay queryable).
DEFAULT_MIN_ENTITY_COUNT = 2


class IndexFormatError(ValueError):
    pass


class BadMagicError(IndexFormatError):
    pass


class BadVersionError(IndexFormatError):
    pass


class TruncatedIndexError(IndexFormatError):
    pass


class ChecksumError(IndexFormatError):
    pass


def select_entities(inventory: list[Entity], min_count: int = DEFAULT_MIN_ENTITY_COUNT) -> list[Entity]:
    return [
        e
        for e in inventory
        if e.occurrence_count >= min_count or e.entity_type is EntityType.CLUSTER_ID
    ]


def build_cooccurrence(
    records: list[BibRecord],
    entities: list[Entity],
    vocab: Vocabulary,
    term_lists: dict[str, list[str]],
) -> sparse.csr_matrix:
    """Sparse entity-by-vocabulary matrix: cell (e, w) counts the articles
    containing both entity e and vocabulary unit w."""
    row_index = {e.key: i for i, e in enumerate(entities)}
    rows: list[int] = []
    cols: list[int] = []
    for rec in records:
        unit_cols = []
        ent_rows = []
        for t in term_lists.get(rec.record_id, []):
            j = vocab.index(TERM_KIND, t)
            if j is not None:
                unit_cols.append(j)
                i = row_index.get(entity_key(EntityType.TOPICAL_TERM, t))
                if i is not None:
                    ent_rows.append(i)
        for s in rec.subjects:
            j = vocab.index(SUBJECT_KIND, s)
            if j is not None:
                unit_cols.append(j)
        for _, key in rec.entity_keys():
            i = row_index.get(key)
            if i is not None:
                ent_rows.append(i)
        unit_cols = sorted(set(unit_cols))
        for i in sorted(set(ent_rows)):
            rows.extend([i] * len(unit_cols))
            cols.extend(unit_cols)
    mat = sparse.coo_matrix(
        (np.ones(len(rows), dtype=np.int64), (rows, cols)),
        shape=(len(entities), len(vocab)),
    )
    return mat.tocsr()


def projection_rows(seed: int, start: int, stop: int, dim: int) -> np.ndarray:
    """Rows [start, stop) of the +/-1 projection matrix, each a pure function
    of (seed, row index)."""
    out = np.empty((stop - start, dim), dtype=np.float64)
    for j in range(start, stop):
        rng = np.random.Generator(np.random.Philox(key=[np.uint64(seed), np.uint64(j)]))
        out[j - start] = rng.integers(0, 2, size=dim) * 2 - 1
    return out


def project(
    cooc: sparse.csr_matrix,
    entities: list[Entity],
    dim: int = DEFAULT_DIM,
    seed: int = DEFAULT_SEED,
    block: int = 2048,
) -> "SemanticMatrix":
    """Multiply the sparse counts with the signed projection, streaming the
    projection in column blocks.  Accumulates in float64, stores float32."""
    n_rows, n_cols = cooc.shape
    csc = cooc.tocsc()
    acc = np.zeros((n_rows, dim), dtype=np.float64)
    for start in range(0, n_cols, block):
        stop = min(start + block, n_cols)
        r = projection_rows(seed, start, stop, dim)
        acc += csc[:, start:stop] @ r
    return SemanticMatrix(entities=entities, vectors=acc.astype(np.float32), dim=dim, seed=seed)


@dataclass
class SemanticMatrix:
    """Dense entity-by-dim matrix with its entity table; the online index."""

    entities: list[Entity]
    vectors: np.ndarray  # float32, (len(entities), dim)
    dim: int
    seed: int
    _norms: np.ndarray | None = field(default=None, repr=False)
    _variance: np.ndarray | None = field(default=None, repr=False)
    _row_index: dict[str, int] | None = field(default=None, repr=False)

    @property
    def norms(self) -> np.ndarray:
        if self._norms is None:
            self._norms = np.linalg.norm(self.vectors.astype(np.float64), axis=1)
        return self._norms

    @property
    def variance(self) -> np.ndarray:
        """Per-dimension variance over all rows, for the outlier filter."""
        if self._variance is None:
            self._variance = np.var(self.vectors.astype(np.float64), axis=0)
        return self._variance

    @property
    def row_index(self) -> dict[str, int]:
        if self._row_index is None:
            self._row_index = {e.key: i for i, e in enumerate(self.entities)}
        return self._row_index

    def row(self, key: str) -> np.ndarray | None:
        i = self.row_index.get(key)
        return None if i is None else self.vectors[i]


def _checksum(data: bytes) -> int:
    return int.from_bytes(hashlib.blake2b(data, digest_size=8).digest(), "little")


def save_index(sm: SemanticMatrix, path: str | Path) -> None:
    """Little-endian container: header, entity table, row-major float32
    vectors, trailing 64-bit checksum of all preceding bytes."""
    parts = [MAGIC, struct.pack("<IIQQ", VERSION, sm.dim, len(sm.entities), sm.seed)]
    for e in sm.entities:
        kb = e.key.encode("utf-8")
        parts.append(struct.pack("<BH", TYPE_BYTE[e.entity_type], len(kb)))
        parts.append(kb)
        parts.append(struct.pack("<I", e.occurrence_count))
    parts.append(np.ascontiguousarray(sm.vectors, dtype="<f4").tobytes())
    body = b"".join(parts)
    with open(path, "wb") as fh:
        fh.write(body)
        fh.write(struct.pack("<Q", _checksum(body)))


def load_index(path: str | Path) -> SemanticMatrix:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise TruncatedIndexError("file shorter than checksum")
    body, (stored,) = data[:-8], struct.unpack("<Q", data[-8:])
    if _checksum(body) != stored:
        raise ChecksumError("index checksum mismatch")
    if body[:4] != MAGIC:
        raise BadMagicError(f"bad magic {body[:4]!r}")
    off = 4
    try:
        version, dim, n, seed = struct.unpack_from("<IIQQ", body, off)
        off += struct.calcsize("<IIQQ")
        if version != VERSION:
            raise BadVersionError(f"unsupported index version {version}")
        entities = []
        for _ in range(n):
            tbyte, klen = struct.unpack_from("<BH", body, off)
            off += 3
            key = body[off : off + klen].decode("utf-8")
            off += klen
            (occ,) = struct.unpack_from("<I", body, off)
            off += 4
            entities.append(Entity(entity_type=BYTE_TYPE[tbyte], key=key, occurrence_count=occ))
        vec_bytes = int(n) * dim * 4
        if len(body) - off < vec_bytes:
            raise TruncatedIndexError("vector section truncated")
        vectors = np.frombuffer(body, dtype="<f4", count=int(n) * dim, offset=off).reshape(int(n), dim).copy()
    except struct.error as exc:
        raise TruncatedIndexError(str(exc)) from exc
    return SemanticMatrix(entities=entities, vectors=vectors, dim=dim, seed=seed)
