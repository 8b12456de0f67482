"""Core domain types: bibliographic records, typed entities, cluster solutions."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field


class EntityType(str, enum.Enum):
    TOPICAL_TERM = "topical-term"
    SUBJECT = "subject"
    AUTHOR = "author"
    JOURNAL = "journal"
    CITATION = "citation"
    UAT_TERM = "uat-term"
    CLUSTER_ID = "cluster-id"


# Prefix used in entity keys and in the "[type:value]" query syntax.
TYPE_PREFIX = {
    EntityType.TOPICAL_TERM: "term",
    EntityType.SUBJECT: "subject",
    EntityType.AUTHOR: "author",
    EntityType.JOURNAL: "issn",
    EntityType.CITATION: "citation",
    EntityType.UAT_TERM: "uat",
    EntityType.CLUSTER_ID: "cluster",
}
PREFIX_TYPE = {v: k for k, v in TYPE_PREFIX.items()}

# Serialization order for the binary index entity table.
TYPE_BYTE = {t: i for i, t in enumerate(EntityType)}
BYTE_TYPE = {i: t for t, i in TYPE_BYTE.items()}


def entity_key(entity_type: EntityType, value: str) -> str:
    return f"{TYPE_PREFIX[entity_type]}:{value}"


def split_key(key: str) -> tuple[EntityType, str]:
    """Inverse of :func:`entity_key`; raises ValueError on an unknown prefix."""
    prefix, _, value = key.partition(":")
    if prefix not in PREFIX_TYPE:
        raise ValueError(f"unknown entity key prefix: {prefix!r}")
    return PREFIX_TYPE[prefix], value


def key_to_bracket(key: str) -> str:
    return f"[{key}]"


def cluster_key(solution_label: str, cluster: str) -> str:
    return entity_key(EntityType.CLUSTER_ID, f"{solution_label} {cluster}")


@dataclass
class BibRecord:
    """One parsed article.

    All stored strings are case-folded to lower case except ``record_id``;
    ``citations`` and ``subjects`` are deduplicated per record.
    """

    record_id: str
    title: str = ""
    abstract: str = ""
    authors: list[str] = field(default_factory=list)
    journal_issn: str = ""
    journal_name: str = ""
    subjects: list[str] = field(default_factory=list)
    citations: list[str] = field(default_factory=list)
    cluster_assignments: list[tuple[str, str]] = field(default_factory=list)
    uat_terms: list[str] = field(default_factory=list)

    def entity_keys(self) -> list[tuple[EntityType, str]]:
        """Typed entity keys carried by this record (topical terms excluded;
        those come from the lexical extractor)."""
        out: list[tuple[EntityType, str]] = []
        for a in self.authors:
            out.append((EntityType.AUTHOR, entity_key(EntityType.AUTHOR, a)))
        if self.journal_issn:
            out.append((EntityType.JOURNAL, entity_key(EntityType.JOURNAL, self.journal_issn)))
        for s in self.subjects:
            out.append((EntityType.SUBJECT, entity_key(EntityType.SUBJECT, s)))
        for c in self.citations:
            out.append((EntityType.CITATION, entity_key(EntityType.CITATION, c)))
        for u in self.uat_terms:
            out.append((EntityType.UAT_TERM, entity_key(EntityType.UAT_TERM, u)))
        for label, ck in self.cluster_assignments:
            out.append((EntityType.CLUSTER_ID, cluster_key(label, ck)))
        return out

    def to_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "title": self.title,
            "abstract": self.abstract,
            "authors": self.authors,
            "journal_issn": self.journal_issn,
            "journal_name": self.journal_name,
            "subjects": self.subjects,
            "citations": self.citations,
            "cluster_assignments": [list(p) for p in self.cluster_assignments],
            "uat_terms": self.uat_terms,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BibRecord":
        d = dict(d)
        d["cluster_assignments"] = [tuple(p) for p in d.get("cluster_assignments", [])]
        return cls(**d)


@dataclass(frozen=True)
class Entity:
    """A typed node of the semantic space.

    ``occurrence_count`` is the number of distinct articles referencing the
    entity; ``(entity_type, key)`` is unique corpus-wide.
    """

    entity_type: EntityType
    key: str
    occurrence_count: int


@dataclass(frozen=True)
class ClusterSolution:
    label: str
    cluster_count: int
    coverage: float
