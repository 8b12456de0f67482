"""Corpus ingest: parse the tab-delimited record format, attach external
cluster assignments, and build the typed entity inventory.

Ingest format: UTF-8, one record per block, blocks separated by blank lines,
each line ``FIELD<TAB>value``.  Repeatable fields (AU, SU, CI, CL, UT) repeat
the line.  Assignment files are CSV ``record_id,solution_label,cluster_key``
with a header row.

No author or citation disambiguation is applied: identity is exact string
match after case-folding.
"""

from __future__ import annotations

import csv
import io
import logging
from collections import defaultdict
from pathlib import Path
from typing import Iterable, TextIO

from ariadne.records import BibRecord, ClusterSolution, Entity, EntityType, entity_key

log = logging.getLogger(__name__)


class IngestError(ValueError):
    """Malformed corpus or assignment input."""


SCALAR_FIELDS = {"ID", "TI", "AB", "SN", "JN"}
REPEAT_FIELDS = {"AU", "SU", "CI", "CL", "UT"}

# Field mapping for sources exported from Web of Science style records:
# AF/AU -> AU, DE (Author Keywords) and ID (Keywords Plus) -> SU, CR -> CI.
# A converter producing this format is out of scope; the mapping is documented
# here for whoever writes one.


def _parse_block(lines: list[str], ordinal: int) -> BibRecord:
    rec = BibRecord(record_id="")
    for line in lines:
        if "\t" not in line:
            raise IngestError(f"record {ordinal}: line without TAB separator: {line!r}")
        field, value = line.split("\t", 1)
        field = field.strip().upper()
        value = value.strip()
        if field == "ID":
            rec.record_id = value
        elif field == "TI":
            rec.title = value.lower()
        elif field == "AB":
            rec.abstract = value.lower()
        elif field == "SN":
            rec.journal_issn = value.lower()
        elif field == "JN":
            rec.journal_name = value.lower()
        elif field == "AU":
            rec.authors.append(value.lower())
        elif field == "SU":
            rec.subjects.append(value.lower())
        elif field == "CI":
            rec.citations.append(value.lower())
        elif field == "UT":
            rec.uat_terms.append(value.lower())
        elif field == "CL":
            label, _, ck = value.lower().partition(" ")
            if not label or not ck:
                raise IngestError(f"record {ordinal}: malformed CL field: {value!r}")
            rec.cluster_assignments.append((label, ck))
        else:
            raise IngestError(f"record {ordinal}: unknown field {field!r}")
    if not rec.record_id:
        raise IngestError(f"record {ordinal}: missing ID field")
    rec.subjects = _dedupe(rec.subjects)
    rec.citations = _dedupe(rec.citations)
    rec.cluster_assignments = _dedupe(rec.cluster_assignments)
    return rec


def _dedupe(items: list) -> list:
    seen = set()
    out = []
    for x in items:
        if x not in seen:
            seen.add(x)
            out.append(x)
    return out


def parse_corpus(source: str | Path | TextIO) -> list[BibRecord]:
    """Parse the ingest format into normalized records.

    Raises :class:`IngestError` on malformed records (naming the record
    ordinal and field) and on duplicate record ids.
    """
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    records: list[BibRecord] = []
    seen_ids: set[str] = set()
    block: list[str] = []
    ordinal = 0

    def flush():
        nonlocal ordinal
        if not block:
            return
        ordinal += 1
        rec = _parse_block(block, ordinal)
        if rec.record_id in seen_ids:
            raise IngestError(f"duplicate record_id: {rec.record_id}")
        seen_ids.add(rec.record_id)
        records.append(rec)
        block.clear()

    for line in text.splitlines():
        if line.strip() == "":
            flush()
        else:
            block.append(line)
    flush()
    if not records:
        raise IngestError("empty corpus: no records found")
    return records


def attach_assignments(
    records: list[BibRecord], assignments: str | Path | TextIO
) -> tuple[list[BibRecord], int]:
    """Extend records with cluster assignments from a CSV file.

    Rows naming unknown record ids are skipped (coverage gaps are expected);
    returns the records and the number of skipped rows.  Duplicate
    (record, solution, cluster) triples collapse silently.
    """
    if isinstance(assignments, (str, Path)):
        fh: TextIO = io.StringIO(Path(assignments).read_text(encoding="utf-8"))
    else:
        fh = assignments
    by_id = {r.record_id: r for r in records}
    reader = csv.reader(fh)
    header = next(reader, None)
    if header is None:
        return records, 0
    skipped = 0
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != 3:
            raise IngestError(f"assignment line {lineno}: expected 3 columns, got {len(row)}")
        record_id, label, ck = row[0].strip(), row[1].strip().lower(), row[2].strip().lower()
        rec = by_id.get(record_id)
        if rec is None:
            skipped += 1
            continue
        pair = (label, ck)
        if pair not in rec.cluster_assignments:
            rec.cluster_assignments.append(pair)
    if skipped:
        log.warning("skipped %d assignment rows referencing unknown record ids", skipped)
    return records, skipped


def build_entity_inventory(
    records: list[BibRecord], terms: dict[str, list[str]] | None = None
) -> list[Entity]:
    """One Entity per distinct (type, key); occurrence_count is the number of
    distinct records referencing it.  Sorted by (type, key) for determinism."""
    counts: dict[tuple[EntityType, str], int] = defaultdict(int)
    for rec in records:
        keys = set(rec.entity_keys())
        for t in terms.get(rec.record_id, []) if terms else []:
            keys.add((EntityType.TOPICAL_TERM, entity_key(EntityType.TOPICAL_TERM, t)))
        for tk in keys:
            counts[tk] += 1
    return [
        Entity(entity_type=t, key=k, occurrence_count=c)
        for (t, k), c in sorted(counts.items(), key=lambda kv: (kv[0][0].value, kv[0][1]))
    ]


def solution_stats(records: list[BibRecord]) -> list[ClusterSolution]:
    """Per-solution cluster count and coverage over the given corpus."""
    clusters: dict[str, set[str]] = defaultdict(set)
    assigned: dict[str, set[str]] = defaultdict(set)
    for rec in records:
        for label, ck in rec.cluster_assignments:
            clusters[label].add(ck)
            assigned[label].add(rec.record_id)
    n = len(records)
    return [
        ClusterSolution(label=label, cluster_count=len(clusters[label]), coverage=len(assigned[label]) / n)
        for label in sorted(clusters)
    ]


def write_records(records: Iterable[BibRecord], path: str | Path) -> None:
    import json

    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec.to_dict(), sort_keys=True, ensure_ascii=False) + "\n")


def read_records(path: str | Path) -> list[BibRecord]:
    import json

    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                out.append(BibRecord.from_dict(json.loads(line)))
    return out
