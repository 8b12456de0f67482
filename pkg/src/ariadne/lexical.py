"""Topical-term extraction from titles and abstracts.

Single words plus two-word phrases: adjacent non-stopword token pairs are
admitted as phrases when their pointwise mutual information clears a
threshold, and every kept unit must meet a document-frequency floor.
"""

from __future__ import annotations

import math
import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from ariadne.records import BibRecord

# Tokens are runs of letters/digits joined by internal hyphens or periods,
# so "t-crit" and "3.88" survive as single tokens.
_TOKEN_RE = re.compile(r"[0-9a-z]+(?:[-.][0-9a-z]+)*")

TERM_KIND = "term"
SUBJECT_KIND = "subject"


class ExtractionError(ValueError):
    pass


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def load_stopwords(path: str | Path | None = None) -> set[str]:
    """One word per line; blank lines ignored.  Default list ships with the
    package (the original multilingual list is not public, so extracted term
    sets are list-dependent)."""
    if path is None:
        text = resources.files("ariadne.data").joinpath("stopwords.txt").read_text("utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return {w.strip() for w in text.splitlines() if w.strip()}


@dataclass
class Vocabulary:
    """Column space of the co-occurrence matrix: topical terms and subjects.

    A string present both as term and subject occupies two distinct columns.
    """

    units: list[tuple[str, str]] = field(default_factory=list)  # (kind, value)
    df: dict[tuple[str, str], int] = field(default_factory=dict)
    _index: dict[tuple[str, str], int] = field(default_factory=dict)

    def add(self, kind: str, value: str, df: int) -> int:
        unit = (kind, value)
        if unit in self._index:
            return self._index[unit]
        idx = len(self.units)
        self.units.append(unit)
        self._index[unit] = idx
        self.df[unit] = df
        return idx

    def index(self, kind: str, value: str) -> int | None:
        return self._index.get((kind, value))

    def __len__(self) -> int:
        return len(self.units)

    def to_dict(self) -> dict:
        return {"units": [list(u) for u in self.units], "df": [self.df[u] for u in self.units]}

    @classmethod
    def from_dict(cls, d: dict) -> "Vocabulary":
        v = cls()
        for (kind, value), df in zip(d["units"], d["df"]):
            v.add(kind, value, df)
        return v


def _token_streams(rec: BibRecord) -> list[list[str]]:
    # Title and abstract are separate streams: no phrase spans the boundary.
    return [tokenize(rec.title), tokenize(rec.abstract)]


def pmi_table(records: list[BibRecord], stopwords: set[str]) -> dict[tuple[str, str], float]:
    """PMI in bits for every adjacent non-stopword token pair, estimated from
    token and adjacent-pair frequencies over the whole corpus."""
    unigrams: Counter = Counter()
    pairs: Counter = Counter()
    total = 0
    for rec in records:
        for stream in _token_streams(rec):
            total += len(stream)
            unigrams.update(stream)
            for a, b in zip(stream, stream[1:]):
                if a not in stopwords and b not in stopwords:
                    pairs[(a, b)] += 1
    if total == 0:
        return {}
    out = {}
    for (a, b), c in pairs.items():
        out[(a, b)] = math.log2(c * total / (unigrams[a] * unigrams[b]))
    return out


def extract_terms(
    records: list[BibRecord],
    stopwords: set[str],
    min_count: int = 5,
    mi_threshold: float = 3.0,
) -> tuple[Vocabulary, dict[str, list[str]]]:
    """Extract per-record topical terms and the term vocabulary.

    Greedy left-to-right matching: an accepted bigram consumes both tokens,
    so its components are not additionally counted at that position.  Kept
    units need document frequency >= min_count.  Returns the vocabulary and
    a record_id -> ordered deduplicated term list mapping.
    """
    if not records:
        raise ExtractionError("empty corpus")
    if min_count < 1:
        raise ExtractionError("min_count must be >= 1")

    pmi = pmi_table(records, stopwords)
    bigrams = {p for p, v in pmi.items() if v >= mi_threshold}

    raw_terms: dict[str, list[str]] = {}
    df: Counter = Counter()
    for rec in records:
        seen: set[str] = set()
        ordered: list[str] = []
        for stream in _token_streams(rec):
            i = 0
            while i < len(stream):
                tok = stream[i]
                if tok in stopwords:
                    i += 1
                    continue
                if i + 1 < len(stream) and stream[i + 1] not in stopwords and (tok, stream[i + 1]) in bigrams:
                    term = f"{tok} {stream[i + 1]}"
                    i += 2
                else:
                    term = tok
                    i += 1
                if term not in seen:
                    seen.add(term)
                    ordered.append(term)
        raw_terms[rec.record_id] = ordered
        df.update(seen)

    vocab = Vocabulary()
    for term in sorted(t for t, c in df.items() if c >= min_count):
        vocab.add(TERM_KIND, term, df[term])
    term_lists = {
        rid: [t for t in terms if vocab.index(TERM_KIND, t) is not None]
        for rid, terms in raw_terms.items()
    }
    return vocab, term_lists


def index_subjects(records: list[BibRecord], vocab: Vocabulary) -> Vocabulary:
    """Extend the vocabulary with one column per distinct subject string."""
    df: dict[str, int] = defaultdict(int)
    for rec in records:
        for s in set(rec.subjects):
            df[s] += 1
    for s in sorted(df):
        vocab.add(SUBJECT_KIND, s, df[s])
    return vocab
