import itertools
import math
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from ariadne import lexical as lex
from ariadne.records import BibRecord


class TestTokenize:
    def test_title_example(self):
        assert lex.tokenize("On the Mass Transfer Rate in SS Cyg") == [
            "on", "the", "mass", "transfer", "rate", "in", "ss", "cyg",
        ]

    def test_empty(self):
        assert lex.tokenize("") == []

    def test_internal_hyphen_and_decimal(self):
        assert lex.tokenize("T-crit(0) = 3.88") == ["t-crit", "0", "3.88"]

    def test_numbers_kept(self):
        assert lex.tokenize("log tr 42") == ["log", "tr", "42"]

    @given(st.text(max_size=80))
    def test_tokens_are_lowercase_and_wellformed(self, text):
        for tok in lex.tokenize(text):
            assert tok == tok.lower()
            assert lex.tokenize(tok) == [tok]


def _rec(rid, text):
    return BibRecord(record_id=rid, title=text)


def brute_force_pmi(records, stopwords):
    """Independent PMI oracle: explicit counts, log2 arithmetic."""
    unigrams = Counter()
    pairs = Counter()
    total = 0
    for r in records:
        for stream in (lex.tokenize(r.title), lex.tokenize(r.abstract)):
            total += len(stream)
            unigrams.update(stream)
            for a, b in zip(stream, stream[1:]):
                if a not in stopwords and b not in stopwords:
                    pairs[(a, b)] += 1
    return {
        p: math.log2((c / total) / ((unigrams[p[0]] / total) * (unigrams[p[1]] / total)))
        for p, c in pairs.items()
    }


def planted_corpus():
    """20 docs: "alpha beta" always adjacent (high PMI); "gamma" and "delta"
    appear independently so their adjacency PMI is near zero."""
    filler = ["x1", "x2", "x3", "x4", "x5", "x6", "x7", "x8"]
    records = []
    for i in range(20):
        words = []
        words += ["alpha", "beta"]
        words += [filler[(i + j) % len(filler)] for j in range(4)]
        # gamma/delta co-occur adjacently only sometimes, mimicking chance.
        words.append("gamma" if i % 2 == 0 else "delta")
        words.append("delta" if i % 2 == 0 else "gamma")
        records.append(_rec(f"d{i}", " ".join(words)))
    return records


class TestExtractTerms:
    def test_planted_bigram_kept_independent_pair_rejected(self):
        records = planted_corpus()
        oracle = brute_force_pmi(records, set())
        assert oracle[("alpha", "beta")] >= 3
        assert oracle[("gamma", "delta")] < 3
        vocab, _ = lex.extract_terms(records, set(), min_count=2, mi_threshold=3.0)
        units = set(vocab.units)
        assert (lex.TERM_KIND, "alpha beta") in units
        assert (lex.TERM_KIND, "gamma delta") not in units

    def test_pmi_matches_oracle_exactly(self):
        records = planted_corpus()
        assert lex.pmi_table(records, set()) == pytest.approx(brute_force_pmi(records, set()))

    def test_min_count_floor(self):
        records = [_rec("a", "common word here"), _rec("b", "common word again"), _rec("c", "rare")]
        vocab, _ = lex.extract_terms(records, set(), min_count=2, mi_threshold=100.0)
        assert vocab.index(lex.TERM_KIND, "common") is not None
        assert vocab.index(lex.TERM_KIND, "rare") is None

    def test_no_unit_below_floor(self):
        vocab, _ = lex.extract_terms(planted_corpus(), {"x1"}, min_count=3, mi_threshold=3.0)
        assert all(df >= 3 for df in vocab.df.values())

    def test_bigram_consumes_components(self):
        records = [_rec(f"r{i}", "alpha beta end") for i in range(5)]
        vocab, terms = lex.extract_terms(records, set(), min_count=2, mi_threshold=0.1)
        assert terms["r0"] == ["alpha beta", "end"]

    def test_stopword_blocks_bigram(self):
        records = [_rec(f"r{i}", "alpha the beta") for i in range(5)]
        _, terms = lex.extract_terms(records, {"the"}, min_count=2, mi_threshold=-10.0)
        assert terms["r0"] == ["alpha", "beta"]

    def test_empty_corpus_raises(self):
        with pytest.raises(lex.ExtractionError):
            lex.extract_terms([], set(), min_count=1)

    def test_dropped_terms_absent_from_lists(self):
        records = [_rec("a", "keepme dropme"), _rec("b", "keepme")]
        _, terms = lex.extract_terms(records, set(), min_count=2, mi_threshold=100.0)
        assert terms["a"] == ["keepme"]

    def test_index_assignment_stable_across_reruns(self):
        records = planted_corpus()
        v1, t1 = lex.extract_terms(records, {"x2"}, min_count=2, mi_threshold=3.0)
        v2, t2 = lex.extract_terms(records, {"x2"}, min_count=2, mi_threshold=3.0)
        assert v1.units == v2.units and t1 == t2


class TestSubjects:
    def test_subject_and_term_occupy_two_columns(self):
        records = [
            BibRecord(record_id="a", title="stars stars", subjects=["stars"]),
            BibRecord(record_id="b", title="stars", subjects=["stars"]),
        ]
        vocab, _ = lex.extract_terms(records, set(), min_count=1)
        lex.index_subjects(records, vocab)
        ti = vocab.index(lex.TERM_KIND, "stars")
        si = vocab.index(lex.SUBJECT_KIND, "stars")
        assert ti is not None and si is not None and ti != si

    def test_no_subjects_no_extension(self):
        records = [_rec("a", "just words here")]
        vocab, _ = lex.extract_terms(records, set(), min_count=1)
        n = len(vocab)
        lex.index_subjects(records, vocab)
        assert len(vocab) == n

    def test_column_count_is_terms_plus_subjects(self):
        records = [
            BibRecord(record_id="a", title="one two", subjects=["s1", "s2"]),
            BibRecord(record_id="b", title="one two", subjects=["s3"]),
        ]
        vocab, _ = lex.extract_terms(records, set(), min_count=1, mi_threshold=100.0)
        n_terms = len(vocab)
        lex.index_subjects(records, vocab)
        assert len(vocab) == n_terms + 3


def test_default_stopword_list_loads():
    sw = lex.load_stopwords()
    assert "the" in sw and len(sw) > 50


def test_stopword_file_loads(tmp_path):
    p = tmp_path / "sw.txt"
    p.write_text("foo\nbar\n\n")
    assert lex.load_stopwords(p) == {"foo", "bar"}
