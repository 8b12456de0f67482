import io
import csv

import pytest

from ariadne import articles as art
from ariadne import ingest as ing
from ariadne import lexical as lex
from ariadne import pipeline as pl
from ariadne import semindex as idx
from ariadne.synth import write_synth_corpus

TINY_CORPUS = """\
ID\tR1
TI\tOn the Mass Transfer Rate in SS Cyg
AB\tmass transfer in quiescence drives the accretion disc
AU\tsmak j
SN\t0001-5237
SU\tstars
SU\taccretion
CI\tsmak j, 1996, acta astronom, v46, p377
CL\thd 1
CL\thd 18

ID\tR2
TI\tmass transfer and accretion in cataclysmic variables
AB\t
AU\tother a
AU\tsmak j
SN\t0001-5237
SU\taccretion
CI\tsmak j, 1996, acta astronom, v46, p377
CI\twarner b, 1995, cataclysmic variable stars

ID\tR3
TI\tquiescence of dwarf novae with mass transfer episodes
AB\tthe disc instability model explains dwarf novae
AU\tsmak j
SN\t0004-637x
SU\tstars
CL\tc 2
"""


@pytest.fixture
def tiny_records():
    return ing.parse_corpus(io.StringIO(TINY_CORPUS))


def build_small_index(records, min_count=1, mi_threshold=3.0, dim=64, seed=42, min_entity_count=1):
    """Full offline build on an in-memory corpus; low floors so tiny
    fixtures keep all their entities."""
    stopwords = {"on", "the", "in", "and", "of", "with", "a"}
    vocab, terms = lex.extract_terms(records, stopwords, min_count=min_count, mi_threshold=mi_threshold)
    lex.index_subjects(records, vocab)
    inventory = ing.build_entity_inventory(records, terms)
    entities = idx.select_entities(inventory, min_entity_count)
    cooc = idx.build_cooccurrence(records, entities, vocab, terms)
    sm = idx.project(cooc, entities, dim=dim, seed=seed)
    idf = art.compute_idf(inventory, len(records))
    am = art.embed_articles(records, sm, idf, terms)
    return sm, am, idf, vocab, terms, inventory


@pytest.fixture
def tiny_index(tiny_records):
    return build_small_index(tiny_records)


def _write_scan_assignments(path, record_ids):
    """Solution "c": cluster 1 with 99 members, cluster 2 with 100 members."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["record_id", "solution_label", "cluster_key"])
        for rid in record_ids[:99]:
            w.writerow([rid, "c", "1"])
        for rid in record_ids[99:199]:
            w.writerow([rid, "c", "2"])


@pytest.fixture(scope="session")
def built_workdir(tmp_path_factory):
    """Synthetic 500-article, 5-topic corpus run through the whole pipeline
    (dim=100 to keep the session fast)."""
    root = tmp_path_factory.mktemp("workdir")
    write_synth_corpus(root, n_articles=500, n_topics=5, seed=7)
    wd = pl.Workdir(root)
    record_ids = [f"SYN:{i:06d}" for i in range(500)]
    scan_path = root / "scanfix.csv"
    _write_scan_assignments(scan_path, record_ids)
    pl.stage_ingest(wd, [root / "truth.csv", scan_path])
    pl.stage_extract(wd, min_count=5, mi_threshold=3.0)
    pl.stage_build_index(wd, dim=100, seed=42)
    pl.stage_embed(wd)
    return wd


@pytest.fixture(scope="session")
def built_artifacts(built_workdir):
    sm = idx.load_index(built_workdir.index)
    am = art.load_articles(built_workdir.article_matrix)
    records = ing.read_records(built_workdir.records)
    import json

    terms = json.loads(built_workdir.terms.read_text("utf-8"))
    inventory = ing.build_entity_inventory(records, terms)
    idf = art.compute_idf(inventory, len(records))
    return sm, am, idf, records
