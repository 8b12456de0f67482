"""Offline pipeline orchestration over a working directory.

Every stage records its parameters and input/output checksums in
manifest.json; a stage whose parameters and inputs are unchanged and whose
outputs still exist is skipped, so re-running the pipeline is cheap and the
manifest is sufficient to reproduce every artifact byte-exactly.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from ariadne import articles as art
from ariadne import clustering as clu
from ariadne import ingest as ing
from ariadne import lexical as lex
from ariadne import semindex as idx

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    pass


@dataclass
class Workdir:
    root: Path

    def __post_init__(self):
        self.root = Path(self.root)

    @property
    def corpus(self) -> Path:
        return self.root / "corpus.txt"

    @property
    def records(self) -> Path:
        return self.root / "records.jsonl"

    @property
    def vocabulary(self) -> Path:
        return self.root / "vocabulary.json"

    @property
    def terms(self) -> Path:
        return self.root / "terms.json"

    @property
    def index(self) -> Path:
        return self.root / "index.ardn"

    @property
    def article_matrix(self) -> Path:
        return self.root / "articles.amtx"

    @property
    def partitions(self) -> Path:
        return self.root / "partitions"

    @property
    def labels(self) -> Path:
        return self.root / "labels"

    @property
    def manifest_path(self) -> Path:
        return self.root / "manifest.json"

    def load_manifest(self) -> dict:
        if self.manifest_path.exists():
            return json.loads(self.manifest_path.read_text("utf-8"))
        return {"stages": {}}

    def save_manifest(self, manifest: dict) -> None:
        self.manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")


def sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _stage_current(manifest: dict, name: str, params: dict, inputs: list[Path], outputs: list[Path]) -> bool:
    entry = manifest["stages"].get(name)
    if entry is None:
        return False
    if entry["params"] != params:
        return False
    if entry["inputs"] != {str(p): sha256(p) for p in inputs if p.exists()}:
        return False
    return all(p.exists() for p in outputs) and entry["outputs"] == {
        str(p): sha256(p) for p in outputs
    }


def _record_stage(manifest: dict, name: str, params: dict, inputs: list[Path], outputs: list[Path]) -> None:
    manifest["stages"][name] = {
        "params": params,
        "inputs": {str(p): sha256(p) for p in inputs if p.exists()},
        "outputs": {str(p): sha256(p) for p in outputs},
    }


def stage_ingest(wd: Workdir, assignment_files: list[Path] | None = None, force: bool = False) -> None:
    assignment_files = sorted(assignment_files or [])
    manifest = wd.load_manifest()
    params = {"assignments": [str(p) for p in assignment_files]}
    inputs = [wd.corpus, *assignment_files]
    outputs = [wd.records]
    if not force and _stage_current(manifest, "ingest", params, inputs, outputs):
        log.info("ingest: up to date")
        return
    if not wd.corpus.exists():
        raise PipelineError(f"ingest: corpus not found at {wd.corpus}")
    records = ing.parse_corpus(wd.corpus)
    for path in assignment_files:
        records, skipped = ing.attach_assignments(records, path)
        if skipped:
            log.warning("ingest: %s: %d rows referenced unknown records", path, skipped)
    ing.write_records(records, wd.records)
    _record_stage(manifest, "ingest", params, inputs, outputs)
    wd.save_manifest(manifest)


def stage_extract(
    wd: Workdir,
    min_count: int = 5,
    mi_threshold: float = 3.0,
    stopword_file: Path | None = None,
    force: bool = False,
) -> None:
    manifest = wd.load_manifest()
    params = {
        "min_count": min_count,
        "mi_threshold": mi_threshold,
        "stopwords": str(stopword_file) if stopword_file else "builtin",
    }
    inputs = [wd.records] + ([stopword_file] if stopword_file else [])
    outputs = [wd.vocabulary, wd.terms]
    if not force and _stage_current(manifest, "extract", params, inputs, outputs):
        log.info("extract: up to date")
        return
    records = ing.read_records(wd.records)
    stopwords = lex.load_stopwords(stopword_file)
    vocab, term_lists = lex.extract_terms(records, stopwords, min_count=min_count, mi_threshold=mi_threshold)
    lex.index_subjects(records, vocab)
    wd.vocabulary.write_text(json.dumps(vocab.to_dict(), sort_keys=True) + "\n", "utf-8")
    wd.terms.write_text(json.dumps(term_lists, sort_keys=True) + "\n", "utf-8")
    _record_stage(manifest, "extract", params, inputs, outputs)
    wd.save_manifest(manifest)


def _load_extraction(wd: Workdir) -> tuple[lex.Vocabulary, dict[str, list[str]]]:
    vocab = lex.Vocabulary.from_dict(json.loads(wd.vocabulary.read_text("utf-8")))
    term_lists = json.loads(wd.terms.read_text("utf-8"))
    return vocab, term_lists


def stage_build_index(
    wd: Workdir,
    dim: int = idx.DEFAULT_DIM,
    seed: int = idx.DEFAULT_SEED,
    min_entity_count: int = idx.DEFAULT_MIN_ENTITY_COUNT,
    force: bool = False,
) -> None:
    manifest = wd.load_manifest()
    params = {"dim": dim, "seed": seed, "min_entity_count": min_entity_count}
    inputs = [wd.records, wd.vocabulary, wd.terms]
    outputs = [wd.index]
    if not force and _stage_current(manifest, "build-index", params, inputs, outputs):
        log.info("build-index: up to date")
        return
    records = ing.read_records(wd.records)
    vocab, term_lists = _load_extraction(wd)
    inventory = ing.build_entity_inventory(records, term_lists)
    entities = idx.select_entities(inventory, min_entity_count)
    cooc = idx.build_cooccurrence(records, entities, vocab, term_lists)
    sm = idx.project(cooc, entities, dim=dim, seed=seed)
    idx.save_index(sm, wd.index)
    _record_stage(manifest, "build-index", params, inputs, outputs)
    wd.save_manifest(manifest)


def stage_embed(wd: Workdir, force: bool = False) -> None:
    manifest = wd.load_manifest()
    params: dict = {}
    inputs = [wd.records, wd.terms, wd.index]
    outputs = [wd.article_matrix]
    if not force and _stage_current(manifest, "embed", params, inputs, outputs):
        log.info("embed: up to date")
        return
    records = ing.read_records(wd.records)
    _, term_lists = _load_extraction(wd)
    sm = idx.load_index(wd.index)
    inventory = ing.build_entity_inventory(records, term_lists)
    idf = art.compute_idf(inventory, len(records))
    am = art.embed_articles(records, sm, idf, term_lists)
    if am.zero_rows:
        log.warning("embed: %d articles with no resolvable entities", len(am.zero_rows))
    art.save_articles(am, wd.article_matrix)
    _record_stage(manifest, "embed", params, inputs, outputs)
    wd.save_manifest(manifest)


def stage_cluster(
    wd: Workdir,
    method: str = "kmeans",
    k: int = 31,
    knn: int = clu.KNN_K,
    threshold: float = clu.KNN_THRESHOLD,
    seed: int = 42,
    label: str | None = None,
    force: bool = False,
) -> Path:
    if label is None:
        label = "ok" if method == "kmeans" else "ol"
    manifest = wd.load_manifest()
    params = {"method": method, "k": k, "knn": knn, "threshold": threshold, "seed": seed, "label": label}
    inputs = [wd.article_matrix]
    out_path = wd.partitions / f"{label}.csv"
    if not force and _stage_current(manifest, f"cluster:{label}", params, inputs, [out_path]):
        log.info("cluster %s: up to date", label)
        return out_path
    am = art.load_articles(wd.article_matrix)
    if method == "kmeans":
        p = clu.kmeans(am, k=k, seed=seed, label=label)
    elif method == "louvain":
        net = clu.knn_graph(am, k=knn, threshold=threshold)
        p = clu.louvain(net, seed=seed, label=label)
    else:
        raise PipelineError(f"unknown clustering method: {method}")
    wd.partitions.mkdir(parents=True, exist_ok=True)
    clu.export_partition(p, out_path)
    _record_stage(manifest, f"cluster:{label}", params, inputs, [out_path])
    wd.save_manifest(manifest)
    return out_path


def stage_label(wd: Workdir, solution: str, n_terms: int = 10, force: bool = False) -> Path:
    manifest = wd.load_manifest()
    params = {"solution": solution, "n_terms": n_terms}
    part_path = wd.partitions / f"{solution}.csv"
    inputs = [wd.index, wd.article_matrix, part_path]
    out_path = wd.labels / f"{solution}.csv"
    if not force and _stage_current(manifest, f"label:{solution}", params, inputs, [out_path]):
        log.info("label %s: up to date", solution)
        return out_path
    if not part_path.exists():
        raise PipelineError(f"label: partition file not found: {part_path}")
    sm = idx.load_index(wd.index)
    am = art.load_articles(wd.article_matrix)
    p = clu.import_partition(part_path)
    labels = clu.label_clusters(p, sm, n_terms=n_terms, am=am)
    wd.labels.mkdir(parents=True, exist_ok=True)
    lines = ["cluster_key,label"]
    for ck in sorted(labels):
        lines.append(f'{ck},"{labels[ck]}"')
    out_path.write_text("\n".join(lines) + "\n", "utf-8")
    _record_stage(manifest, f"label:{solution}", params, inputs, [out_path])
    wd.save_manifest(manifest)
    return out_path


def run_all(
    wd: Workdir,
    assignment_files: list[Path] | None = None,
    min_count: int = 5,
    mi_threshold: float = 3.0,
    dim: int = idx.DEFAULT_DIM,
    seed: int = idx.DEFAULT_SEED,
    min_entity_count: int = idx.DEFAULT_MIN_ENTITY_COUNT,
    kmeans_k: int = 31,
    force: bool = False,
) -> None:
    """All stages in dependency order; failures surface with the stage name."""
    stages = [
        ("ingest", lambda: stage_ingest(wd, assignment_files, force=force)),
        ("extract", lambda: stage_extract(wd, min_count, mi_threshold, force=force)),
        ("build-index", lambda: stage_build_index(wd, dim, seed, min_entity_count, force=force)),
        ("embed", lambda: stage_embed(wd, force=force)),
        ("cluster:kmeans", lambda: stage_cluster(wd, "kmeans", k=kmeans_k, seed=seed, force=force)),
        ("cluster:louvain", lambda: stage_cluster(wd, "louvain", seed=seed, force=force)),
        ("label:ok", lambda: stage_label(wd, "ok", force=force)),
        ("label:ol", lambda: stage_label(wd, "ol", force=force)),
    ]
    for name, fn in stages:
        try:
            fn()
        except Exception as exc:
            raise PipelineError(f"stage {name} failed: {exc}") from exc
