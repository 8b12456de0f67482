"""Typed query parsing, exact cosine ranking, outlier filtering, and context
graph assembly.

A query is any mix of bracketed entities ("[author:smak j]") and bare words,
which resolve to topical terms by greedy longest match (bigram first).  A
query that resolves to nothing yields an empty graph, never an error.
"""

from __future__ import annotations

import math
import re
import zlib
from dataclasses import dataclass, field

import numpy as np

from ariadne.articles import ArticleMatrix, IdfTable, related_articles
from ariadne.layout import spring_layout
from ariadne.records import Entity, EntityType, PREFIX_TYPE, entity_key
from ariadne.semindex import SemanticMatrix

DEFAULT_SHOW = 40
LINK_THRESHOLD = 0.6
TOP_LINKS = 5
MAHALANOBIS_QUANTILE = 0.95
RELATED_ARTICLE_COUNT = 20
SCAN_MIN_CLUSTER_ARTICLES = 100

_BRACKET_RE = re.compile(r"\[([^\[\]]+)\]")


@dataclass
class Query:
    raw: str
    parts: list[Entity] = field(default_factory=list)
    dropped: list[str] = field(default_factory=list)
    scan: bool = False
    type_filter: set[EntityType] = field(default_factory=set)
    show: int = DEFAULT_SHOW
    prefixes: list[str] = field(default_factory=list)  # scan mode only


@dataclass
class ContextGraph:
    query_node: dict | None = None
    nodes: list[dict] = field(default_factory=list)
    edges: list[dict] = field(default_factory=list)
    related_articles: list[dict] = field(default_factory=list)
    related_by_type: dict[str, list[dict]] = field(default_factory=dict)
    note: str = ""

    def to_dict(self) -> dict:
        return {
            "query_node": self.query_node,
            "nodes": self.nodes,
            "edges": self.edges,
            "related_articles": self.related_articles,
            "related_by_type": self.related_by_type,
            "note": self.note,
        }


def parse_query(
    raw: str,
    sm: SemanticMatrix,
    scan: bool = False,
    type_filter: set[EntityType] | None = None,
    show: int = DEFAULT_SHOW,
) -> Query:
    """Resolve bracketed segments to typed entities and the remaining text to
    topical terms; unresolvable parts are dropped with a note."""
    q = Query(raw=raw, scan=scan, type_filter=type_filter or set(), show=show)
    rest = raw
    for m in _BRACKET_RE.finditer(raw):
        inner = m.group(1).strip().lower()
        prefix = inner.split(":", 1)[0]
        key = inner if prefix in PREFIX_TYPE or prefix == "term" else None
        if scan:
            if key is not None:
                q.prefixes.append(key)
            else:
                q.dropped.append(m.group(0))
        else:
            i = sm.row_index.get(key) if key else None
            if i is None:
                q.dropped.append(m.group(0))
            else:
                q.parts.append(sm.entities[i])
        rest = rest.replace(m.group(0), " ", 1)
    words = rest.lower().split()
    if scan and words:
        # Bare words in scan mode are prefixes too (e.g. "cluster:c").
        for w in words:
            if w.split(":", 1)[0] in PREFIX_TYPE or ":" in w:
                q.prefixes.append(w)
            else:
                q.dropped.append(w)
        return q
    i = 0
    while i < len(words):
        hit = None
        if i + 1 < len(words):
            bigram = f"{words[i]} {words[i + 1]}"
            hit = sm.row_index.get(entity_key(EntityType.TOPICAL_TERM, bigram))
            if hit is not None:
                q.parts.append(sm.entities[hit])
                i += 2
                continue
        hit = sm.row_index.get(entity_key(EntityType.TOPICAL_TERM, words[i]))
        if hit is not None:
            q.parts.append(sm.entities[hit])
        else:
            q.dropped.append(words[i])
        i += 1
    return q


def query_vector(q: Query, sm: SemanticMatrix, idf: IdfTable) -> np.ndarray:
    """idf-cubed weighted average of the part vectors, the same construction
    used for article vectors.  Falls back to a uniform average when every
    part has zero weight."""
    if not q.parts:
        raise ValueError("query has no resolved parts")
    acc = np.zeros(sm.dim, dtype=np.float64)
    wsum = 0.0
    for e in q.parts:
        w = idf.weight(e.key)
        acc += w * sm.row(e.key).astype(np.float64)
        wsum += w
    if wsum <= 0.0:
        for e in q.parts:
            acc += sm.row(e.key).astype(np.float64)
        wsum = float(len(q.parts))
    return acc / wsum


def rank(
    v: np.ndarray,
    sm: SemanticMatrix,
    type_filter: set[EntityType] | None = None,
    n: int = DEFAULT_SHOW,
    exclude: set[str] | None = None,
    pool_factor: int = 3,
) -> list[tuple[int, float]]:
    """Exact cosine ranking over every row passing the type filter.

    Returns up to pool_factor*n (row, cosine) pairs, sorted by cosine then by
    (occurrence_count desc, key asc).
    """
    v = np.asarray(v, dtype=np.float64)
    vn = np.linalg.norm(v)
    if vn == 0.0:
        return []
    cos = np.zeros(len(sm.entities))
    nz = sm.norms > 0
    cos[nz] = (sm.vectors.astype(np.float64)[nz] @ v) / (sm.norms[nz] * vn)
    exclude = exclude or set()
    candidates = [
        i
        for i, e in enumerate(sm.entities)
        if nz[i]
        and e.key not in exclude
        and (not type_filter or e.entity_type in type_filter)
    ]
    candidates.sort(key=lambda i: (-cos[i], -sm.entities[i].occurrence_count, sm.entities[i].key))
    return [(i, float(cos[i])) for i in candidates[: pool_factor * n]]


def mahalanobis_filter(
    pool: list[tuple[int, float]],
    v: np.ndarray,
    sm: SemanticMatrix,
    quantile: float = MAHALANOBIS_QUANTILE,
    n: int = DEFAULT_SHOW,
) -> list[tuple[int, float]]:
    """Drop pool members whose variance-scaled squared distance to the query
    exceeds the pool's quantile; zero-variance dimensions are skipped and at
    least min(n, half the pool) survivors are kept."""
    if not pool:
        return []
    var = sm.variance.copy()
    usable = var > 0
    if not usable.any():
        return list(pool)
    rows = sm.vectors.astype(np.float64)[[i for i, _ in pool]][:, usable]
    diff = rows - np.asarray(v, dtype=np.float64)[usable]
    d2 = (diff * diff / var[usable]).sum(axis=1)
    thresh = float(np.quantile(d2, quantile))
    keep = [j for j in range(len(pool)) if d2[j] <= thresh]
    floor = min(n, math.ceil(len(pool) / 2))
    if len(keep) < floor:
        keep = sorted(range(len(pool)), key=lambda j: d2[j])[:floor]
        keep.sort()
    return [pool[j] for j in keep]


def _pairwise_cosine(vectors: np.ndarray) -> np.ndarray:
    v = vectors.astype(np.float64)
    norms = np.linalg.norm(v, axis=1)
    norms[norms == 0] = 1.0
    unit = v / norms[:, None]
    return unit @ unit.T


def _top5_edges(
    keys: list[str],
    cos: np.ndarray,
    threshold: float,
    top_lists: dict[int, list[int]] | None = None,
) -> list[dict]:
    """Each node links to its top-5 most similar displayed nodes at or above
    the threshold; reciprocal membership marks the edge mutual."""
    n = len(keys)
    tops: dict[int, list[int]] = top_lists or {}
    for i in range(n):
        if i in tops:
            continue
        order = sorted((j for j in range(n) if j != i), key=lambda j: (-cos[i, j], keys[j]))
        tops[i] = [j for j in order[:TOP_LINKS] if cos[i, j] >= threshold]
    edges: dict[tuple[int, int], dict] = {}
    for i, nbrs in tops.items():
        for j in nbrs:
            a, b = min(i, j), max(i, j)
            mutual = i in tops.get(j, [])
            prev = edges.get((a, b))
            if prev is None:
                edges[(a, b)] = {
                    "source": keys[i],
                    "target": keys[j],
                    "weight": round(float(cos[i, j]), 6),
                    "mutual": mutual,
                    "kind": "node",
                }
            else:
                prev["mutual"] = prev["mutual"] or mutual
    return [edges[k] for k in sorted(edges)]


def _node_dict(e: Entity, cosine: float) -> dict:
    return {
        "key": e.key,
        "type": e.entity_type.value,
        "cosine": round(float(cosine), 6),
        "occurrence": e.occurrence_count,
        "size": round(math.log(e.occurrence_count), 6),
    }


def layout_seed(raw: str) -> int:
    return zlib.crc32(raw.encode("utf-8"))


def build_graph(
    survivors: list[tuple[int, float]],
    v: np.ndarray,
    q: Query,
    sm: SemanticMatrix,
    am: ArticleMatrix | None = None,
    titles: dict[str, str] | None = None,
    show: int = DEFAULT_SHOW,
    threshold: float = LINK_THRESHOLD,
    layout_iterations: int = 120,
) -> ContextGraph:
    """Assemble the displayed neighborhood: top-show nodes, top-5 links with
    mutuality flags, 2D positions, related articles and per-type lists."""
    shown = survivors[:show]
    graph = ContextGraph()
    if q.dropped:
        graph.note = "unresolved: " + ", ".join(q.dropped)
    if not shown:
        return graph

    ents = [sm.entities[i] for i, _ in shown]
    keys = [e.key for e in ents]
    graph.nodes = [_node_dict(e, c) for (_, c), e in zip(shown, ents)]

    vectors = sm.vectors[[i for i, _ in shown]]
    has_query = bool(q.parts)
    if has_query:
        all_vectors = np.vstack([vectors, np.asarray(v, dtype=np.float32)[None, :]])
        all_keys = keys + ["__query__"]
    else:
        all_vectors = vectors
        all_keys = keys
    cos = _pairwise_cosine(all_vectors)

    top_lists: dict[int, list[int]] | None = None
    if has_query:
        # The query's links are rank-based (its actual top-5), threshold-exempt.
        top_lists = {len(keys): list(range(min(TOP_LINKS, len(keys))))}
    edges = _top5_edges(all_keys, cos, threshold, top_lists)
    for e in edges:
        if "__query__" in (e["source"], e["target"]):
            e["kind"] = "query"
    graph.edges = edges

    if has_query:
        qe = q.parts[0]
        graph.query_node = {
            "id": "__query__",  # edge endpoints use this id
            "key": qe.key if len(q.parts) == 1 else q.raw,
            "type": qe.entity_type.value if len(q.parts) == 1 else "composite",
            "is_query": True,
            "occurrence": qe.occurrence_count if len(q.parts) == 1 else 0,
        }

    # Positions: nodes plus the query node, normalized to the unit square.
    index_of = {k: i for i, k in enumerate(all_keys)}
    layout_edges = [
        (index_of[e["source"]], index_of[e["target"]], e["weight"]) for e in graph.edges
    ]
    pos = spring_layout(len(all_keys), layout_edges, iterations=layout_iterations, seed=layout_seed(q.raw))
    for node, (x, y) in zip(graph.nodes, pos):
        node["x"] = round(float(x), 6)
        node["y"] = round(float(y), 6)
    if has_query and graph.query_node is not None:
        graph.query_node["x"] = round(float(pos[-1, 0]), 6)
        graph.query_node["y"] = round(float(pos[-1, 1]), 6)

    by_type: dict[str, list[dict]] = {}
    for node in graph.nodes:
        by_type.setdefault(node["type"], []).append({"key": node["key"], "cosine": node["cosine"]})
    graph.related_by_type = by_type

    if am is not None and np.linalg.norm(v) > 0:
        rel = related_articles(v, am, RELATED_ARTICLE_COUNT)
        graph.related_articles = [
            {
                "record_id": rid,
                "cosine": round(c, 6),
                "title": (titles or {}).get(rid, ""),
            }
            for rid, c in rel
        ]
    return graph


def context_graph(
    raw: str,
    sm: SemanticMatrix,
    idf: IdfTable,
    am: ArticleMatrix | None = None,
    titles: dict[str, str] | None = None,
    show: int = DEFAULT_SHOW,
    type_filter: set[EntityType] | None = None,
    scan: bool = False,
    threshold: float = LINK_THRESHOLD,
    quantile: float = MAHALANOBIS_QUANTILE,
    min_articles: int | None = None,
    layout_iterations: int = 120,
) -> ContextGraph:
    """End-to-end query evaluation: parse, rank, filter, assemble."""
    q = parse_query(raw, sm, scan=scan, type_filter=type_filter, show=show)
    if scan:
        return scan_graph(
            q, sm, min_articles=min_articles, show=show, threshold=threshold,
            layout_iterations=layout_iterations,
        )
    if not q.parts:
        note = "no known entities in query"
        if q.dropped:
            note += ": " + ", ".join(q.dropped)
        return ContextGraph(note=note)
    v = query_vector(q, sm, idf)
    exclude = {e.key for e in q.parts}
    pool = rank(v, sm, type_filter=q.type_filter, n=show, exclude=exclude)
    survivors = mahalanobis_filter(pool, v, sm, quantile=quantile, n=show)
    return build_graph(
        survivors, v, q, sm, am=am, titles=titles, show=show,
        threshold=threshold, layout_iterations=layout_iterations,
    )


def scan_graph(
    q: Query,
    sm: SemanticMatrix,
    min_articles: int | None = None,
    show: int = DEFAULT_SHOW,
    threshold: float = LINK_THRESHOLD,
    layout_iterations: int = 120,
) -> ContextGraph:
    """All entities matching the scan prefixes, small clusters suppressed.

    Cluster scans default to a 100-article floor; other types to 1.  Multiple
    prefixes overlay into one graph; there is no query node.
    """
    graph = ContextGraph()
    if q.dropped:
        graph.note = "unresolved: " + ", ".join(q.dropped)
    if not q.prefixes:
        return graph
    if min_articles is None:
        all_cluster = all(p.split(":", 1)[0] == "cluster" for p in q.prefixes)
        min_articles = SCAN_MIN_CLUSTER_ARTICLES if all_cluster else 1
    rows = [
        i
        for i, e in enumerate(sm.entities)
        if e.occurrence_count >= min_articles
        and sm.norms[i] > 0
        and any(e.key.startswith(p) for p in q.prefixes)
    ]
    rows.sort(key=lambda i: (-sm.entities[i].occurrence_count, sm.entities[i].key))
    rows = rows[:show]
    if not rows:
        return graph
    ents = [sm.entities[i] for i in rows]
    keys = [e.key for e in ents]
    cos = _pairwise_cosine(sm.vectors[rows])
    graph.nodes = [_node_dict(e, 0.0) for e in ents]
    graph.edges = _top5_edges(keys, cos, threshold)
    index_of = {k: i for i, k in enumerate(keys)}
    layout_edges = [(index_of[e["source"]], index_of[e["target"]], e["weight"]) for e in graph.edges]
    pos = spring_layout(len(keys), layout_edges, iterations=layout_iterations, seed=layout_seed(q.raw))
    for node, (x, y) in zip(graph.nodes, pos):
        node["x"] = round(float(x), 6)
        node["y"] = round(float(y), 6)
    by_type: dict[str, list[dict]] = {}
    for node in graph.nodes:
        by_type.setdefault(node["type"], []).append({"key": node["key"], "cosine": node["cosine"]})
    graph.related_by_type = by_type
    return graph
