"""In-house article clustering: spherical K-Means and a top-40 similarity
network with Louvain communities, plus partition comparison (NMI) and
cluster labelling.
"""

from __future__ import annotations

import csv
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

from ariadne.articles import ArticleMatrix, IdfTable
from ariadne.records import EntityType, cluster_key
from ariadne.semindex import SemanticMatrix

KNN_K = 40
KNN_THRESHOLD = 0.6


class ClusteringError(ValueError):
    pass


@dataclass
class Partition:
    solution_label: str
    assignment: dict[str, str]  # record_id -> cluster_key
    unconnected: set[str] = field(default_factory=set)

    @property
    def cluster_sizes(self) -> dict[str, int]:
        return dict(Counter(self.assignment.values()))

    @property
    def cluster_count(self) -> int:
        return len(set(self.assignment.values()))


@dataclass
class SimilarityNetwork:
    nodes: list[str]
    edges: list[tuple[str, str, float]]  # symmetrized, weight = cosine >= threshold

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.nodes)
        g.add_weighted_edges_from(self.edges)
        return g


def _normalized_nonzero(am: ArticleMatrix) -> tuple[np.ndarray, list[str]]:
    ids = [r for r in am.record_ids if r not in am.zero_rows]
    idx = [i for i, r in enumerate(am.record_ids) if r not in am.zero_rows]
    v = am.vectors[idx].astype(np.float64)
    norms = np.linalg.norm(v, axis=1)
    norms[norms == 0] = 1.0
    return v / norms[:, None], ids


def kmeans(
    am: ArticleMatrix,
    k: int,
    seed: int = 42,
    max_iter: int = 100,
    label: str = "ok",
) -> Partition:
    """Lloyd iterations on L2-normalized rows (cosine geometry), k-means++
    init; empty clusters are re-seeded with the point farthest from its
    centroid.  Zero rows are excluded."""
    x, ids = _normalized_nonzero(am)
    n = len(ids)
    if k < 2:
        raise ClusteringError("k must be >= 2")
    if k > n:
        raise ClusteringError(f"k={k} exceeds {n} nonzero articles")
    rng = np.random.Generator(np.random.Philox(key=[np.uint64(seed), np.uint64(1)]))

    # k-means++ seeding.
    centers = np.empty((k, x.shape[1]))
    first = int(rng.integers(n))
    centers[0] = x[first]
    d2 = ((x - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c] = x[int(rng.integers(n))]
        else:
            centers[c] = x[int(rng.choice(n, p=d2 / total))]
        d2 = np.minimum(d2, ((x - centers[c]) ** 2).sum(axis=1))

    assign = np.full(n, -1, dtype=int)
    for _ in range(max_iter):
        # ||x - c||^2 ranking reduces to x.c - ||c||^2/2 on fixed-norm rows.
        scores = x @ centers.T - 0.5 * (centers * centers).sum(axis=1)
        new_assign = np.argmax(scores, axis=1)
        for c in range(k):
            members = new_assign == c
            if members.any():
                centers[c] = x[members].mean(axis=0)
            else:
                dist = ((x - centers[new_assign]) ** 2).sum(axis=1)
                far = int(np.argmax(dist))
                centers[c] = x[far]
                new_assign[far] = c
        if (new_assign == assign).all():
            break
        assign = new_assign
    return Partition(
        solution_label=label,
        assignment={rid: str(int(c) + 1) for rid, c in zip(ids, assign)},
    )


def knn_graph(am: ArticleMatrix, k: int = KNN_K, threshold: float = KNN_THRESHOLD) -> SimilarityNetwork:
    """Exact per-row top-k cosine neighbors (self excluded), edges below the
    threshold dropped, then union-symmetrized."""
    x, ids = _normalized_nonzero(am)
    n = len(ids)
    edges: dict[tuple[int, int], float] = {}
    block = 512
    for start in range(0, n, block):
        stop = min(start + block, n)
        sims = x[start:stop] @ x.T
        for bi in range(stop - start):
            i = start + bi
            row = sims[bi]
            order = sorted((j for j in range(n) if j != i), key=lambda j: (-row[j], ids[j]))
            for j in order[:k]:
                if row[j] < threshold:
                    break
                a, b = min(i, j), max(i, j)
                edges[(a, b)] = max(edges.get((a, b), 0.0), float(row[j]))
    return SimilarityNetwork(
        nodes=ids,
        edges=[(ids[a], ids[b], w) for (a, b), w in sorted(edges.items())],
    )


def louvain(
    net: SimilarityNetwork,
    resolution: float = 1.0,
    seed: int = 42,
    label: str = "ol",
) -> Partition:
    """Weighted-modularity Louvain over the similarity network; isolated
    nodes become singleton clusters flagged unconnected."""
    if not net.nodes:
        raise ClusteringError("empty similarity network")
    g = net.to_networkx()
    communities = nx.community.louvain_communities(g, weight="weight", resolution=resolution, seed=seed)
    communities = sorted(communities, key=lambda c: (-len(c), min(c)))
    assignment: dict[str, str] = {}
    for ci, members in enumerate(communities, start=1):
        for rid in members:
            assignment[rid] = str(ci)
    unconnected = {rid for rid in net.nodes if g.degree(rid) == 0}
    return Partition(solution_label=label, assignment=assignment, unconnected=unconnected)


def modularity(net: SimilarityNetwork, p: Partition, resolution: float = 1.0) -> float:
    groups: dict[str, set[str]] = defaultdict(set)
    for rid, ck in p.assignment.items():
        groups[ck].add(rid)
    return nx.community.modularity(net.to_networkx(), groups.values(), weight="weight", resolution=resolution)


def nmi(p: Partition, q: Partition, average: str = "arithmetic") -> float:
    """Normalized mutual information over the articles assigned in both
    partitions: 2 I / (H(p) + H(q)) with natural logs (or max-entropy
    normalization with average="max")."""
    common = sorted(set(p.assignment) & set(q.assignment))
    if not common:
        raise ClusteringError("partitions share no assigned articles")
    n = len(common)
    cp = Counter(p.assignment[r] for r in common)
    cq = Counter(q.assignment[r] for r in common)
    joint = Counter((p.assignment[r], q.assignment[r]) for r in common)
    hp = -sum(c / n * math.log(c / n) for c in cp.values())
    hq = -sum(c / n * math.log(c / n) for c in cq.values())
    mi = sum(
        c / n * math.log(c * n / (cp[a] * cq[b]))
        for (a, b), c in joint.items()
    )
    if hp + hq == 0.0:
        return 1.0  # both single-cluster over the common set: identical
    denom = (hp + hq) / 2 if average == "arithmetic" else max(hp, hq)
    if denom == 0.0:
        return 0.0
    return min(1.0, max(0.0, mi / denom))


def label_clusters(
    p: Partition,
    sm: SemanticMatrix,
    n_terms: int = 10,
    am: ArticleMatrix | None = None,
) -> dict[str, str]:
    """Comma-joined top topical terms by cosine to each cluster vector.

    Uses the cluster-id entity row when the partition was re-indexed;
    otherwise falls back to the mean of member article vectors.
    """
    members: dict[str, list[str]] = defaultdict(list)
    for rid, ck in p.assignment.items():
        members[ck].append(rid)
    term_rows = [i for i, e in enumerate(sm.entities) if e.entity_type is EntityType.TOPICAL_TERM]
    term_vectors = sm.vectors[term_rows].astype(np.float64)
    term_norms = np.linalg.norm(term_vectors, axis=1)
    term_norms[term_norms == 0] = 1.0
    labels: dict[str, str] = {}
    am_index = {rid: i for i, rid in enumerate(am.record_ids)} if am is not None else {}
    for ck in sorted(members):
        if n_terms <= 0 or not members[ck]:
            labels[ck] = ""
            continue
        vec = sm.row(cluster_key(p.solution_label, ck))
        if vec is None and am is not None:
            rows = [am_index[r] for r in members[ck] if r in am_index]
            if not rows:
                labels[ck] = ""
                continue
            vec = am.vectors[rows].astype(np.float64).mean(axis=0)
        if vec is None:
            labels[ck] = ""
            continue
        v = np.asarray(vec, dtype=np.float64)
        vn = np.linalg.norm(v)
        if vn == 0:
            labels[ck] = ""
            continue
        cos = term_vectors @ v / (term_norms * vn)
        order = sorted(
            range(len(term_rows)),
            key=lambda j: (-cos[j], sm.entities[term_rows[j]].key),
        )
        terms = [sm.entities[term_rows[j]].key.split(":", 1)[1] for j in order[:n_terms]]
        labels[ck] = ", ".join(terms)
    return labels


def export_partition(p: Partition, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["record_id", "solution_label", "cluster_key"])
        for rid in sorted(p.assignment):
            w.writerow([rid, p.solution_label, p.assignment[rid]])


def import_partition(path: str | Path) -> Partition:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ClusteringError(f"{path}: empty partition file")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ClusteringError(f"{path}: line {lineno}: expected 3 columns")
            rows.append(row)
    if not rows:
        raise ClusteringError(f"{path}: no assignment rows")
    labels = {r[1] for r in rows}
    if len(labels) != 1:
        raise ClusteringError(f"{path}: expected a single solution label, found {sorted(labels)}")
    return Partition(
        solution_label=rows[0][1],
        assignment={r[0]: r[2] for r in rows},
    )
