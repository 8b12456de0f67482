import itertools
import math

import numpy as np
import pytest

from ariadne import clustering as clu
from ariadne.articles import ArticleMatrix


def make_am(vectors, ids=None, zero=()):
    vectors = np.asarray(vectors, dtype=np.float32)
    ids = ids or [f"r{i:03d}" for i in range(len(vectors))]
    return ArticleMatrix(record_ids=ids, vectors=vectors, zero_rows=set(zero))


def two_blobs(n_per=20, dim=8, sep=6.0, seed=21):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n_per, dim)) + sep
    b = rng.normal(size=(n_per, dim)) - sep
    return make_am(np.vstack([a, b]))


class TestKMeans:
    def test_k_equals_n_each_point_alone(self):
        rng = np.random.default_rng(22)
        am = make_am(rng.normal(size=(6, 4)))
        p = clu.kmeans(am, k=6, seed=1)
        assert p.cluster_count == 6

    def test_blob_recovery(self):
        am = two_blobs()
        p = clu.kmeans(am, k=2, seed=3)
        first = {p.assignment[f"r{i:03d}"] for i in range(20)}
        second = {p.assignment[f"r{i:03d}"] for i in range(20, 40)}
        assert len(first) == 1 and len(second) == 1 and first != second

    def test_duplicate_rows_co_assigned(self):
        rows = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.0, 1.0], [1.0, 1.0]])
        p = clu.kmeans(make_am(rows), k=2, seed=5)
        assert p.assignment["r000"] == p.assignment["r001"]
        assert p.assignment["r002"] == p.assignment["r003"]

    def test_k_exceeding_points_rejected(self):
        with pytest.raises(clu.ClusteringError):
            clu.kmeans(make_am(np.eye(3)), k=4)

    def test_zero_rows_excluded(self):
        am = make_am(np.vstack([np.eye(3), np.zeros((1, 3))]), zero=["r003"])
        p = clu.kmeans(am, k=2, seed=1)
        assert "r003" not in p.assignment

    def test_deterministic_for_seed(self):
        am = two_blobs(seed=30)
        assert clu.kmeans(am, k=2, seed=9).assignment == clu.kmeans(am, k=2, seed=9).assignment

    def test_fixed_point_inertia(self):
        # Re-running assignment from the final partition does not move points.
        am = two_blobs(seed=31)
        p = clu.kmeans(am, k=2, seed=2)
        x, ids = clu._normalized_nonzero(am)
        centers = {}
        for ck in set(p.assignment.values()):
            rows = [i for i, r in enumerate(ids) if p.assignment[r] == ck]
            centers[ck] = x[rows].mean(axis=0)
        for i, rid in enumerate(ids):
            best = min(centers, key=lambda ck: float(((x[i] - centers[ck]) ** 2).sum()))
            assert best == p.assignment[rid]


def brute_force_knn_edges(am, k, threshold):
    """Oracle: full pairwise cosine, per-row top-k, union symmetrization."""
    idx = [i for i, r in enumerate(am.record_ids) if r not in am.zero_rows]
    ids = [am.record_ids[i] for i in idx]
    v = am.vectors[idx].astype(float)
    norms = np.linalg.norm(v, axis=1)
    norms[norms == 0] = 1.0
    u = v / norms[:, None]
    edges = set()
    n = len(ids)
    for i in range(n):
        sims = sorted(
            ((float(u[i] @ u[j]), j) for j in range(n) if j != i),
            key=lambda t: (-t[0], ids[t[1]]),
        )
        for c, j in sims[:k]:
            if c >= threshold:
                edges.add(tuple(sorted((ids[i], ids[j]))))
    return edges


class TestKnnGraph:
    def test_orthogonal_rows_no_edges(self):
        am = make_am(np.eye(5))
        net = clu.knn_graph(am, k=4, threshold=0.6)
        assert net.edges == []
        assert net.nodes == am.record_ids

    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(23)
        base = rng.normal(size=(4, 6))
        rows = np.vstack([base[i % 4] + 0.4 * rng.normal(size=6) for i in range(100)])
        am = make_am(rows)
        net = clu.knn_graph(am, k=10, threshold=0.6)
        got = {tuple(sorted((a, b))) for a, b, _ in net.edges}
        assert got == brute_force_knn_edges(am, 10, 0.6)

    def test_threshold_one_only_duplicates(self):
        rows = np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0]])
        net = clu.knn_graph(make_am(rows), k=2, threshold=1.0)
        assert {tuple(sorted((a, b))) for a, b, _ in net.edges} == {("r000", "r001")}

    def test_weights_at_least_threshold_and_edges_originate_from_top_k(self):
        am = two_blobs(n_per=30, seed=24)
        k = 7
        net = clu.knn_graph(am, k=k, threshold=0.6)
        assert all(0.6 <= w <= 1.0 + 1e-9 for _, _, w in net.edges)
        # Union symmetrization: every edge must sit in at least one
        # endpoint's top-k list (degree itself is unbounded by in-links).
        oracle = brute_force_knn_edges(am, k, 0.6)
        assert {tuple(sorted((a, b))) for a, b, _ in net.edges} <= oracle


def two_cliques_network(w_in=0.9, w_bridge=0.61):
    nodes = [f"n{i}" for i in range(8)]
    edges = []
    for grp in (range(4), range(4, 8)):
        for i, j in itertools.combinations(grp, 2):
            edges.append((f"n{i}", f"n{j}", w_in))
    edges.append(("n0", "n4", w_bridge))
    return clu.SimilarityNetwork(nodes=nodes, edges=edges)


class TestLouvain:
    def test_two_cliques_two_communities(self):
        net = two_cliques_network()
        p = clu.louvain(net, seed=4)
        assert p.cluster_count == 2
        assert {p.assignment[f"n{i}"] for i in range(4)} != {p.assignment[f"n{i}"] for i in range(4, 8)}
        # Hand-computed weighted modularity of the planted split:
        # total weight m = 12*0.9 + 0.61; within = 10.8; degrees 2.7 or 3.31.
        m = 12 * 0.9 + 0.61
        deg = {n: 3 * 0.9 for n in net.nodes}
        deg["n0"] += 0.61
        deg["n4"] += 0.61
        expected = 0.0
        for grp in (range(4), range(4, 8)):
            names = [f"n{i}" for i in grp]
            within = 6 * 0.9
            dtot = sum(deg[n] for n in names)
            expected += within / m - (dtot / (2 * m)) ** 2
        assert clu.modularity(net, p) == pytest.approx(expected, abs=1e-9)

    def test_single_clique_one_community(self):
        nodes = ["a", "b", "c", "d"]
        edges = [(i, j, 0.8) for i, j in itertools.combinations(nodes, 2)]
        p = clu.louvain(clu.SimilarityNetwork(nodes=nodes, edges=edges))
        assert p.cluster_count == 1

    def test_isolated_nodes_singletons_flagged(self):
        net = clu.SimilarityNetwork(nodes=["a", "b", "c"], edges=[("a", "b", 0.9)])
        p = clu.louvain(net)
        assert p.unconnected == {"c"}
        assert p.assignment["c"] not in {p.assignment["a"], p.assignment["b"]}

    def test_modularity_of_final_partition_recomputes(self):
        net = two_cliques_network()
        p = clu.louvain(net, seed=7)
        direct = clu.modularity(net, p)
        # Any single-node move should not improve modularity (local optimum).
        for node in net.nodes:
            for other in set(p.assignment.values()):
                if other == p.assignment[node]:
                    continue
                q = clu.Partition("t", dict(p.assignment))
                q.assignment[node] = other
                assert clu.modularity(net, q) <= direct + 1e-9

    def test_empty_network_rejected(self):
        with pytest.raises(clu.ClusteringError):
            clu.louvain(clu.SimilarityNetwork(nodes=[], edges=[]))


class TestNmi:
    def _p(self, mapping, label="p"):
        return clu.Partition(label, dict(mapping))

    def test_identical_partitions_one(self):
        p = self._p({"a": "1", "b": "1", "c": "2"})
        q = self._p({"a": "x", "b": "x", "c": "y"}, "q")
        assert clu.nmi(p, q) == pytest.approx(1.0)
        assert clu.nmi(p, p) == pytest.approx(1.0)

    def test_single_cluster_vs_any_zero(self):
        p = self._p({"a": "1", "b": "1", "c": "1", "d": "1"})
        q = self._p({"a": "1", "b": "2", "c": "1", "d": "2"}, "q")
        assert clu.nmi(p, q) == 0.0

    def test_symmetry(self):
        p = self._p({"a": "1", "b": "2", "c": "1", "d": "3"})
        q = self._p({"a": "x", "b": "x", "c": "y", "d": "y"}, "q")
        assert clu.nmi(p, q) == pytest.approx(clu.nmi(q, p), abs=1e-12)

    def test_permutation_invariance(self):
        p = self._p({"a": "1", "b": "2", "c": "1", "d": "3"})
        q = self._p({"a": "x", "b": "x", "c": "y", "d": "y"}, "q")
        relabeled = self._p({"a": "9", "b": "7", "c": "9", "d": "4"})
        assert clu.nmi(p, q) == pytest.approx(clu.nmi(relabeled, q), abs=1e-12)

    def test_six_article_hand_computed_contingency(self):
        p = self._p({"a": "1", "b": "1", "c": "1", "d": "2", "e": "2", "f": "2"})
        q = self._p({"a": "1", "b": "1", "c": "2", "d": "2", "e": "2", "f": "1"}, "q")
        # Contingency (rows p, cols q): [[2, 1], [1, 2]], n = 6, margins all 3.
        mi = 2 * (2 / 6) * math.log(2 * 6 / 9) + 2 * (1 / 6) * math.log(1 * 6 / 9)
        expected = 2 * mi / (2 * math.log(2))
        assert clu.nmi(p, q) == pytest.approx(expected, abs=1e-9)

    def test_intersection_only(self):
        p = self._p({"a": "1", "b": "2", "zzz": "1"})
        q = self._p({"a": "x", "b": "y"}, "q")
        assert clu.nmi(p, q) == pytest.approx(1.0)

    def test_disjoint_sets_error(self):
        with pytest.raises(clu.ClusteringError):
            clu.nmi(self._p({"a": "1"}), self._p({"b": "1"}, "q"))

    def test_both_single_cluster_identical(self):
        p = self._p({"a": "1", "b": "1"})
        q = self._p({"a": "z", "b": "z"}, "q")
        assert clu.nmi(p, q) == 1.0

    def test_max_normalization_flag(self):
        p = self._p({"a": "1", "b": "2", "c": "1", "d": "3"})
        q = self._p({"a": "x", "b": "x", "c": "y", "d": "y"}, "q")
        assert clu.nmi(p, q, average="max") <= clu.nmi(p, q, average="arithmetic") + 1e-12


class TestLabels:
    def test_planted_term_ranks_first(self, tiny_records):
        from tests.conftest import build_small_index

        sm, am, idf, vocab, terms, inv = build_small_index(tiny_records)
        # All three records form one cluster; "mass" is in every title.
        p = clu.Partition("x", {r.record_id: "1" for r in tiny_records})
        labels = clu.label_clusters(p, sm, n_terms=5, am=am)
        assert labels["1"]
        top_terms = labels["1"].split(", ")
        assert len(top_terms) == 5

    def test_uses_cluster_entity_row_when_present(self, tiny_records):
        from tests.conftest import build_small_index

        sm, am, *_ = build_small_index(tiny_records)
        p = clu.Partition("hd", {"R1": "1"})
        labels = clu.label_clusters(p, sm, n_terms=3, am=am)
        assert labels["1"].count(",") == 2

    def test_n_terms_zero_empty(self, tiny_records):
        from tests.conftest import build_small_index

        sm, am, *_ = build_small_index(tiny_records)
        p = clu.Partition("x", {"R1": "1"})
        assert clu.label_clusters(p, sm, n_terms=0, am=am) == {"1": ""}

    def test_labels_are_topical_terms_only(self, tiny_records):
        from tests.conftest import build_small_index

        sm, am, idf, vocab, terms, inv = build_small_index(tiny_records)
        p = clu.Partition("x", {r.record_id: "1" for r in tiny_records})
        label_terms = clu.label_clusters(p, sm, n_terms=10, am=am)["1"].split(", ")
        term_keys = {e.key.split(":", 1)[1] for e in sm.entities if e.entity_type.value == "topical-term"}
        assert set(label_terms) <= term_keys


class TestPartitionIO:
    def test_round_trip_identity(self, tmp_path):
        p = clu.Partition("ok", {"r2": "1", "r1": "2", "r3": "1"})
        path = tmp_path / "p.csv"
        clu.export_partition(p, path)
        loaded = clu.import_partition(path)
        assert loaded.solution_label == "ok"
        assert loaded.assignment == p.assignment

    def test_export_byte_stable(self, tmp_path):
        p = clu.Partition("ok", {f"r{i}": str(i % 3) for i in range(10)})
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        clu.export_partition(p, a)
        clu.export_partition(p, b)
        assert a.read_bytes() == b.read_bytes()

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "e.csv"
        path.write_text("")
        with pytest.raises(clu.ClusteringError):
            clu.import_partition(path)

    def test_malformed_row_names_line(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("record_id,solution_label,cluster_key\nr1,ok\n")
        with pytest.raises(clu.ClusteringError, match="line 2"):
            clu.import_partition(path)
