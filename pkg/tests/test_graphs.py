"""Generators and edge-list ingestion."""

import numpy as np
import pytest

from fastsubmod import build_graph, gen_ba, gen_er, gen_sbm, gen_ws, load_edge_list


def edge_set(g):
    out = set()
    for u in range(g.n):
        for v in g.neighbors(u):
            out.add((min(u, int(v)), max(u, int(v))))
    return out


def is_connected(g):
    if g.n == 0:
        return True
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in g.neighbors(u):
            if int(v) not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return len(seen) == g.n


class TestER:
    def test_p_zero_is_edgeless(self):
        assert gen_er(50, 0.0, seed=1).n_edges == 0

    def test_p_one_is_complete(self):
        g = gen_er(12, 1.0, seed=1)
        assert g.n_edges == 12 * 11 // 2

    def test_deterministic_per_seed(self):
        a, b = gen_er(60, 0.1, seed=4), gen_er(60, 0.1, seed=4)
        assert edge_set(a) == edge_set(b)
        c = gen_er(60, 0.1, seed=5)
        assert edge_set(a) != edge_set(c)

    def test_simple_graph(self):
        g = gen_er(40, 0.2, seed=7)
        es = edge_set(g)
        assert all(u != v for u, v in es)
        assert g.n_edges == len(es)

    def test_expected_edge_count_within_five_sigma(self):
        n, p = 300, 0.05
        total = n * (n - 1) // 2
        counts = [gen_er(n, p, seed=s).n_edges for s in range(30)]
        mean = np.mean(counts)
        sigma = np.sqrt(total * p * (1 - p) / len(counts))
        assert abs(mean - total * p) <= 5 * sigma

    def test_matches_exhaustive_pair_enumeration(self):
        # distribution sanity at tiny n: every pair appears with roughly p
        hits = np.zeros((8, 8))
        trials = 400
        for s in range(trials):
            for u, v in edge_set(gen_er(8, 0.3, seed=s)):
                hits[u, v] += 1
        frac = hits[np.triu_indices(8, k=1)] / trials
        assert abs(frac.mean() - 0.3) < 0.03


class TestSBM:
    def test_edges_stay_within_clusters(self):
        sizes = [5, 7, 9]
        g = gen_sbm(sizes, p=0.5, seed=2)
        bounds = np.cumsum([0] + sizes)
        for u, v in edge_set(g):
            cu = np.searchsorted(bounds, u, side="right")
            cv = np.searchsorted(bounds, v, side="right")
            assert cu == cv

    def test_total_nodes(self):
        assert gen_sbm([4, 6], p=0.1, seed=0).n == 10

    def test_p_one_fills_clusters(self):
        g = gen_sbm([3, 4], p=1.0, seed=0)
        assert g.n_edges == 3 + 6

    def test_cluster_size_validation(self):
        with pytest.raises(ValueError):
            gen_sbm([5, 0], p=0.1, seed=0)


class TestWS:
    def test_ring_degree_two_edge_count(self):
        g = gen_ws(100, ring_neighbors=2, rewire=0.0, seed=0)
        assert g.n_edges == 100
        assert (g.degrees() == 2).all()

    def test_rewiring_preserves_edge_count_and_degree_sum(self):
        g = gen_ws(200, ring_neighbors=4, rewire=0.3, seed=3)
        assert g.n_edges == 400
        assert g.degrees().sum() == 2 * g.n_edges

    def test_too_small_n_rejected(self):
        with pytest.raises(ValueError):
            gen_ws(2, ring_neighbors=2, rewire=0.1, seed=0)

    def test_odd_ring_degree_rejected(self):
        with pytest.raises(ValueError):
            gen_ws(10, ring_neighbors=3, rewire=0.1, seed=0)

    def test_deterministic(self):
        assert edge_set(gen_ws(50, 2, 0.2, seed=9)) == edge_set(gen_ws(50, 2, 0.2, seed=9))


class TestBA:
    def test_m1_yields_connected_tree(self):
        for seed in range(5):
            g = gen_ba(80, m=1, seed=seed)
            assert g.n_edges == 79
            assert is_connected(g)

    def test_m2_edge_count(self):
        g = gen_ba(50, m=2, seed=1)
        # the first attached node contributes m edges, later ones m each
        assert g.n_edges == (50 - 2) * 2

    def test_validation(self):
        with pytest.raises(ValueError):
            gen_ba(1, m=1, seed=0)
        with pytest.raises(ValueError):
            gen_ba(10, m=0, seed=0)


class TestEdgeListLoader:
    def test_empty_file(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("")
        assert load_edge_list(p).n_edges == 0

    def test_path_graph(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1\n1 2\n")
        g = load_edge_list(p)
        assert g.n == 3
        assert edge_set(g) == {(0, 1), (1, 2)}
        assert g.weights is None

    def test_weighted_single_edge(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1 5.0\n")
        g = load_edge_list(p)
        assert g.n_edges == 1
        assert g.weights.tolist() == [5.0, 5.0]

    def test_comments_and_blank_lines(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("# a comment\n\n0 1  # trailing\n")
        assert load_edge_list(p).n_edges == 1

    def test_malformed_line_reports_line_number(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1\nnot an edge line at all\n")
        with pytest.raises(ValueError, match=":2"):
            load_edge_list(p)

    def test_duplicate_edge_keeps_max_weight_with_warning(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1 2.0\n1 0 7.0\n")
        with pytest.warns(UserWarning, match="duplicate"):
            g = load_edge_list(p)
        assert g.n_edges == 1
        assert g.weights.max() == 7.0

    def test_directed_keeps_both_orientations(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 1 2.0\n1 0 7.0\n")
        g = load_edge_list(p, directed=True)
        assert g.n_edges == 2

    def test_remap_ids(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("10 30\n30 20\n")
        g = load_edge_list(p, remap_ids=True)
        assert g.n == 3

    def test_self_loop_dropped_with_warning(self, tmp_path):
        p = tmp_path / "g.txt"
        p.write_text("0 0\n0 1\n")
        with pytest.warns(UserWarning, match="self-loop"):
            g = load_edge_list(p)
        assert g.n_edges == 1


class TestBuildGraph:
    def test_rejects_self_loops(self):
        with pytest.raises(ValueError):
            build_graph(3, np.array([0]), np.array([0]))

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            build_graph(2, np.array([0]), np.array([5]))

    def test_directed_in_edges(self):
        g = build_graph(3, np.array([0, 1]), np.array([1, 2]),
                        np.array([2.0, 3.0]), directed=True)
        assert g.neighbors(1).tolist() == [2]
        assert g.in_indices[g.in_indptr[1]:g.in_indptr[2]].tolist() == [0]
