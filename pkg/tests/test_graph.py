import numpy as np
import pytest

from signet.graph import SignedGraph, triad_count_upper_bound


def random_graph(n, density, seed, dense=False):
    rng = np.random.default_rng(seed)
    g = SignedGraph(n, dense=dense)
    for i in range(n):
        for j in range(i + 1, n):
            u = rng.random()
            if u < density:
                g.set_sign(i, j, 1 if rng.random() < 0.5 else -1)
    return g


def brute_common_sign_product(g, i, j):
    return sum(
        g.get_sign(i, k) * g.get_sign(j, k)
        for k in range(g.n)
        if k != i and k != j
    )


class TestSetSign:
    def test_symmetry_by_construction(self):
        g = SignedGraph(3)
        g.set_sign(0, 1, 1)
        assert g.get_sign(1, 0) == 1

    def test_zeroing_drops_adjacency(self):
        g = SignedGraph(3)
        g.set_sign(0, 1, 1)
        g.set_sign(0, 1, 0)
        assert g.get_sign(0, 1) == 0
        assert 1 not in g.neighbors(0)
        assert 0 not in g.neighbors(1)
        assert g.m == 0

    def test_self_loop_rejected(self):
        g = SignedGraph(3)
        with pytest.raises(ValueError):
            g.set_sign(2, 2, -1)

    def test_out_of_range_rejected(self):
        g = SignedGraph(3)
        with pytest.raises(ValueError):
            g.set_sign(0, 3, 1)
        with pytest.raises(ValueError):
            g.get_sign(-1, 1)

    def test_bad_sign_rejected(self):
        g = SignedGraph(3)
        with pytest.raises(ValueError):
            g.set_sign(0, 1, 2)

    def test_symmetry_after_random_updates(self):
        rng = np.random.default_rng(3)
        for dense in (False, True):
            g = SignedGraph(12, dense=dense)
            for _ in range(500):
                i, j = rng.integers(12, size=2)
                if i == j:
                    continue
                g.set_sign(i, j, int(rng.integers(-1, 2)))
            for i in range(12):
                for j in range(i + 1, 12):
                    assert g.get_sign(i, j) == g.get_sign(j, i)


class TestCommonSignProductSum:
    def test_complete_positive_four(self):
        g = SignedGraph.complete(4, 1)
        # two common neighbors, each contributing (+1)*(+1)
        assert g.common_sign_product_sum(0, 1) == 2

    def test_star_single_common_neighbor(self):
        g = SignedGraph(4)
        g.set_sign(0, 1, 1)
        g.set_sign(0, 2, -1)
        g.set_sign(0, 3, 1)
        assert g.common_sign_product_sum(1, 2) == g.get_sign(1, 0) * g.get_sign(2, 0)

    def test_disjoint_neighborhoods(self):
        g = SignedGraph(6)
        g.set_sign(0, 2, 1)
        g.set_sign(1, 3, -1)
        assert g.common_sign_product_sum(0, 1) == 0

    @pytest.mark.parametrize("dense", [False, True])
    def test_matches_brute_force(self, dense):
        for seed in range(6):
            n = int(np.random.default_rng(seed).integers(5, 51))
            g = random_graph(n, 0.3, 100 + seed, dense=dense)
            rng = np.random.default_rng(200 + seed)
            for _ in range(50):
                i, j = rng.integers(n, size=2)
                if i == j:
                    continue
                assert g.common_sign_product_sum(i, j) == brute_common_sign_product(g, i, j)

    def test_bounded_on_complete_graph(self):
        g = random_graph(20, 1.1, 7, dense=True)
        for i in range(20):
            for j in range(i + 1, 20):
                assert abs(g.common_sign_product_sum(i, j)) <= 18


class TestEnumerateTriads:
    def test_complete_four(self):
        g = SignedGraph.complete(4, -1)
        assert len(list(g.enumerate_triads())) == 4

    def test_open_triangle_excluded(self):
        g = SignedGraph(3)
        g.set_sign(0, 1, 1)
        g.set_sign(1, 2, -1)
        assert list(g.enumerate_triads()) == []

    def test_each_triple_once_all_edges_nonzero(self):
        g = random_graph(18, 0.5, 11)
        triads = list(g.enumerate_triads())
        assert len(triads) == len(set(triads))
        for i, j, k in triads:
            assert i < j < k
            assert g.get_sign(i, j) != 0
            assert g.get_sign(j, k) != 0
            assert g.get_sign(i, k) != 0
        assert g.count_triads() == len(triads)

    def test_count_below_upper_bound(self):
        for seed, density in ((1, 0.2), (2, 0.6), (3, 1.1)):
            g = random_graph(25, density, seed)
            assert g.count_triads() <= triad_count_upper_bound(g.n, g.m)


class TestTriadUpperBound:
    def test_complete_four(self):
        assert triad_count_upper_bound(4, 6) == pytest.approx(18.0)

    def test_triangle(self):
        assert triad_count_upper_bound(3, 3) == pytest.approx(4.0)

    def test_zero_radicand(self):
        assert triad_count_upper_bound(5, 2) == 0.0

    def test_negative_radicand(self):
        assert triad_count_upper_bound(10, 2) == 0.0


class TestArraysRoundTrip:
    def test_to_arrays_and_back(self):
        g = random_graph(15, 0.4, 5)
        mat, ei, ej = g.to_arrays()
        assert (mat == mat.T).all()
        assert len(ei) == g.m
        g2 = SignedGraph.from_matrix(mat)
        assert sorted(g2.edges()) == sorted(g.edges())

    def test_copy_is_independent(self):
        g = SignedGraph.complete(5, 1)
        h = g.copy()
        h.set_sign(0, 1, -1)
        assert g.get_sign(0, 1) == 1
