import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from algcon.graph import (GraphError, SpectralResult, WeightedGraph, as_selection, build_graph,
                          fiedler, graph_fiedler, is_connected, laplacian, laplacian_sparse,
                          lifted_matrix, selection_from_pairs, smallest_eigenpair)
from algcon.settings import TOL

from conftest import complete_graph, graphs, random_graph


class TestBuildGraph:
    def test_single_edge(self):
        g = build_graph(2, [(0, 1, 3.0)])
        assert g.m == 1
        assert g.pairs() == [(0, 1)]

    def test_canonicalizes_orientation(self):
        g = build_graph(3, [(1, 0, 1.0)])
        assert g.edges == ((0, 1, 1.0),)

    def test_sorted_lexicographically(self):
        g = build_graph(4, [(2, 3, 1.0), (0, 3, 2.0), (1, 0, 0.5)])
        assert g.pairs() == [(0, 1), (0, 3), (2, 3)]

    @pytest.mark.parametrize("edges, message", [
        ([(0, 0, 1.0)], "self-loop"),
        ([(0, 1, 1.0), (1, 0, 2.0)], "duplicate pair"),
        ([(0, 1, 0.0)], "non-positive weight"),
        ([(0, 1, -2.0)], "non-positive weight"),
        ([(0, 3, 1.0)], "out-of-range vertex"),
    ])
    def test_validation_errors_name_the_edge(self, edges, message):
        with pytest.raises(GraphError, match=message):
            build_graph(3, edges)

    def test_direct_construction_is_validated(self):
        with pytest.raises(GraphError):
            WeightedGraph(3, ((1, 0, 1.0),))

    def test_scaled(self):
        g = build_graph(3, [(0, 1, 2.0), (1, 2, 0.5)]).scaled(4.0)
        assert g.edges == ((0, 1, 8.0), (1, 2, 2.0))


class TestSelection:
    def test_default_is_all_ones(self):
        assert as_selection(complete_graph(3)).tolist() == [1.0, 1.0, 1.0]

    def test_length_mismatch(self):
        with pytest.raises(GraphError, match="length"):
            as_selection(complete_graph(3), [1, 0])

    def test_non_binary(self):
        with pytest.raises(GraphError):
            as_selection(complete_graph(3), [1, 0.5, 0])

    def test_from_pairs(self):
        g = complete_graph(3)
        assert selection_from_pairs(g, [(2, 0)]).tolist() == [0.0, 1.0, 0.0]


class TestLaplacian:
    def test_k2(self):
        L = laplacian(build_graph(2, [(0, 1, 3.0)]))
        assert L.tolist() == [[3.0, -3.0], [-3.0, 3.0]]

    def test_path(self):
        L = laplacian(build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)]))
        assert np.diag(L).tolist() == [1.0, 2.0, 1.0]
        assert L[0, 1] == L[1, 2] == -1.0
        assert L[0, 2] == 0.0

    def test_selection_masks_edges(self):
        g = complete_graph(3)
        L = laplacian(g, [1, 1, 0])
        expected = laplacian(build_graph(3, [(0, 1, 1.0), (0, 2, 1.0)]))
        assert np.array_equal(L, expected)

    def test_length_mismatch(self):
        with pytest.raises(GraphError):
            laplacian(complete_graph(3), [1, 1])

    def test_sparse_matches_dense(self, rng):
        g = random_graph(rng, 9)
        x = rng.integers(0, 2, g.m)
        assert np.allclose(laplacian_sparse(g, x).toarray(), laplacian(g, x))

    @given(graphs())
    def test_exactly_symmetric_and_zero_row_sums(self, g):
        L = laplacian(g)
        assert np.array_equal(L, L.T)
        scale = max(1.0, float(np.max(np.diag(L))))
        assert np.all(np.abs(L.sum(axis=1)) <= 1e-9 * scale)
        assert np.all(np.diag(L) >= 0)


class TestFiedler:
    def test_k2(self):
        r = fiedler(laplacian(build_graph(2, [(0, 1, 3.0)])))
        assert r.lambda2 == pytest.approx(6.0, abs=1e-12)

    def test_path_p3(self):
        r = fiedler(laplacian(build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])))
        assert r.lambda2 == pytest.approx(1.0, abs=1e-12)
        assert np.allclose(r.fiedler, np.array([1.0, 0.0, -1.0]) / math.sqrt(2), atol=1e-12)

    def test_k4(self):
        assert fiedler(laplacian(complete_graph(4))).lambda2 == pytest.approx(4.0, abs=1e-12)

    def test_full_spectrum(self):
        r = fiedler(laplacian(complete_graph(4)), full_spectrum=True)
        assert np.allclose(r.full_spectrum, [0, 4, 4, 4], atol=1e-12)

    def test_n_lt_2(self):
        with pytest.raises(GraphError):
            fiedler(np.zeros((1, 1)))

    def test_disconnected_clamped_to_zero(self):
        g = build_graph(4, [(0, 1, 1.0), (2, 3, 1.0)])
        assert graph_fiedler(g).lambda2 == 0.0

    def test_sign_rule(self, rng):
        for _ in range(20):
            v = graph_fiedler(random_graph(rng, 7)).fiedler
            k = int(np.argmax(np.abs(v)))
            assert v[k] > 0
            assert not np.any(np.abs(v[:k]) >= np.abs(v[k]) - 1e-12)

    def test_bit_identical_repeat(self, rng):
        g = random_graph(rng, 10)
        a, b = graph_fiedler(g), graph_fiedler(g)
        assert a.lambda2 == b.lambda2
        assert np.array_equal(a.fiedler, b.fiedler)

    def test_sparse_path_agrees(self, rng):
        g = random_graph(rng, 40, p=0.2)
        L = laplacian(g)
        dense = fiedler(L)
        sparse = fiedler(laplacian_sparse(g))
        assert sparse.lambda2 == pytest.approx(dense.lambda2, rel=1e-7)
        assert abs(abs(sparse.fiedler @ dense.fiedler) - 1) < 1e-6

    @given(graphs(min_n=2, max_n=14))
    def test_result_invariants(self, g):
        r = graph_fiedler(g)
        assert isinstance(r, SpectralResult)
        assert abs(np.linalg.norm(r.fiedler) - 1) <= 1e-9
        assert abs(r.fiedler.sum()) <= 1e-8
        assert r.lambda2 >= -1e-9

    def test_random_laplacians_smallest_eigenvalue_zero(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 31))
            L = laplacian(random_graph(rng, n, p=float(rng.random()), connected=False))
            scale = max(1.0, float(np.max(np.diag(L))))
            assert np.all(np.abs(L.sum(axis=1)) <= 1e-9 * scale)
            assert abs(np.linalg.eigvalsh(L)[0]) <= 1e-8 * scale


class TestConnectivity:
    def test_spanning_tree_of_k4(self):
        g = complete_graph(4)
        x = selection_from_pairs(g, [(0, 1), (1, 2), (1, 3)])
        assert is_connected(g, x)

    def test_empty_selection(self):
        assert not is_connected(complete_graph(4), np.zeros(6))

    def test_two_disjoint_edges(self):
        assert not is_connected(build_graph(4, [(0, 1, 1.0), (2, 3, 1.0)]))

    def test_agrees_with_lambda2(self, rng):
        for _ in range(100):
            g = random_graph(rng, int(rng.integers(2, 12)), p=0.4)
            x = rng.integers(0, 2, g.m)
            assert is_connected(g, x) == (graph_fiedler(g, x).lambda2 > TOL.connected_lambda)


class TestSpectralProperties:
    def test_edge_monotonicity(self, rng):
        for _ in range(50):
            g = random_graph(rng, int(rng.integers(3, 12)), p=0.6)
            x = rng.integers(0, 2, g.m).astype(float)
            off = np.flatnonzero(x == 0)
            if not len(off):
                continue
            y = x.copy()
            y[rng.choice(off)] = 1.0
            assert graph_fiedler(g, y).lambda2 >= graph_fiedler(g, x).lambda2 - 1e-9

    @given(graphs(min_n=2, max_n=10, connected=True), st.floats(0.01, 100.0))
    def test_scale_equivariance(self, g, t):
        a = graph_fiedler(g).lambda2
        b = graph_fiedler(g.scaled(t)).lambda2
        assert b == pytest.approx(t * a, rel=1e-8, abs=1e-12)


class TestSmallestEigenpair:
    def test_diagonal(self):
        lam, v = smallest_eigenpair(np.diag([-2.0, 5.0]))
        assert lam == -2.0
        assert v.tolist() == [1.0, 0.0]

    def test_zero_matrix_is_deterministic(self):
        lam1, v1 = smallest_eigenpair(np.zeros((3, 3)))
        lam2, v2 = smallest_eigenpair(np.zeros((3, 3)))
        assert lam1 == 0.0
        assert np.array_equal(v1, v2)
        assert np.linalg.norm(v1) == pytest.approx(1.0)

    def test_gamma_equal_lambda2_is_singular_psd(self):
        L = laplacian(build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)]))
        M = L - 1.0 * (np.eye(3) - np.ones((3, 3)) / 3)
        lam, _ = smallest_eigenpair(M)
        assert abs(lam) <= 1e-8

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            smallest_eigenpair(np.array([[0.0, 1.0], [0.0, 0.0]]))

    @given(st.integers(2, 8), st.integers(0, 10 ** 6))
    def test_residual(self, n, seed):
        A = np.random.default_rng(seed).normal(size=(n, n))
        M = A + A.T
        lam, v = smallest_eigenpair(M)
        assert np.linalg.norm(M @ v - lam * v) <= 1e-8 * max(1.0, np.linalg.norm(M, 2))
        assert lam == pytest.approx(np.linalg.eigvalsh(M)[0], abs=1e-9)


class TestLiftedMatrix:
    def test_zero_shift_is_laplacian(self, rng):
        g = random_graph(rng, 6)
        x = rng.integers(0, 2, g.m)
        assert np.array_equal(lifted_matrix(g, x, 0.0), laplacian(g, x))

    def test_k2_singular_at_lambda2(self):
        g = build_graph(2, [(0, 1, 3.0)])
        lam, _ = smallest_eigenpair(lifted_matrix(g, [1], 6.0))
        assert abs(lam) <= 1e-12

    def test_empty_selection(self):
        g = complete_graph(4)
        W = lifted_matrix(g, np.zeros(6), 1.0)
        assert np.allclose(W, -(np.eye(4) - np.ones((4, 4)) / 4))
        assert smallest_eigenpair(W)[0] == pytest.approx(-1.0)

    def test_base_term(self):
        base = build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])
        cand = build_graph(3, [(0, 2, 2.0)])
        W = lifted_matrix(cand, [1], 0.5, base)
        full = laplacian(build_graph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 2.0)]))
        assert np.allclose(W, full - 0.5 * (np.eye(3) - np.ones((3, 3)) / 3))

    def test_overlapping_base_rejected(self):
        g = complete_graph(3)
        with pytest.raises(GraphError):
            lifted_matrix(g, [1, 1, 1], 0.0, build_graph(3, [(0, 1, 1.0)]))
