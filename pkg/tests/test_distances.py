import math

import numpy as np
import pytest
from helpers import floyd_warshall, graph_edge_list, graph_from_edges, spearman

from owcluster import (
    EmbeddingMatrix,
    MetricKind,
    build_knn_graph,
    geodesic_distance_matrix,
    jeffreys_divergence,
    pairwise_distance_matrix,
    vector_distance,
)
from owcluster.errors import DimensionMismatch, GeodesicNotPointwise, KTooLarge

ALL_POINTWISE = [
    MetricKind("euclidean"),
    MetricKind("manhattan"),
    MetricKind("chebyshev"),
    MetricKind("cosine"),
    MetricKind("jeffreys"),
]


@pytest.mark.parametrize("metric", ALL_POINTWISE, ids=lambda m: m.kind)
def test_identity_of_indiscernibles(rng, metric):
    a = rng.normal(size=6) + 0.1
    assert vector_distance(a, a, metric) == pytest.approx(0.0, abs=1e-12)


def test_unit_vectors_euclidean_vs_cosine(rng):
    for _ in range(100):
        a = rng.normal(size=8)
        b = rng.normal(size=8)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        e2 = vector_distance(a, b, MetricKind("euclidean")) ** 2
        cos_theta = 1.0 - vector_distance(a, b, MetricKind("cosine"))
        assert e2 == pytest.approx(2 - 2 * cos_theta, abs=1e-6)


def test_manhattan_matches_scalar_loop(rng):
    for _ in range(50):
        a = rng.normal(size=5)
        b = rng.normal(size=5)
        oracle = 0.0
        for i in range(5):
            oracle += abs(a[i] - b[i])
        assert vector_distance(a, b, MetricKind("manhattan")) == oracle


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        vector_distance([1, 2], [1, 2, 3], MetricKind("euclidean"))


def test_geodesic_not_pointwise():
    with pytest.raises(GeodesicNotPointwise):
        vector_distance([1, 2], [3, 4], MetricKind("geodesic"))


def test_jeffreys_identical():
    p = np.array([0.2, 0.3, 0.5])
    assert jeffreys_divergence(p, p) == pytest.approx(0.0, abs=1e-12)


def test_jeffreys_hand_value():
    # sum (p-q) ln(p/q) = 0.4*ln(0.5/0.9) + 0.4*ln(0.5/0.1) = 0.4*ln 9
    got = jeffreys_divergence([0.5, 0.5], [0.9, 0.1])
    assert got == pytest.approx(0.4 * math.log(9), abs=1e-9)


def test_jeffreys_symmetry(rng):
    for _ in range(100):
        p = rng.normal(size=6)
        q = rng.normal(size=6)
        assert jeffreys_divergence(p, q) == pytest.approx(
            jeffreys_divergence(q, p), abs=1e-9
        )


def test_pairwise_single_point():
    X = EmbeddingMatrix.from_array([[1.0, 2.0]])
    D = pairwise_distance_matrix(X, MetricKind("euclidean"))
    assert D.values.shape == (1, 1)
    assert D.values[0, 0] == 0.0


def test_pairwise_euclidean_matches_double_loop(rng):
    X = EmbeddingMatrix.from_array(rng.normal(size=(5, 4)))
    D = pairwise_distance_matrix(X, MetricKind("euclidean")).values
    V = X.as_float64()
    for i in range(5):
        for j in range(5):
            acc = 0.0
            for t in range(4):
                diff = V[i, t] - V[j, t]
                acc += diff * diff
            if i < j:
                assert D[i, j] == math.sqrt(acc)
            assert D[i, j] == D[j, i]


def test_pairwise_normalized_equals_prenormalized(rng):
    from owcluster import l2_normalize

    X = EmbeddingMatrix.from_array(rng.normal(size=(12, 5)))
    direct = pairwise_distance_matrix(X, MetricKind("manhattan", normalized=True))
    via = pairwise_distance_matrix(l2_normalize(X), MetricKind("manhattan"))
    assert np.array_equal(direct.values, via.values)


@pytest.mark.parametrize("metric", ALL_POINTWISE, ids=lambda m: m.kind)
def test_pairwise_validates(rng, metric):
    X = EmbeddingMatrix.from_array(rng.normal(size=(10, 4)) + 2.0)
    pairwise_distance_matrix(X, metric).validate()


@pytest.mark.parametrize("kind", ["euclidean", "manhattan", "chebyshev"])
def test_triangle_inequality(rng, kind):
    metric = MetricKind(kind)
    for _ in range(200):
        a, b, c = rng.normal(size=(3, 6))
        ab = vector_distance(a, b, metric)
        bc = vector_distance(b, c, metric)
        ac = vector_distance(a, c, metric)
        assert ac <= ab + bc + 1e-9


def test_scaling_behavior(rng):
    X = rng.normal(size=(8, 5))
    c = 3.7
    for kind in ("euclidean", "manhattan", "chebyshev"):
        m = MetricKind(kind)
        for i in range(4):
            d1 = vector_distance(X[i], X[i + 4], m)
            d2 = vector_distance(c * X[i], c * X[i + 4], m)
            assert d2 == pytest.approx(c * d1, rel=1e-6)
    m = MetricKind("cosine")
    for i in range(4):
        d1 = vector_distance(X[i], X[i + 4], m)
        d2 = vector_distance(c * X[i], c * X[i + 4], m)
        assert d2 == pytest.approx(d1, abs=1e-6)


# ---------------------------------------------------------------------------
# kNN graphs


def test_knn_complete_graph(rng):
    X = EmbeddingMatrix.from_array(rng.normal(size=(7, 3)))
    g = build_knn_graph(X, 6, MetricKind("euclidean"))
    assert (g.degrees() == 6).all()


def test_knn_k_too_large(rng):
    X = EmbeddingMatrix.from_array(rng.normal(size=(5, 2)))
    with pytest.raises(KTooLarge):
        build_knn_graph(X, 5, MetricKind("euclidean"))


def test_knn_collinear_hand_case():
    X = EmbeddingMatrix.from_array([[0.0], [1.0], [2.0], [10.0]])
    g = build_knn_graph(X, 1, MetricKind("euclidean"), symmetrize=True)
    undirected = set()
    for i in range(4):
        for j in g.neighbors(i)[0]:
            undirected.add((min(i, int(j)), max(i, int(j))))
    assert undirected == {(0, 1), (1, 2), (2, 3)}


def test_knn_matches_bruteforce_with_tiebreak(rng):
    # integer coordinates force plenty of distance ties
    X = EmbeddingMatrix.from_array(rng.integers(0, 3, size=(30, 2)).astype(float))
    k = 5
    g = build_knn_graph(X, k, MetricKind("manhattan"), symmetrize=False)
    D = pairwise_distance_matrix(X, MetricKind("manhattan")).values
    for i in range(30):
        ranked = sorted((D[i, j], j) for j in range(30) if j != i)
        expected = [j for _, j in ranked[:k]]
        got = list(g.neighbors(i)[0])
        assert got == expected


def test_knn_edge_weights_match_metric(rng):
    X = EmbeddingMatrix.from_array(rng.normal(size=(15, 4)))
    g = build_knn_graph(X, 3, MetricKind("euclidean"))
    D = pairwise_distance_matrix(X, MetricKind("euclidean")).values
    for i in range(15):
        nbrs, w = g.neighbors(i)
        for j, wij in zip(nbrs, w):
            assert wij == D[i, j]


# ---------------------------------------------------------------------------
# geodesic distances


def test_geodesic_chain():
    g = graph_from_edges(3, [(0, 1), (1, 2)])
    G = geodesic_distance_matrix(g)
    assert G.values[0, 2] == pytest.approx(2.0, abs=1e-12)


def test_geodesic_matches_floyd_warshall(rng):
    for _ in range(10):
        n = int(rng.integers(10, 40))
        X = EmbeddingMatrix.from_array(rng.normal(size=(n, 3)))
        g = build_knn_graph(X, 4, MetricKind("euclidean"))
        G = geodesic_distance_matrix(g)
        edges, weights = graph_edge_list(g)
        oracle = floyd_warshall(n, edges, weights)
        if np.isinf(oracle).any():
            # component repair added edges; restrict the check to one component
            mask = np.isfinite(oracle[0])
            assert np.allclose(G.values[np.ix_(mask, mask)], oracle[np.ix_(mask, mask)], atol=1e-9)
        else:
            assert np.allclose(G.values, oracle, atol=1e-9)


def test_geodesic_at_least_direct_on_edges(rng):
    X = EmbeddingMatrix.from_array(rng.normal(size=(25, 3)))
    g = build_knn_graph(X, 4, MetricKind("euclidean"))
    G = geodesic_distance_matrix(g).values
    for i in range(25):
        nbrs, w = g.neighbors(i)
        for j, wij in zip(nbrs, w):
            assert G[i, j] <= wij + 1e-12  # the edge itself is a path
    D = pairwise_distance_matrix(X, MetricKind("euclidean")).values
    assert (G >= D - 1e-9).all()


def test_geodesic_disconnected_repair():
    # two far clusters, k=1: kNN graph falls apart, repair must bridge it
    X = EmbeddingMatrix.from_array(
        [[0.0], [0.1], [0.2], [100.0], [100.1], [100.2]]
    )
    g = build_knn_graph(X, 1, MetricKind("euclidean"))
    G = geodesic_distance_matrix(g)
    assert np.isfinite(G.values).all()
    assert G.values[0, 3] >= 99.0


def helix(n=200, turns=3.0, radius=1.0, pitch=0.2):
    t = np.linspace(0, 2 * math.pi * turns, n)
    pts = np.stack(
        [radius * np.cos(t), radius * np.sin(t), pitch * t], axis=1
    )
    arclength = t * math.sqrt(radius**2 + pitch**2)
    return pts, arclength


def test_helix_geodesic_tracks_arclength():
    pts, arclength = helix()
    X = EmbeddingMatrix.from_array(pts)
    g = build_knn_graph(X, 5, MetricKind("euclidean"))
    G = geodesic_distance_matrix(g).values
    geo_corr = spearman(G[0], arclength)
    eud = pairwise_distance_matrix(X, MetricKind("euclidean")).values
    euc_corr = spearman(eud[0], arclength)
    assert geo_corr >= 0.99
    assert euc_corr < geo_corr
