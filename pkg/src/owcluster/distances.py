"""Vector dissimilarities, pairwise matrices, kNN graphs, and geodesic distances.

Supported metrics: Euclidean, Manhattan, Chebyshev, cosine dissimilarity
(1 - cos theta), Jeffreys divergence (symmetrized KL over a simplex
conversion of the vectors), and geodesic distance (shortest paths on a
symmetrized kNN graph). Each metric has an optional "normalized" variant
that L2-normalizes every vector before measuring.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .errors import (
    DimensionMismatch,
    GeodesicNotPointwise,
    GraphDisconnected,
    GraphNotSymmetrized,
    KTooLarge,
    ZeroRow,
)
from .model import DistanceMatrix, EmbeddingMatrix, KnnGraph

POINTWISE_KINDS = ("euclidean", "manhattan", "chebyshev", "cosine", "jeffreys")
METRIC_KINDS = POINTWISE_KINDS + ("geodesic",)

_SIMPLEX_EPS = 1e-12


@dataclass(frozen=True)
class MetricKind:
    """A dissimilarity choice: base metric, optional L2 pre-normalization,
    and the neighbor count for the geodesic variant."""

    kind: str
    normalized: bool = False
    geodesic_k: int = 10

    def __post_init__(self):
        if self.kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric kind {self.kind!r}")
        if self.kind == "geodesic" and self.geodesic_k < 1:
            raise ValueError("geodesic neighbor count must be >= 1")

    @classmethod
    def parse(cls, text: str, geodesic_k: int = 10) -> "MetricKind":
        """Parse CLI spellings like "euclidean" or "normalized-manhattan"."""
        name = text.strip().lower()
        normalized = False
        if name.startswith("normalized-"):
            normalized = True
            name = name[len("normalized-") :]
        return cls(name, normalized=normalized, geodesic_k=geodesic_k)


def _check_pair(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise DimensionMismatch(f"vector lengths differ: {a.shape[0]} vs {b.shape[0]}")
    return a, b


def _l2_rows(X: np.ndarray) -> np.ndarray:
    norms = np.sqrt(np.sum(X * X, axis=1))
    zero = np.where(norms == 0)[0]
    if zero.size:
        raise ZeroRow(zero[0])
    return X / norms[:, None]


def to_simplex(v: np.ndarray) -> np.ndarray:
    """Shift negative vectors into the positive orthant, smooth by 1e-12,
    and L1-normalize. Vectors that are already probability-like pass through
    (up to the smoothing term)."""
    v = np.asarray(v, dtype=np.float64)
    lo = v.min(axis=-1, keepdims=True)
    v = np.where(lo < 0, v - lo, v) + _SIMPLEX_EPS
    return v / v.sum(axis=-1, keepdims=True)


def jeffreys_divergence(p, q) -> float:
    """Symmetrized KL divergence: sum over both directions, equal to
    sum_i (p_i - q_i) * ln(p_i / q_i) after simplex conversion."""
    p, q = _check_pair(p, q)
    ps = to_simplex(p)
    qs = to_simplex(q)
    return float(np.sum((ps - qs) * (np.log(ps) - np.log(qs))))


def vector_distance(a, b, metric: MetricKind) -> float:
    """Dissimilarity between two vectors under the chosen metric."""
    if metric.kind == "geodesic":
        raise GeodesicNotPointwise()
    a, b = _check_pair(a, b)
    if metric.normalized:
        a, b = _l2_rows(a[None, :])[0], _l2_rows(b[None, :])[0]
    if metric.kind == "euclidean":
        diff = a - b
        return float(np.sqrt(np.sum(diff * diff)))
    if metric.kind == "manhattan":
        return float(np.sum(np.abs(a - b)))
    if metric.kind == "chebyshev":
        return float(np.max(np.abs(a - b))) if a.size else 0.0
    if metric.kind == "cosine":
        na = np.sqrt(np.sum(a * a))
        nb = np.sqrt(np.sum(b * b))
        if na == 0:
            raise ZeroRow(0)
        if nb == 0:
            raise ZeroRow(1)
        return float(1.0 - np.dot(a, b) / (na * nb))
    return jeffreys_divergence(a, b)


def _symmetrize_exact(M: np.ndarray) -> np.ndarray:
    out = np.triu(M, 1)
    out = out + out.T
    np.fill_diagonal(out, 0.0)
    return out


def pairwise_distance_matrix(X: EmbeddingMatrix, metric: MetricKind) -> DistanceMatrix:
    """Full n x n dissimilarity matrix; symmetric with an exactly zero diagonal."""
    if metric.kind == "geodesic":
        raise GeodesicNotPointwise()
    X.validate()
    if metric.normalized:
        from .reduction import l2_normalize

        return pairwise_distance_matrix(
            l2_normalize(X), replace(metric, normalized=False)
        )
    V = X.as_float64()
    n = V.shape[0]
    if metric.kind == "jeffreys":
        P = to_simplex(V)
        logp = np.log(P)
        s = np.sum(P * logp, axis=1)
        cross = P @ logp.T
        M = s[:, None] + s[None, :] - (cross + cross.T)
        np.maximum(M, 0.0, out=M)
    elif metric.kind == "cosine":
        norms = np.sqrt(np.sum(V * V, axis=1))
        zero = np.where(norms == 0)[0]
        if zero.size:
            raise ZeroRow(zero[0])
        U = V / norms[:, None]
        M = 1.0 - U @ U.T
        np.maximum(M, 0.0, out=M)
    else:
        M = np.empty((n, n))
        # row blocks keep the broadcast difference tensor under ~128 MB
        block = max(1, int(128e6 / max(1, 8 * n * V.shape[1])))
        for lo in range(0, n, block):
            hi = min(lo + block, n)
            diff = V[lo:hi, None, :] - V[None, :, :]
            if metric.kind == "euclidean":
                M[lo:hi] = np.sqrt(np.sum(diff * diff, axis=-1))
            elif metric.kind == "manhattan":
                M[lo:hi] = np.sum(np.abs(diff), axis=-1)
            else:
                M[lo:hi] = np.max(np.abs(diff), axis=-1)
    return DistanceMatrix(_symmetrize_exact(M))


def build_knn_graph(
    X: EmbeddingMatrix, k: int, metric: MetricKind, symmetrize: bool = True
) -> KnnGraph:
    """Connect each instance to its k nearest distinct rows under the metric.

    Distance ties break toward the lower row index. With ``symmetrize`` the
    undirected union graph is returned (an edge survives if either endpoint
    selected the other).
    """
    X.validate()
    n = X.n
    if not 1 <= k <= n - 1:
        raise KTooLarge(f"k must lie in [1, n-1]={n - 1}, got {k}")
    D = pairwise_distance_matrix(X, metric).values
    ranked = D.copy()
    np.fill_diagonal(ranked, -1.0)  # self sorts first, then sliced away
    order = np.argsort(ranked, axis=1, kind="stable")
    nbrs = order[:, 1 : k + 1]
    wts = np.take_along_axis(D, nbrs, axis=1)

    src = np.repeat(np.arange(n, dtype=np.int64), k)
    dst = nbrs.ravel().astype(np.int64)
    w = wts.ravel()
    if symmetrize:
        all_src = np.concatenate([src, dst])
        all_dst = np.concatenate([dst, src])
        all_w = np.concatenate([w, w])
        key = all_src * n + all_dst
        uniq, first = np.unique(key, return_index=True)
        src, dst, w = uniq // n, uniq % n, all_w[first]
    indptr = np.searchsorted(src, np.arange(n + 1), side="left").astype(np.int64)
    return KnnGraph(
        n=n,
        k=k,
        indptr=indptr,
        indices=dst.astype(np.int64),
        weights=w,
        symmetrized=symmetrize,
        source_points=X.as_float64(),
        source_metric=metric,
    )


def _connected_components(graph: KnnGraph) -> np.ndarray:
    comp = np.full(graph.n, -1, dtype=np.int64)
    current = 0
    for start in range(graph.n):
        if comp[start] >= 0:
            continue
        stack = [start]
        comp[start] = current
        while stack:
            u = stack.pop()
            nbrs, _ = graph.neighbors(u)
            for v in nbrs:
                if comp[v] < 0:
                    comp[v] = current
                    stack.append(int(v))
        current += 1
    return comp


def _bridge_components(graph: KnnGraph, comp: np.ndarray) -> KnnGraph:
    """Add the minimum-metric edge between every pair of components."""
    if graph.source_points is None or graph.source_metric is None:
        raise GraphDisconnected(
            "graph is disconnected and carries no source points to bridge with"
        )
    X = EmbeddingMatrix.from_array(graph.source_points)
    D = pairwise_distance_matrix(X, graph.source_metric).values
    n_comp = int(comp.max()) + 1
    extra_src, extra_dst, extra_w = [], [], []
    members = [np.where(comp == c)[0] for c in range(n_comp)]
    for a in range(n_comp):
        for b in range(a + 1, n_comp):
            sub = D[np.ix_(members[a], members[b])]
            flat = int(np.argmin(sub))
            i = members[a][flat // sub.shape[1]]
            j = members[b][flat % sub.shape[1]]
            extra_src += [i, j]
            extra_dst += [j, i]
            extra_w += [D[i, j], D[i, j]]
    src = np.concatenate(
        [np.repeat(np.arange(graph.n), np.diff(graph.indptr)), extra_src]
    )
    dst = np.concatenate([graph.indices, extra_dst])
    w = np.concatenate([graph.weights, extra_w])
    order = np.lexsort((dst, src))
    src, dst, w = src[order], dst[order], w[order]
    indptr = np.searchsorted(src, np.arange(graph.n + 1), side="left").astype(np.int64)
    return KnnGraph(
        n=graph.n,
        k=graph.k,
        indptr=indptr,
        indices=dst.astype(np.int64),
        weights=w,
        symmetrized=True,
        source_points=graph.source_points,
        source_metric=graph.source_metric,
    )


def geodesic_distance_matrix(graph: KnnGraph) -> DistanceMatrix:
    """Shortest weighted path lengths between all node pairs.

    Disconnected graphs are first bridged by linking each pair of components
    through their closest points, so every entry is finite.
    """
    if not graph.symmetrized:
        raise GraphNotSymmetrized("geodesic distances need the undirected graph")
    comp = _connected_components(graph)
    if comp.max() > 0:
        graph = _bridge_components(graph, comp)
    M = _kernels.dijkstra_apsp(graph.indptr, graph.indices, graph.weights, graph.n)
    M = np.minimum(M, M.T)
    np.fill_diagonal(M, 0.0)
    return DistanceMatrix(M)
