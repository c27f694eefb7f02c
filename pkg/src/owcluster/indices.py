"""Internal cluster validity indices (silhouette, Calinski-Harabasz,
Davies-Bouldin) and the average clustering coefficient of a kNN graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CoincidentCentroids,
    DegenerateAllPoints,
    GraphNotSymmetrized,
    SingleCluster,
)
from .model import ClusterAssignment, DistanceMatrix, EmbeddingMatrix, KnnGraph


@dataclass
class CviWorkspace:
    """Intermediate quantities behind the three indices: per-point mean
    intra/nearest-other distances (a, b), per-cluster scatter S, pair scores
    R, and the scatter-matrix traces."""

    a: np.ndarray
    b: np.ndarray
    S: np.ndarray
    R: np.ndarray
    trace_B: float
    trace_W: float


def _onehot(assignment: np.ndarray, k: int) -> np.ndarray:
    M = np.zeros((assignment.shape[0], k))
    M[np.arange(assignment.shape[0]), assignment] = 1.0
    return M


def silhouette_samples(
    D: DistanceMatrix, A: ClusterAssignment
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-point (a, b, s): mean intra-cluster distance, mean distance to the
    nearest other cluster, and the silhouette (b - a) / max(a, b).
    Points in singleton clusters score 0."""
    if A.k < 2:
        raise SingleCluster("silhouette needs at least two clusters")
    labels = A.assignment
    sums = D.values @ _onehot(labels, A.k)  # (n, K) distance sums per cluster
    sizes = A.sizes.astype(np.float64)
    own = sums[np.arange(A.n), labels]
    own_size = sizes[labels]
    a = np.where(own_size > 1, own / np.maximum(own_size - 1, 1), 0.0)
    other = sums / sizes[None, :]
    other[np.arange(A.n), labels] = np.inf
    b = other.min(axis=1)
    denom = np.maximum(a, b)
    s = np.where(
        (own_size > 1) & (denom > 0), (b - a) / np.where(denom > 0, denom, 1.0), 0.0
    )
    return a, b, s


def silhouette_score(D: DistanceMatrix, A: ClusterAssignment) -> float:
    """Mean silhouette over all points, in [-1, 1]."""
    _, _, s = silhouette_samples(D, A)
    return float(s.mean())


def scatter_traces(X: EmbeddingMatrix, A: ClusterAssignment) -> tuple[float, float]:
    """(trace_B, trace_W): between-cluster and within-cluster scatter traces."""
    V = X.as_float64()
    mu = V.mean(axis=0)
    trace_B = 0.0
    trace_W = 0.0
    for j in range(A.k):
        member = V[A.assignment == j]
        mu_j = member.mean(axis=0)
        trace_B += member.shape[0] * float(np.sum((mu_j - mu) ** 2))
        trace_W += float(np.sum((member - mu_j) ** 2))
    return trace_B, trace_W


def calinski_harabasz(X: EmbeddingMatrix, A: ClusterAssignment) -> float:
    """trace(B)(N-K) / (trace(W)(K-1)); +inf when every cluster is a single
    repeated point (zero within-scatter)."""
    if A.k < 2:
        raise SingleCluster("Calinski-Harabasz needs at least two clusters")
    if A.n <= A.k:
        raise DegenerateAllPoints("need more points than clusters")
    trace_B, trace_W = scatter_traces(X, A)
    if trace_W == 0.0:
        return float("inf")
    return trace_B * (A.n - A.k) / (trace_W * (A.k - 1))


def davies_bouldin_details(
    X: EmbeddingMatrix, A: ClusterAssignment
) -> tuple[np.ndarray, np.ndarray]:
    """(S, R): per-cluster mean distance to centroid and the pair scores
    R_ij = (S_i + S_j) / ||mu_i - mu_j||."""
    if A.k < 2:
        raise SingleCluster("Davies-Bouldin needs at least two clusters")
    V = X.as_float64()
    centroids = np.zeros((A.k, V.shape[1]))
    S = np.zeros(A.k)
    for j in range(A.k):
        member = V[A.assignment == j]
        centroids[j] = member.mean(axis=0)
        S[j] = float(np.mean(np.sqrt(np.sum((member - centroids[j]) ** 2, axis=1))))
    R = np.zeros((A.k, A.k))
    for i in range(A.k):
        for j in range(i + 1, A.k):
            sep = float(np.sqrt(np.sum((centroids[i] - centroids[j]) ** 2)))
            if sep < 1e-12:
                raise CoincidentCentroids(i, j)
            R[i, j] = R[j, i] = (S[i] + S[j]) / sep
    return S, R


def davies_bouldin(X: EmbeddingMatrix, A: ClusterAssignment) -> float:
    """Mean over clusters of the worst pair score; smaller is better."""
    _, R = davies_bouldin_details(X, A)
    np.fill_diagonal(R, -np.inf)
    return float(np.mean(R.max(axis=1)))


def cvi_workspace(
    X: EmbeddingMatrix, D: DistanceMatrix, A: ClusterAssignment
) -> CviWorkspace:
    a, b, _ = silhouette_samples(D, A)
    S, R = davies_bouldin_details(X, A)
    trace_B, trace_W = scatter_traces(X, A)
    return CviWorkspace(a=a, b=b, S=S, R=R, trace_B=trace_B, trace_W=trace_W)


@dataclass
class GraphStats:
    """Local clustering coefficients, node degrees, and their mean."""

    local_coefficients: np.ndarray
    degrees: np.ndarray
    average: float


def clustering_stats(graph: KnnGraph) -> GraphStats:
    """Per-node local clustering coefficients of the undirected graph.
    Nodes of degree < 2 contribute 0."""
    if not graph.symmetrized:
        raise GraphNotSymmetrized("clustering coefficient needs the undirected graph")
    adjacency = [set(graph.neighbors(i)[0].tolist()) for i in range(graph.n)]
    local = np.zeros(graph.n)
    degrees = np.array([len(adjacency[i]) for i in range(graph.n)], dtype=np.int64)
    for v in range(graph.n):
        deg = degrees[v]
        if deg < 2:
            continue
        nbrs = sorted(adjacency[v])
        links = 0
        for ui in range(len(nbrs)):
            for wi in range(ui + 1, len(nbrs)):
                if nbrs[wi] in adjacency[nbrs[ui]]:
                    links += 1
        local[v] = 2.0 * links / (deg * (deg - 1))
    return GraphStats(local, degrees, float(local.mean()))


def avg_clustering_coefficient(graph: KnnGraph) -> float:
    return clustering_stats(graph).average
