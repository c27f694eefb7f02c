"""Shared test utilities: synthetic data generators and independent oracles.

Oracles here are deliberately naive (scalar loops, exhaustive enumeration)
so they stay independent of the library's vectorized/compiled paths.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from owcluster import ClusterAssignment, EmbeddingMatrix, KnnGraph


def make_blobs(rng, n_per: int, n_blobs: int, d: int, sep: float = 10.0, sigma: float = 1.0):
    """Gaussian blobs with centers `sep` apart (pairwise, in expectation)."""
    centers = rng.normal(size=(n_blobs, d))
    centers *= sep / max(
        1e-12, np.sqrt(((centers[0] - centers[1]) ** 2).sum()) if n_blobs > 1 else 1.0
    )
    X = np.vstack([rng.normal(size=(n_per, d)) * sigma + c for c in centers])
    labels = np.repeat(np.arange(n_blobs), n_per)
    return EmbeddingMatrix.from_array(X), labels


def separated_blobs(rng, n_per: int, n_blobs: int, d: int, sep: float = 10.0, sigma: float = 1.0):
    """Blobs with centers placed at scaled one-hot corners: guaranteed
    pairwise separation sep*sqrt(2)."""
    centers = np.zeros((n_blobs, d))
    for j in range(n_blobs):
        centers[j, j % d] = sep * (1 + j // d)
    X = np.vstack([rng.normal(size=(n_per, d)) * sigma + c for c in centers])
    labels = np.repeat(np.arange(n_blobs), n_per)
    perm = rng.permutation(len(labels))
    return EmbeddingMatrix.from_array(X[perm]), labels[perm]


def random_assignment(rng, n: int, k: int) -> ClusterAssignment:
    """Random labels with every cluster guaranteed non-empty."""
    labels = rng.integers(0, k, size=n)
    labels[:k] = rng.permutation(k)
    return ClusterAssignment.from_labels(labels, k=k)


def graph_from_edges(n: int, edges, weights=None) -> KnnGraph:
    """Build a symmetrized KnnGraph from an undirected edge list."""
    adj = {i: {} for i in range(n)}
    for idx, (u, v) in enumerate(edges):
        w = 1.0 if weights is None else float(weights[idx])
        adj[u][v] = w
        adj[v][u] = w
    indptr = [0]
    indices = []
    wts = []
    for i in range(n):
        for j in sorted(adj[i]):
            indices.append(j)
            wts.append(adj[i][j])
        indptr.append(len(indices))
    return KnnGraph(
        n=n,
        k=max((len(adj[i]) for i in range(n)), default=0),
        indptr=np.array(indptr, dtype=np.int64),
        indices=np.array(indices, dtype=np.int64),
        weights=np.array(wts),
        symmetrized=True,
    )


# ---------------------------------------------------------------------------
# oracles

def floyd_warshall(n: int, edges, weights) -> np.ndarray:
    dist = np.full((n, n), np.inf)
    np.fill_diagonal(dist, 0.0)
    for (u, v), w in zip(edges, weights):
        dist[u, v] = min(dist[u, v], w)
        dist[v, u] = min(dist[v, u], w)
    for k in range(n):
        dist = np.minimum(dist, dist[:, k][:, None] + dist[k, :][None, :])
    return dist


def graph_edge_list(graph: KnnGraph):
    edges, weights = [], []
    for i in range(graph.n):
        nbrs, w = graph.neighbors(i)
        for j, wij in zip(nbrs, w):
            edges.append((i, int(j)))
            weights.append(float(wij))
    return edges, weights


def silhouette_oracle(D: np.ndarray, labels: np.ndarray) -> float:
    n = len(labels)
    ks = np.unique(labels)
    scores = []
    for i in range(n):
        own = [j for j in range(n) if labels[j] == labels[i] and j != i]
        if not own:
            scores.append(0.0)
            continue
        a = sum(D[i, j] for j in own) / len(own)
        b = math.inf
        for c in ks:
            if c == labels[i]:
                continue
            members = [j for j in range(n) if labels[j] == c]
            b = min(b, sum(D[i, j] for j in members) / len(members))
        m = max(a, b)
        scores.append(0.0 if m == 0 else (b - a) / m)
    return sum(scores) / n


def chi_oracle(X: np.ndarray, labels: np.ndarray) -> float:
    n, _ = X.shape
    ks = np.unique(labels)
    mu = X.mean(axis=0)
    B = np.zeros((X.shape[1], X.shape[1]))
    W = np.zeros_like(B)
    for c in ks:
        members = X[labels == c]
        mu_c = members.mean(axis=0)
        B += len(members) * np.outer(mu_c - mu, mu_c - mu)
        for row in members:
            W += np.outer(row - mu_c, row - mu_c)
    k = len(ks)
    return (np.trace(B) * (n - k)) / (np.trace(W) * (k - 1))


def dbi_oracle(X: np.ndarray, labels: np.ndarray) -> float:
    ks = sorted(np.unique(labels))
    S = {}
    mus = {}
    for c in ks:
        members = X[labels == c]
        mus[c] = members.mean(axis=0)
        S[c] = np.mean([math.sqrt(((row - mus[c]) ** 2).sum()) for row in members])
    total = 0.0
    for i in ks:
        worst = 0.0
        for j in ks:
            if i == j:
                continue
            sep = math.sqrt(((mus[i] - mus[j]) ** 2).sum())
            worst = max(worst, (S[i] + S[j]) / sep)
        total += worst
    return total / len(ks)


def acc_bruteforce(pred: np.ndarray, truth: np.ndarray) -> float:
    """Maximum matched fraction over all injective cluster->class maps."""
    ps = list(np.unique(pred))
    ts = list(np.unique(truth))
    small, large = (ps, ts) if len(ps) <= len(ts) else (ts, ps)
    counts = {}
    for p, t in zip(pred, truth):
        counts[(p, t)] = counts.get((p, t), 0) + 1
    best = 0
    for perm in itertools.permutations(large, len(small)):
        if len(ps) <= len(ts):
            score = sum(counts.get((s, g), 0) for s, g in zip(small, perm))
        else:
            score = sum(counts.get((g, s), 0) for s, g in zip(small, perm))
        best = max(best, score)
    return best / len(pred)


def ari_pairs_oracle(pred: np.ndarray, truth: np.ndarray) -> float:
    """ARI from O(n^2) pair enumeration: RI, E[RI], max RI from pair counts."""
    n = len(pred)
    together_both = together_pred = together_truth = 0
    for i in range(n):
        for j in range(i + 1, n):
            sp = pred[i] == pred[j]
            st = truth[i] == truth[j]
            together_pred += sp
            together_truth += st
            together_both += sp and st
    total = n * (n - 1) / 2
    expected = together_pred * together_truth / total
    maximum = 0.5 * (together_pred + together_truth)
    if maximum == expected:
        return 1.0
    return (together_both - expected) / (maximum - expected)


def pam_enumeration(D: np.ndarray, k: int):
    """Exhaustive best total deviation over all medoid subsets."""
    n = D.shape[0]
    best = (math.inf, None)
    for subset in itertools.combinations(range(n), k):
        td = sum(min(D[o, m] for m in subset) for o in range(n))
        if td < best[0]:
            best = (td, subset)
    return best


def msc_score(D: np.ndarray, medoids) -> float:
    """Average medoid silhouette (1 - d1/d2, 0/0 -> 0) for a medoid set."""
    total = 0.0
    for o in range(D.shape[0]):
        ds = sorted(D[o, m] for m in medoids)
        d1, d2 = ds[0], ds[1]
        total += 0.0 if d2 <= 0 else 1.0 - d1 / d2
    return total / D.shape[0]


def msc_enumeration(D: np.ndarray, k: int):
    best = (-math.inf, None)
    for subset in itertools.combinations(range(D.shape[0]), k):
        s = msc_score(D, subset)
        if s > best[0]:
            best = (s, subset)
    return best


def spearman(x, y) -> float:
    from scipy.stats import spearmanr

    return float(spearmanr(x, y).statistic)
