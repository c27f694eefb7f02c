"""Dimension reduction: L2 normalization, PCA, classical MDS, Isomap,
exact-gradient t-SNE, and UMAP.

t-SNE follows the reference gradient-descent conventions (PCA init scaled to
1e-4 std, early exaggeration 12 for 250 iterations, learning rate
max(n/12, 50), momentum 0.5 then 0.8, adaptive gains). UMAP builds the fuzzy
neighbor graph with smoothed-kNN bandwidths, symmetrizes with the
probabilistic union, and lays out with negative-sampling SGD. Both are exact
O(n^2) variants intended for datasets that fit in memory.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import curve_fit

from . import _kernels
from .errors import DimsTooLarge, KTooLarge, PerplexityTooLarge, ZeroRow
from .model import DistanceMatrix, EmbeddingMatrix, RngSeed, as_seed

REDUCER_METHODS = ("none", "pca", "mds", "isomap", "tsne", "umap")

# per-method default output dimensions
_DEFAULT_DIMS = {"pca": 30, "mds": 24, "isomap": 32, "tsne": 2, "umap": 3}


@dataclass(frozen=True)
class ReducerConfig:
    """Reducer choice plus hyperparameters; unset fields take the method's
    published defaults (t-SNE 2-D/perplexity 30/10000 iters, UMAP
    3-D/10 neighbors/min_dist 0.1, PCA 30-D, MDS 24-D, Isomap 32-D)."""

    method: str = "umap"
    target_dims: int | None = None
    perplexity: float = 30.0
    n_neighbors: int = 10
    min_dist: float = 0.1
    max_iter: int = 10000
    n_epochs: int = 200
    seed: int | RngSeed = 0

    def __post_init__(self):
        if self.method not in REDUCER_METHODS:
            raise ValueError(f"unknown reducer {self.method!r}")

    def dims(self) -> int | None:
        if self.target_dims is not None:
            return self.target_dims
        return _DEFAULT_DIMS.get(self.method)


def l2_normalize(X: EmbeddingMatrix) -> EmbeddingMatrix:
    """Scale every row to unit Euclidean norm."""
    X.validate()
    V = X.as_float64()
    norms = np.sqrt(np.sum(V * V, axis=1))
    zero = np.where(norms == 0)[0]
    if zero.size:
        raise ZeroRow(zero[0])
    return EmbeddingMatrix.from_array(V / norms[:, None])


def _is_degenerate(V: np.ndarray) -> bool:
    return bool(np.all(V == V[0]))


def _fix_signs(components: np.ndarray) -> np.ndarray:
    """Resolve eigenvector sign ambiguity: largest-|.| entry positive."""
    out = components.copy()
    for i in range(out.shape[0]):
        j = int(np.argmax(np.abs(out[i])))
        if out[i, j] < 0:
            out[i] = -out[i]
    return out


def pca(X: EmbeddingMatrix, dims: int) -> EmbeddingMatrix:
    """Project onto the top principal axes of the covariance matrix."""
    X.validate()
    if dims < 1 or dims > min(X.n - 1, X.d):
        raise DimsTooLarge(
            f"dims must lie in [1, min(n-1, d)]={min(X.n - 1, X.d)}, got {dims}"
        )
    V = X.as_float64()
    centered = V - V.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    components = _fix_signs(vt[:dims])
    return EmbeddingMatrix.from_array(centered @ components.T)


def classical_mds(D: DistanceMatrix, dims: int) -> EmbeddingMatrix:
    """Torgerson's classical scaling: eigendecompose the double-centered
    squared-distance matrix and embed with sqrt-eigenvalue scaling."""
    D.validate()
    n = D.n
    if dims < 1 or dims > n - 1:
        raise DimsTooLarge(f"dims must lie in [1, n-1]={n - 1}, got {dims}")
    sq = D.values**2
    row = sq.mean(axis=1)
    grand = row.mean()
    B = -0.5 * (sq - row[:, None] - row[None, :] + grand)
    evals, evecs = np.linalg.eigh(B)
    order = np.argsort(evals)[::-1][:dims]
    lam = np.clip(evals[order], 0.0, None)
    vecs = _fix_signs(evecs[:, order].T).T
    return EmbeddingMatrix.from_array(vecs * np.sqrt(lam)[None, :])


def isomap(X: EmbeddingMatrix, dims: int, k: int) -> EmbeddingMatrix:
    """Classical MDS on the geodesic distances of the Euclidean kNN graph."""
    from .distances import MetricKind, build_knn_graph, geodesic_distance_matrix

    graph = build_knn_graph(X, k, MetricKind("euclidean"), symmetrize=True)
    return classical_mds(geodesic_distance_matrix(graph), dims)


def _sq_euclidean(V: np.ndarray) -> np.ndarray:
    sq = np.sum(V * V, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (V @ V.T)
    np.maximum(d2, 0.0, out=d2)
    np.fill_diagonal(d2, 0.0)
    return d2


def perplexity_bandwidths(
    sq_dists: np.ndarray, perplexity: float, max_iter: int = 64, tol: float = 1e-5
) -> np.ndarray:
    """Per-point precisions beta = 1/(2 sigma^2) matching the target
    perplexity, found by bisection on the conditional-distribution entropy."""
    n = sq_dists.shape[0]
    beta = np.ones(n)
    beta_min = np.full(n, -np.inf)
    beta_max = np.full(n, np.inf)
    target = math.log(perplexity)
    mask = ~np.eye(n, dtype=bool)
    for _ in range(max_iter):
        logits = -sq_dists * beta[:, None]
        np.putmask(logits, ~mask, -np.inf)
        shift = logits.max(axis=1, keepdims=True)
        expd = np.exp(logits - shift)
        sums = expd.sum(axis=1)
        # entropy in nats: H = ln(sum) - shift-adjusted mean logit
        weighted = np.sum(expd * sq_dists, axis=1) / sums
        entropy = np.log(sums) + shift[:, 0] + beta * weighted
        diff = entropy - target
        done = np.abs(diff) < tol
        if done.all():
            break
        too_high = diff > 0  # entropy too large -> increase beta
        beta_min = np.where(~done & too_high, beta, beta_min)
        beta_max = np.where(~done & ~too_high, beta, beta_max)
        upper = np.isfinite(beta_max)
        lower = np.isfinite(beta_min)
        nxt = np.where(
            too_high,
            np.where(upper, (beta + beta_max) / 2.0, beta * 2.0),
            np.where(lower, (beta + beta_min) / 2.0, beta / 2.0),
        )
        beta = np.where(done, beta, nxt)
    return beta


def _joint_probabilities(V: np.ndarray, perplexity: float) -> tuple[np.ndarray, np.ndarray]:
    d2 = _sq_euclidean(V)
    beta = perplexity_bandwidths(d2, perplexity)
    logits = -d2 * beta[:, None]
    np.fill_diagonal(logits, -np.inf)
    shift = logits.max(axis=1, keepdims=True)
    cond = np.exp(logits - shift)
    cond /= cond.sum(axis=1, keepdims=True)
    P = cond + cond.T
    P /= P.sum()
    np.maximum(P, 1e-12, out=P)
    return P, beta


def tsne_with_info(
    X: EmbeddingMatrix, cfg: ReducerConfig
) -> tuple[EmbeddingMatrix, dict]:
    """Exact-gradient t-SNE; returns the embedding plus diagnostics
    (bandwidth precisions, KL trace, KL at the end of early exaggeration)."""
    X.validate()
    dims = cfg.dims() or 2
    if X.n < 3 * cfg.perplexity:
        raise PerplexityTooLarge(
            f"need n >= 3*perplexity; n={X.n}, perplexity={cfg.perplexity}"
        )
    V = X.as_float64()
    if _is_degenerate(V):
        Y = np.zeros((X.n, dims), dtype=np.float32)
        return EmbeddingMatrix(Y), {"betas": np.ones(X.n), "kl_trace": [], "ee_end_kl": 0.0}

    n = X.n
    P, beta = _joint_probabilities(V, cfg.perplexity)

    Y = pca(X, min(dims, min(n - 1, X.d))).as_float64()
    if Y.shape[1] < dims:
        Y = np.hstack([Y, np.zeros((n, dims - Y.shape[1]))])
    first_std = Y[:, 0].std()
    if first_std > 0:
        Y = Y / first_std * 1e-4

    ee_iters = min(250, cfg.max_iter)
    lr = max(n / 12.0, 50.0)
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    grad = np.zeros_like(Y)
    P_run = P * 12.0
    kl_trace: list[float] = []
    ee_end_kl = None

    for it in range(cfg.max_iter):
        if it == ee_iters:
            P_run = P
        kl = _kernels.tsne_kl_grad(P_run, Y, grad)
        kl_trace.append(kl)
        if it == ee_iters:
            ee_end_kl = kl
        momentum = 0.5 if it < 250 else 0.8
        inc = np.sign(grad) != np.sign(velocity)
        gains = np.where(inc, gains + 0.2, gains * 0.8)
        np.maximum(gains, 0.01, out=gains)
        velocity = momentum * velocity - lr * (gains * grad)
        Y += velocity
        Y -= Y.mean(axis=0)
        if it >= ee_iters and float(np.linalg.norm(grad)) < 1e-7:
            break
    if ee_end_kl is None:
        ee_end_kl = kl_trace[-1] if kl_trace else 0.0
    info = {"betas": beta, "kl_trace": kl_trace, "ee_end_kl": ee_end_kl}
    return EmbeddingMatrix.from_array(Y), info


def tsne(X: EmbeddingMatrix, cfg: ReducerConfig) -> EmbeddingMatrix:
    return tsne_with_info(X, cfg)[0]


def fit_membership_curve(min_dist: float, spread: float = 1.0) -> tuple[float, float]:
    """Least-squares (a, b) so that 1/(1 + a x^(2b)) tracks the piecewise
    target: 1 below min_dist, exp(-(x - min_dist)/spread) beyond it."""

    def curve(x, a, b):
        return 1.0 / (1.0 + a * x ** (2 * b))

    xv = np.linspace(0, spread * 3, 300)
    yv = np.where(xv < min_dist, 1.0, np.exp(-(xv - min_dist) / spread))
    (a, b), _ = curve_fit(curve, xv, yv)
    return float(a), float(b)


def smooth_knn_bandwidths(
    knn_dists: np.ndarray, n_neighbors: int, n_iter: int = 64
) -> tuple[np.ndarray, np.ndarray]:
    """Per-point (sigma, rho): rho is the nearest positive neighbor distance,
    sigma solves sum_j exp(-max(0, d_ij - rho_i)/sigma) = log2(n_neighbors)."""
    n = knn_dists.shape[0]
    target = math.log2(n_neighbors)
    rho = np.zeros(n)
    for i in range(n):
        pos = knn_dists[i][knn_dists[i] > 0]
        if pos.size:
            rho[i] = pos[0]
    adj = np.maximum(knn_dists[:, 1:] - rho[:, None], 0.0)

    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    mid = np.ones(n)
    for _ in range(n_iter):
        psum = np.exp(-adj / mid[:, None]).sum(axis=1)
        err = psum - target
        done = np.abs(err) < 1e-5
        if done.all():
            break
        high = err > 0
        hi = np.where(~done & high, mid, hi)
        lo = np.where(~done & ~high, mid, lo)
        nxt = np.where(
            high,
            (lo + hi) / 2.0,
            np.where(np.isfinite(hi), (lo + hi) / 2.0, mid * 2.0),
        )
        mid = np.where(done, mid, nxt)

    mean_all = knn_dists.mean() if knn_dists.size else 0.0
    row_means = knn_dists.mean(axis=1)
    floor = np.where(rho > 0, 1e-3 * row_means, 1e-3 * mean_all)
    return np.maximum(mid, floor), rho


def _fuzzy_graph(V: np.ndarray, n_neighbors: int) -> np.ndarray:
    """Symmetric fuzzy membership matrix (probabilistic union of the
    directed smoothed-kNN memberships); the k columns include the point
    itself, mirroring the usual neighbor-array convention."""
    n = V.shape[0]
    d2 = _sq_euclidean(V)
    D = np.sqrt(d2)
    ranked = D.copy()
    np.fill_diagonal(ranked, -1.0)
    order = np.argsort(ranked, axis=1, kind="stable")[:, :n_neighbors]
    knn_dists = np.take_along_axis(D, order, axis=1)
    knn_dists[:, 0] = 0.0

    sigma, rho = smooth_knn_bandwidths(knn_dists, n_neighbors)
    W = np.zeros((n, n))
    for i in range(n):
        for col in range(1, n_neighbors):
            j = order[i, col]
            d = knn_dists[i, col]
            if d - rho[i] <= 0.0 or sigma[i] == 0.0:
                val = 1.0
            else:
                val = math.exp(-(d - rho[i]) / sigma[i])
            W[i, j] = val
    return W + W.T - W * W.T


def umap_with_info(
    X: EmbeddingMatrix, cfg: ReducerConfig
) -> tuple[EmbeddingMatrix, dict]:
    """UMAP-style embedding; returns diagnostics with the fitted (a, b)."""
    X.validate()
    dims = cfg.dims() or 3
    if cfg.n_neighbors < 2 or cfg.n_neighbors > X.n - 1:
        raise KTooLarge(
            f"n_neighbors must lie in [2, n-1]={X.n - 1}, got {cfg.n_neighbors}"
        )
    V = X.as_float64()
    n = X.n
    if _is_degenerate(V):
        Y = np.zeros((n, dims), dtype=np.float32)
        return EmbeddingMatrix(Y), {"a": None, "b": None}

    a, b = fit_membership_curve(cfg.min_dist)
    W = _fuzzy_graph(V, cfg.n_neighbors)
    w_max = W.max()
    if w_max > 0:
        W[W < w_max / cfg.n_epochs] = 0.0
    head, tail = np.nonzero(W)
    weights = W[head, tail]
    epochs_per_sample = weights.max() / weights

    rng = np.random.default_rng(as_seed(cfg.seed))
    Y0 = pca(X, min(dims, min(n - 1, X.d))).as_float64()
    if Y0.shape[1] < dims:
        Y0 = np.hstack([Y0, np.zeros((n, dims - Y0.shape[1]))])
    spans = Y0.max(axis=0) - Y0.min(axis=0)
    spans[spans == 0] = 1.0
    Y = 10.0 * (Y0 - Y0.min(axis=0)) / spans
    Y += rng.normal(scale=1e-4, size=Y.shape)

    rng_state = np.array([rng.integers(1, 2**63, dtype=np.uint64)], dtype=np.uint64)
    _kernels.umap_layout(
        Y,
        head.astype(np.int32),
        tail.astype(np.int32),
        int(cfg.n_epochs),
        n,
        epochs_per_sample,
        a,
        b,
        1.0,
        1.0,
        5,
        rng_state,
    )
    return EmbeddingMatrix.from_array(Y), {"a": a, "b": b}


def umap(X: EmbeddingMatrix, cfg: ReducerConfig) -> EmbeddingMatrix:
    return umap_with_info(X, cfg)[0]


def reduce_embeddings(X: EmbeddingMatrix, cfg: ReducerConfig) -> EmbeddingMatrix:
    """Dispatch on cfg.method; 'none' passes the input through."""
    if cfg.method == "none":
        return X
    dims = cfg.dims()
    if dims is not None and dims > X.d:
        raise DimsTooLarge(f"target_dims={dims} exceeds input dimension {X.d}")
    if cfg.method == "pca":
        return pca(X, dims)
    if cfg.method == "mds":
        from .distances import MetricKind, pairwise_distance_matrix

        D = pairwise_distance_matrix(X, MetricKind("euclidean"))
        return classical_mds(D, dims)
    if cfg.method == "isomap":
        return isomap(X, dims, cfg.n_neighbors)
    if cfg.method == "tsne":
        return tsne(X, cfg)
    return umap(X, cfg)
