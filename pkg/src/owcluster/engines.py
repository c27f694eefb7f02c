"""Clustering engines: multi-restart k-means with ++-seeding, and the
medoid engines (FasterPAM total-deviation descent, FasterMSC medoid-
silhouette ascent) operating on precomputed distance matrices.

All engines are deterministic given their seed; ties break toward the lower
index and across restarts toward the earlier restart.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import KOutOfRange, KTooLarge
from .model import ClusterAssignment, DistanceMatrix, EmbeddingMatrix, RngSeed, as_seed


@dataclass(frozen=True)
class KMeansConfig:
    k: int
    n_init: int = 50
    max_iter: int = 10000
    tol: float = 1e-6
    seed: int | RngSeed = 0


@dataclass(frozen=True)
class MedoidConfig:
    k: int
    restarts: int = 10
    max_iter: int = 10000
    seed: int | RngSeed = 0
    # which swap engine a generic consumer (estimators, CLI) should run
    algorithm: str = "fasterpam"
    # "objective" keeps each engine's own criterion across restarts;
    # "silhouette" re-scores restarts with the full silhouette instead.
    restart_selection: str = "objective"


def _kmeanspp(X: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = X.shape[0]
    centers = np.empty((k, X.shape[1]))
    chosen = np.zeros(n, dtype=bool)
    first = int(rng.integers(n))
    chosen[first] = True
    centers[0] = X[first]
    closest = np.sum((X - centers[0]) ** 2, axis=1)
    for i in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:  # all remaining points coincide with a center
            idx = int(rng.choice(np.where(~chosen)[0]))
        chosen[idx] = True
        centers[i] = X[idx]
        np.minimum(closest, np.sum((X - centers[i]) ** 2, axis=1), out=closest)
    return centers


def _assign(X: np.ndarray, centers: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x2 = np.sum(X * X, axis=1)[:, None]
    c2 = np.sum(centers * centers, axis=1)[None, :]
    d2 = x2 + c2 - 2.0 * (X @ centers.T)
    np.maximum(d2, 0.0, out=d2)
    labels = np.argmin(d2, axis=1)
    return labels, d2[np.arange(X.shape[0]), labels]


def _lloyd(
    X: np.ndarray, centers: np.ndarray, max_iter: int, tol: float
) -> tuple[np.ndarray, list[float]]:
    k = centers.shape[0]
    trace: list[float] = []
    prev = np.inf
    labels = np.zeros(X.shape[0], dtype=np.int64)
    for _ in range(max_iter):
        labels, d2 = _assign(X, centers)
        inertia = float(d2.sum())
        trace.append(inertia)
        sizes = np.bincount(labels, minlength=k)
        empty = np.where(sizes == 0)[0]
        if empty.size:
            # reseed each dead centroid at the point farthest from it
            used: set[int] = set()
            for j in empty:
                order = np.argsort(np.sum((X - centers[j]) ** 2, axis=1))[::-1]
                pick = next(int(i) for i in order if int(i) not in used)
                used.add(pick)
                centers[j] = X[pick]
            prev = inertia
            continue
        new_centers = np.zeros_like(centers)
        np.add.at(new_centers, labels, X)
        new_centers /= sizes[:, None]
        unchanged = np.array_equal(new_centers, centers)
        centers = new_centers
        if unchanged or (np.isfinite(prev) and (prev - inertia) <= tol * abs(prev)):
            break
        prev = inertia
    return labels, trace


def _means(X: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    sizes = np.bincount(labels, minlength=k)
    means = np.zeros((k, X.shape[1]))
    np.add.at(means, labels, X)
    return means / np.maximum(sizes, 1)[:, None]


def _force_nonempty(X: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    labels = labels.copy()
    for j in np.where(np.bincount(labels, minlength=k) == 0)[0]:
        means = _means(X, labels, k)
        d2 = np.sum((X - means[labels]) ** 2, axis=1)
        sizes = np.bincount(labels, minlength=k)
        movable = sizes[labels] > 1
        d2[~movable] = -1.0
        labels[int(np.argmax(d2))] = j
    return labels


def kmeans(Y: EmbeddingMatrix, cfg: KMeansConfig) -> ClusterAssignment:
    """Best-of-n_init Lloyd iterations from k-means++ seeds, ranked by inertia."""
    Y.validate()
    X = Y.as_float64()
    n = X.shape[0]
    if not 1 <= cfg.k <= n:
        raise KTooLarge(f"k must lie in [1, n]={n}, got {cfg.k}")
    if cfg.k == n:
        labels = np.arange(n, dtype=np.int64)
        return ClusterAssignment.from_labels(
            labels, k=n, points=X, info={"inertia": 0.0, "inertia_trace": [0.0]}
        )
    seed = as_seed(cfg.seed)
    best = None
    for restart in range(cfg.n_init):
        rng = np.random.default_rng([seed, restart])
        centers = _kmeanspp(X, cfg.k, rng)
        labels, trace = _lloyd(X, centers.copy(), cfg.max_iter, cfg.tol)
        sizes = np.bincount(labels, minlength=cfg.k)
        if (sizes == 0).any():
            continue
        means = np.zeros((cfg.k, X.shape[1]))
        np.add.at(means, labels, X)
        means /= sizes[:, None]
        _, d2 = _assign(X, means)
        inertia = float(d2.sum())
        if best is None or inertia < best[0]:
            best = (inertia, labels, trace)
    if best is None:
        # every restart stalled with an empty cluster (massive duplication);
        # fall back to the last run and move far points into the empty slots
        labels = _force_nonempty(X, labels, cfg.k)
        _, d2 = _assign(X, _means(X, labels, cfg.k))
        best = (float(d2.sum()), labels, trace)
    inertia, labels, trace = best
    return ClusterAssignment.from_labels(
        labels, k=cfg.k, points=X, info={"inertia": inertia, "inertia_trace": trace}
    )


def _medoid_labels(medoids: np.ndarray, slots: np.ndarray) -> np.ndarray:
    labels = slots.copy()
    labels[medoids] = np.arange(len(medoids))  # own slot even among duplicates
    return labels


def fasterpam(D: DistanceMatrix, cfg: MedoidConfig) -> ClusterAssignment:
    """k-medoids by eager swap descent on total deviation, best of restarts."""
    D.validate()
    n = D.n
    if not 1 <= cfg.k <= n:
        raise KTooLarge(f"k must lie in [1, n]={n}, got {cfg.k}")
    seed = as_seed(cfg.seed)
    best = None
    for restart in range(cfg.restarts):
        rng = np.random.default_rng([seed, restart])
        medoids = rng.choice(n, size=cfg.k, replace=False).astype(np.int64)
        slots, td, n_swaps = _kernels.fasterpam_swap(D.values, medoids, cfg.max_iter)
        if best is None or td < best[0]:
            best = (td, medoids.copy(), slots, n_swaps)
    td, medoids, slots, n_swaps = best
    labels = _medoid_labels(medoids, slots)
    return ClusterAssignment.from_labels(
        labels,
        k=cfg.k,
        medoid_indices=medoids,
        info={"total_deviation": td, "n_swaps": int(n_swaps)},
    )


def fastermsc(D: DistanceMatrix, cfg: MedoidConfig) -> ClusterAssignment:
    """k-medoids by eager swap ascent on the average medoid silhouette
    (per-point 1 - d1/d2), best of restarts."""
    D.validate()
    n = D.n
    if not 2 <= cfg.k <= n - 1:
        raise KOutOfRange(f"k must lie in [2, n-1]={n - 1}, got {cfg.k}")
    seed = as_seed(cfg.seed)
    candidates = []
    for restart in range(cfg.restarts):
        rng = np.random.default_rng([seed, restart])
        medoids = rng.choice(n, size=cfg.k, replace=False).astype(np.int64)
        slots, total, trace = _kernels.fastermsc_swap(D.values, medoids, cfg.max_iter)
        candidates.append((total / n, medoids.copy(), slots, [t / n for t in trace]))

    if cfg.restart_selection == "silhouette":
        from .indices import silhouette_score

        scored = []
        for ams, medoids, slots, trace in candidates:
            labels = _medoid_labels(medoids, slots)
            a = ClusterAssignment.from_labels(labels, k=cfg.k, medoid_indices=medoids)
            scored.append((silhouette_score(D, a), ams, medoids, slots, trace))
        _, ams, medoids, slots, trace = max(scored, key=lambda t: t[0])
    else:
        ams, medoids, slots, trace = max(candidates, key=lambda t: t[0])

    labels = _medoid_labels(medoids, slots)
    return ClusterAssignment.from_labels(
        labels,
        k=cfg.k,
        medoid_indices=medoids,
        info={"medoid_silhouette": ams, "objective_trace": trace},
    )
