"""Cluster-count estimation: exhaustive silhouette sweep, and a budgeted
Gaussian-process search (Matern-5/2 surrogate, expected improvement) over
the same integer range.

Both estimators cluster the reduced space at each candidate k and score with
the silhouette on Euclidean distances; ties break toward smaller k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .distances import MetricKind, pairwise_distance_matrix
from .engines import KMeansConfig, MedoidConfig, fasterpam, fastermsc, kmeans
from .errors import BadRange, BudgetTooSmall
from .indices import silhouette_score
from .model import ClusterAssignment, DistanceMatrix, EmbeddingMatrix, RngSeed

EngineConfig = KMeansConfig | MedoidConfig


@dataclass
class SweepResult:
    best_k: int
    best_labels: ClusterAssignment
    best_sil: float
    trace: list[tuple[int, float]]


def _cluster_at(
    Y: EmbeddingMatrix, D: DistanceMatrix, k: int, engine: EngineConfig
) -> ClusterAssignment:
    if isinstance(engine, KMeansConfig):
        return kmeans(Y, replace(engine, k=k))
    if isinstance(engine, MedoidConfig):
        fn = fastermsc if engine.algorithm == "fastermsc" else fasterpam
        return fn(D, replace(engine, k=k))
    raise TypeError(f"unsupported engine configuration {type(engine).__name__}")


def _check_range(n: int, k_min: int, k_max: int) -> None:
    if not 2 <= k_min <= k_max <= n - 1:
        raise BadRange(f"need 2 <= k_min <= k_max <= n-1={n - 1}, got [{k_min}, {k_max}]")


def sweep_estimate(
    Y: EmbeddingMatrix, k_min: int, k_max: int, engine: EngineConfig
) -> SweepResult:
    """Cluster at every k in [k_min, k_max] and return the silhouette argmax."""
    Y.validate()
    _check_range(Y.n, k_min, k_max)
    D = pairwise_distance_matrix(Y, MetricKind("euclidean"))
    best = None
    trace: list[tuple[int, float]] = []
    for k in range(k_min, k_max + 1):
        labels = _cluster_at(Y, D, k, engine)
        sil = silhouette_score(D, labels)
        trace.append((k, sil))
        if best is None or sil > best[2]:
            best = (k, labels, sil)
    return SweepResult(best[0], best[1], best[2], trace)


@dataclass(frozen=True)
class BayesOptConfig:
    k_min: int
    k_max: int
    budget: int
    init_points: int = 3
    seed: int | RngSeed = 0


def _matern52(r: np.ndarray) -> np.ndarray:
    c = math.sqrt(5.0) * r
    return (1.0 + c + c * c / 3.0) * np.exp(-c)


class _GP:
    """Zero-mean GP on [0, 1] with a Matern-5/2 kernel; the length scale is
    picked by marginal likelihood over a fixed log-grid."""

    _LENGTH_GRID = np.geomspace(0.05, 2.0, 24)

    def __init__(self, x: np.ndarray, y: np.ndarray, noise: float = 1e-6):
        self.x = x
        self.y_mean = float(y.mean())
        self.y = y - self.y_mean
        self.amp = max(float(self.y.var()), 1e-12)
        self.noise = noise
        best = None
        for ell in self._LENGTH_GRID:
            K = self.amp * _matern52(np.abs(x[:, None] - x[None, :]) / ell)
            K[np.diag_indices_from(K)] += noise
            try:
                L = np.linalg.cholesky(K)
            except np.linalg.LinAlgError:
                continue
            alpha = np.linalg.solve(L.T, np.linalg.solve(L, self.y))
            mll = (
                -0.5 * float(self.y @ alpha)
                - float(np.log(np.diag(L)).sum())
                - 0.5 * len(x) * math.log(2 * math.pi)
            )
            if best is None or mll > best[0]:
                best = (mll, ell, L, alpha)
        _, self.ell, self.L, self.alpha = best

    def predict(self, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ks = self.amp * _matern52(np.abs(xs[:, None] - self.x[None, :]) / self.ell)
        mu = ks @ self.alpha + self.y_mean
        v = np.linalg.solve(self.L, ks.T)
        var = np.clip(self.amp - np.sum(v * v, axis=0), 0.0, None)
        return mu, np.sqrt(var)


def _expected_improvement(mu: np.ndarray, sigma: np.ndarray, best: float) -> np.ndarray:
    from scipy.special import erf

    z = np.zeros_like(mu)
    np.divide(mu - best, sigma, out=z, where=sigma > 0)
    phi = np.exp(-0.5 * z * z) / math.sqrt(2 * math.pi)
    cdf = 0.5 * (1.0 + erf(z / math.sqrt(2)))
    ei = sigma * (z * cdf + phi)
    ei[sigma <= 0] = 0.0
    return ei


def bayes_estimate(
    Y: EmbeddingMatrix, cfg: BayesOptConfig, engine: EngineConfig
) -> SweepResult:
    """Silhouette maximization over k with exactly cfg.budget evaluations:
    evenly spaced initial points, then GP + expected-improvement picks,
    never repeating a k."""
    Y.validate()
    _check_range(Y.n, cfg.k_min, cfg.k_max)
    n_candidates = cfg.k_max - cfg.k_min + 1
    if cfg.budget > n_candidates:
        raise BadRange(f"budget {cfg.budget} exceeds the {n_candidates} candidate k values")
    if cfg.budget <= cfg.init_points:
        raise BudgetTooSmall(f"budget must exceed init_points={cfg.init_points}")

    D = pairwise_distance_matrix(Y, MetricKind("euclidean"))
    span = max(cfg.k_max - cfg.k_min, 1)
    evaluated: dict[int, tuple[float, ClusterAssignment]] = {}
    trace: list[tuple[int, float]] = []

    def _evaluate(k: int) -> None:
        labels = _cluster_at(Y, D, k, engine)
        sil = silhouette_score(D, labels)
        evaluated[k] = (sil, labels)
        trace.append((k, sil))

    init = np.unique(
        np.rint(np.linspace(cfg.k_min, cfg.k_max, cfg.init_points)).astype(int)
    )
    for k in init:
        _evaluate(int(k))
    free = [k for k in range(cfg.k_min, cfg.k_max + 1) if k not in evaluated]
    while len(evaluated) < cfg.budget and free:
        xs = np.array(sorted(evaluated), dtype=np.float64)
        ys = np.array([evaluated[int(k)][0] for k in xs])
        gp = _GP((xs - cfg.k_min) / span, ys)
        grid = np.linspace(0.0, 1.0, 1001)
        mu, sigma = gp.predict(grid)
        ei = _expected_improvement(mu, sigma, float(ys.max()))
        k_cont = cfg.k_min + grid[int(np.argmax(ei))] * span
        # nearest unevaluated integer, ties toward smaller k
        k_next = min(free, key=lambda k: (abs(k - k_cont), k))
        _evaluate(k_next)
        free.remove(k_next)

    best_k = min(evaluated, key=lambda k: (-evaluated[k][0], k))
    sil, labels = evaluated[best_k]
    return SweepResult(best_k, labels, sil, trace)
