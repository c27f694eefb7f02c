"""Core data types shared by every stage of the pipeline.

Embeddings are stored as 32-bit floats (matching typical embedding exports);
all downstream aggregation happens in 64-bit arithmetic. Instance identity is
row order: row i of an EmbeddingMatrix is instance i everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .errors import EmptyMatrix, LengthMismatch, NonFiniteValue

MAX_SEED = 2**64 - 1


@dataclass(frozen=True)
class RngSeed:
    """A 64-bit unsigned seed; identical seeds give bit-identical runs."""

    seed: int

    def __post_init__(self):
        if not 0 <= self.seed <= MAX_SEED:
            raise ValueError(f"seed must be in [0, 2^64), got {self.seed}")

    def __int__(self) -> int:
        return self.seed


def as_seed(seed: int | RngSeed) -> int:
    value = int(seed)
    if not 0 <= value <= MAX_SEED:
        raise ValueError(f"seed must be in [0, 2^64), got {value}")
    return value


@dataclass
class EmbeddingMatrix:
    """Dense n x d matrix of instance feature vectors (float32 storage)."""

    values: np.ndarray

    @classmethod
    def from_array(cls, arr) -> "EmbeddingMatrix":
        values = np.ascontiguousarray(arr, dtype=np.float32)
        if values.ndim != 2:
            raise ValueError(f"expected a 2-d array, got ndim={values.ndim}")
        return cls(values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def as_float64(self) -> np.ndarray:
        return self.values.astype(np.float64)

    def validate(self) -> None:
        if self.values.ndim != 2:
            raise ValueError(f"expected a 2-d array, got ndim={self.values.ndim}")
        if self.n < 1 or self.d < 1:
            raise EmptyMatrix(f"matrix must be at least 1x1, got {self.n}x{self.d}")
        finite = np.isfinite(self.values)
        if not finite.all():
            row, col = np.argwhere(~finite)[0]
            raise NonFiniteValue(row, col)


def validate(matrix: EmbeddingMatrix) -> None:
    """Raise unless every EmbeddingMatrix invariant holds."""
    matrix.validate()


@dataclass
class LabelVector:
    """Ground-truth class ids, aligned with embedding rows."""

    labels: np.ndarray

    @classmethod
    def from_array(cls, arr) -> "LabelVector":
        labels = np.ascontiguousarray(arr, dtype=np.int64)
        if labels.ndim != 1:
            raise ValueError("labels must be 1-d")
        if labels.size and labels.min() < 0:
            raise ValueError("class ids must be non-negative")
        return cls(labels)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    def n_classes(self) -> int:
        return int(np.unique(self.labels).size)


@dataclass
class ClusterAssignment:
    """Per-instance cluster index in [0, K) plus per-cluster statistics.

    ``centroids`` (arithmetic means, K x d) and ``medoid_indices`` (row
    indices into the clustered matrix) are both optional; centroid-based
    engines fill the former, medoid-based engines fill both. ``info`` carries
    engine diagnostics (objective value, per-iteration traces).
    """

    assignment: np.ndarray
    k: int
    sizes: np.ndarray
    centroids: np.ndarray | None = None
    medoid_indices: np.ndarray | None = None
    info: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_labels(
        cls,
        assignment,
        k: int | None = None,
        points: np.ndarray | None = None,
        medoid_indices=None,
        info: dict | None = None,
    ) -> "ClusterAssignment":
        assignment = np.ascontiguousarray(assignment, dtype=np.int64)
        if k is None:
            k = int(assignment.max()) + 1 if assignment.size else 0
        sizes = np.bincount(assignment, minlength=k)
        centroids = None
        if points is not None:
            pts = np.asarray(points, dtype=np.float64)
            centroids = np.zeros((k, pts.shape[1]))
            np.add.at(centroids, assignment, pts)
            centroids /= np.maximum(sizes, 1)[:, None]
        if medoid_indices is not None:
            medoid_indices = np.ascontiguousarray(medoid_indices, dtype=np.int64)
        out = cls(assignment, int(k), sizes, centroids, medoid_indices, info or {})
        out.validate()
        return out

    @property
    def n(self) -> int:
        return self.assignment.shape[0]

    def validate(self) -> None:
        if self.assignment.size == 0:
            raise EmptyMatrix("assignment is empty")
        if self.assignment.min() < 0 or self.assignment.max() >= self.k:
            raise ValueError("cluster indices must lie in [0, K)")
        sizes = np.bincount(self.assignment, minlength=self.k)
        if (sizes < 1).any():
            empty = int(np.argmin(sizes))
            raise ValueError(f"cluster {empty} is empty")
        if not np.array_equal(sizes, self.sizes):
            raise ValueError("stored sizes disagree with the assignment")

    def relabeled(self, perm) -> "ClusterAssignment":
        """Apply a cluster-index permutation (perm[old] = new)."""
        perm = np.asarray(perm, dtype=np.int64)
        inv = np.empty_like(perm)
        inv[perm] = np.arange(self.k)
        centroids = None if self.centroids is None else self.centroids[inv]
        medoids = None if self.medoid_indices is None else self.medoid_indices[inv]
        return ClusterAssignment(
            perm[self.assignment], self.k, self.sizes[inv], centroids, medoids
        )


@dataclass
class DistanceMatrix:
    """Symmetric n x n matrix of non-negative dissimilarities."""

    values: np.ndarray

    @classmethod
    def from_array(cls, arr) -> "DistanceMatrix":
        values = np.ascontiguousarray(arr, dtype=np.float64)
        if values.ndim != 2 or values.shape[0] != values.shape[1]:
            raise ValueError("distance matrix must be square")
        return cls(values)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def validate(self) -> None:
        v = self.values
        if v.shape[0] == 0:
            raise EmptyMatrix("distance matrix is empty")
        if not np.isfinite(v).all():
            row, col = np.argwhere(~np.isfinite(v))[0]
            raise NonFiniteValue(row, col)
        if (np.diag(v) != 0).any():
            raise ValueError("diagonal must be exactly zero")
        if not np.array_equal(v, v.T):
            raise ValueError("matrix must be exactly symmetric")
        if (v < 0).any():
            raise ValueError("distances must be non-negative")


@dataclass
class KnnGraph:
    """Weighted k-nearest-neighbor graph in CSR adjacency form.

    Before symmetrization every node has exactly k out-neighbors (never
    itself). ``symmetrize`` returns the undirected union graph. Graphs built
    by ``build_knn_graph`` keep a reference to their source points and metric
    so that disconnected components can be bridged later.
    """

    n: int
    k: int
    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    symmetrized: bool
    source_points: np.ndarray | None = None
    source_metric: Any = None

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def validate(self) -> None:
        if self.indices.shape != self.weights.shape:
            raise LengthMismatch("indices and weights differ in length")
        if self.indptr.shape[0] != self.n + 1:
            raise ValueError("indptr must have n+1 entries")
        if not self.symmetrized:
            if not (np.diff(self.indptr) == self.k).all():
                raise ValueError("each node must have exactly k out-neighbors")
        for i in range(self.n):
            nbrs, _ = self.neighbors(i)
            if (nbrs == i).any():
                raise ValueError(f"node {i} lists itself as a neighbor")
