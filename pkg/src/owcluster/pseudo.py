"""Core-percentile pseudo-labeling: keep the fraction of each cluster
nearest its centroid (in the space the clustering ran in) as trusted
pseudo-labeled instances."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadPercentile
from .model import ClusterAssignment, EmbeddingMatrix


@dataclass
class PseudoLabelSet:
    kept_indices: np.ndarray
    pseudo_labels: np.ndarray
    percentile: float


def core_percentile_labels(
    Y: EmbeddingMatrix, A: ClusterAssignment, percentile: float
) -> PseudoLabelSet:
    """Per cluster, rank members by Euclidean distance to the centroid
    (ties toward the lower index) and keep the closest
    ceil(percentile * size), at least one."""
    if not 0.0 < percentile <= 1.0:
        raise BadPercentile(f"percentile must lie in (0, 1], got {percentile}")
    Y.validate()
    V = Y.as_float64()
    if A.centroids is not None:
        centroids = A.centroids
    else:
        sizes = np.maximum(A.sizes, 1)
        centroids = np.zeros((A.k, V.shape[1]))
        np.add.at(centroids, A.assignment, V)
        centroids /= sizes[:, None]
    dist = np.sqrt(np.sum((V - centroids[A.assignment]) ** 2, axis=1))

    kept: list[np.ndarray] = []
    for j in range(A.k):
        members = np.where(A.assignment == j)[0]
        order = members[np.lexsort((members, dist[members]))]
        keep = max(1, math.ceil(percentile * members.size))
        kept.append(order[:keep])
    kept_indices = np.sort(np.concatenate(kept))
    return PseudoLabelSet(
        kept_indices=kept_indices,
        pseudo_labels=A.assignment[kept_indices],
        percentile=percentile,
    )
