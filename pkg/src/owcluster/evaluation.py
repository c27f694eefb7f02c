"""Ground-truth evaluation: Hungarian-matched accuracy, normalized mutual
information, and the adjusted Rand index. All three are label-permutation
invariant and returned as fractions in [0, 1] (ARI may go negative)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import LengthMismatch
from .model import ClusterAssignment, LabelVector


def _as_labels(x) -> np.ndarray:
    if isinstance(x, ClusterAssignment):
        return x.assignment
    if isinstance(x, LabelVector):
        return x.labels
    return np.ascontiguousarray(x, dtype=np.int64)


def _compact(labels: np.ndarray) -> np.ndarray:
    _, compact = np.unique(labels, return_inverse=True)
    return compact


@dataclass
class ContingencyTable:
    """Co-occurrence counts between two labelings plus the pair statistics
    (pairs grouped together in both / separated in both)."""

    counts: np.ndarray
    n: int
    pair_agreements: int
    pair_disagreements: int

    @classmethod
    def from_labels(cls, pred, truth) -> "ContingencyTable":
        p = _as_labels(pred)
        t = _as_labels(truth)
        if p.shape[0] != t.shape[0]:
            raise LengthMismatch(f"lengths differ: {p.shape[0]} vs {t.shape[0]}")
        p = _compact(p)
        t = _compact(t)
        kp = int(p.max()) + 1 if p.size else 0
        kt = int(t.max()) + 1 if t.size else 0
        counts = np.zeros((kp, kt), dtype=np.int64)
        np.add.at(counts, (p, t), 1)
        n = int(p.shape[0])

        def _pairs(v):
            return int(np.sum(v * (v - 1) // 2))

        together_both = _pairs(counts.ravel())
        same_pred = _pairs(counts.sum(axis=1))
        same_truth = _pairs(counts.sum(axis=0))
        total = n * (n - 1) // 2
        apart_both = total - same_pred - same_truth + together_both
        return cls(counts, n, together_both, apart_both)


def clustering_accuracy(pred, truth) -> float:
    """Accuracy under the best injective cluster-to-class matching, found by
    solving the assignment problem on the (padded) contingency table."""
    table = ContingencyTable.from_labels(pred, truth)
    counts = table.counts
    size = max(counts.shape)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[: counts.shape[0], : counts.shape[1]] = counts
    cost = padded.max() - padded
    rows, cols = linear_sum_assignment(cost)
    return float(padded[rows, cols].sum()) / table.n


def _entropy(freq: np.ndarray, n: int) -> float:
    p = freq[freq > 0] / n
    return float(-np.sum(p * np.log(p)))


def nmi(pred, truth) -> float:
    """Mutual information normalized by the geometric mean of the marginal
    entropies (natural log; the base cancels). Two trivial single-cluster
    partitions define NMI = 1."""
    table = ContingencyTable.from_labels(pred, truth)
    counts = table.counts
    n = table.n
    rows = counts.sum(axis=1)
    cols = counts.sum(axis=0)
    h_pred = _entropy(rows, n)
    h_truth = _entropy(cols, n)
    if h_pred == 0.0 and h_truth == 0.0:
        return 1.0
    if h_pred == 0.0 or h_truth == 0.0:
        return 0.0
    nz = counts > 0
    pij = counts[nz] / n
    pi = (rows[:, None] / n * np.ones_like(counts, dtype=np.float64))[nz]
    pj = (np.ones_like(counts, dtype=np.float64) * (cols[None, :] / n))[nz]
    mi = float(np.sum(pij * np.log(pij / (pi * pj))))
    if mi <= 0.0:
        return 0.0
    return float(min(1.0, mi / np.sqrt(h_pred * h_truth)))


def ari(pred, truth) -> float:
    """Adjusted Rand index via the pair-counting closed form."""
    table = ContingencyTable.from_labels(pred, truth)
    counts = table.counts
    n = table.n

    def _pairs(v):
        return float(np.sum(v * (v - 1) / 2.0))

    sum_ij = _pairs(counts.ravel().astype(np.float64))
    sum_i = _pairs(counts.sum(axis=1).astype(np.float64))
    sum_j = _pairs(counts.sum(axis=0).astype(np.float64))
    total = n * (n - 1) / 2.0
    expected = sum_i * sum_j / total if total > 0 else 0.0
    maximum = 0.5 * (sum_i + sum_j)
    if maximum == expected:
        return 1.0
    return float((sum_ij - expected) / (maximum - expected))
