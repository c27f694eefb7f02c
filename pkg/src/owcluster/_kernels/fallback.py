"""Pure-Python implementations of the hot kernels.

These mirror the compiled extension in ``_core.pyx`` operation for
operation. Scalar loops (graph shortest paths, medoid swaps, embedding
layout) use exactly the same arithmetic and evaluation order as the C code,
so both backends produce bit-identical results; the t-SNE gradient is
vectorized with numpy and agrees with the compiled version to rounding
error (different summation order). Expect the loops here to be 50-500x
slower than the extension.
"""

from __future__ import annotations

import heapq

import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF


def _xorshift64star(state: int) -> tuple[int, int]:
    state ^= (state >> 12) & MASK64
    state = (state ^ (state << 25)) & MASK64
    state ^= (state >> 27) & MASK64
    return state, (state * 2685821657736338717) & MASK64


def dijkstra_apsp(indptr, indices, weights, n: int) -> np.ndarray:
    """All-pairs shortest paths on an undirected CSR graph, one Dijkstra per source."""
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    weights = np.asarray(weights, dtype=np.float64)
    out = np.full((n, n), np.inf)
    for src in range(n):
        dist = out[src]
        dist[src] = 0.0
        heap = [(0.0, src)]
        while heap:
            d, u = heapq.heappop(heap)
            if d > dist[u]:
                continue
            for e in range(indptr[u], indptr[u + 1]):
                v = indices[e]
                nd = d + weights[e]
                if nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
    return out


def tsne_kl_grad(P: np.ndarray, Y: np.ndarray, grad: np.ndarray) -> float:
    """KL objective and its exact gradient for a joint-probability matrix P.

    Fills ``grad`` in place and returns the KL divergence. Vectorized; the
    compiled backend computes the same quantities with scalar loops.
    """
    sq = np.sum(Y * Y, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (Y @ Y.T)
    np.maximum(d2, 0.0, out=d2)
    num = 1.0 / (1.0 + d2)
    np.fill_diagonal(num, 0.0)
    z = num.sum()
    Q = num / z
    np.maximum(Q, 1e-300, out=Q)
    mask = P > 0
    kl = float(np.sum(P[mask] * np.log(P[mask] / Q[mask])))
    W = (P - Q) * num
    grad[:] = 4.0 * (W.sum(axis=1)[:, None] * Y - W @ Y)
    return kl


def _clip4(x: float) -> float:
    if x > 4.0:
        return 4.0
    if x < -4.0:
        return -4.0
    return x


def umap_layout(
    embedding: np.ndarray,
    head: np.ndarray,
    tail: np.ndarray,
    n_epochs: int,
    n_vertices: int,
    epochs_per_sample: np.ndarray,
    a: float,
    b: float,
    gamma: float,
    initial_alpha: float,
    negative_sample_rate: int,
    rng_state: np.ndarray,
) -> None:
    """Stochastic-gradient layout of a fuzzy graph with negative sampling.

    ``embedding`` (n x dim, float64) is updated in place. ``rng_state`` is a
    one-element uint64 array advanced by the xorshift64* draws so callers can
    chain deterministic runs.
    """
    dim = embedding.shape[1]
    n_edges = epochs_per_sample.shape[0]
    epochs_per_negative_sample = epochs_per_sample / negative_sample_rate
    epoch_of_next_sample = epochs_per_sample.copy()
    epoch_of_next_negative_sample = epochs_per_negative_sample.copy()
    state = int(rng_state[0])
    emb = embedding  # in-place row views below

    for epoch in range(n_epochs):
        alpha = initial_alpha * (1.0 - epoch / n_epochs)
        for i in range(n_edges):
            if epoch_of_next_sample[i] > epoch:
                continue
            j = head[i]
            k = tail[i]
            current = emb[j]
            other = emb[k]
            dist_sq = 0.0
            for d in range(dim):
                diff = current[d] - other[d]
                dist_sq += diff * diff
            if dist_sq > 0.0:
                grad_coeff = (-2.0 * a * b * dist_sq ** (b - 1.0)) / (
                    a * dist_sq**b + 1.0
                )
            else:
                grad_coeff = 0.0
            for d in range(dim):
                grad_d = _clip4(grad_coeff * (current[d] - other[d]))
                current[d] += grad_d * alpha
                other[d] -= grad_d * alpha
            epoch_of_next_sample[i] += epochs_per_sample[i]

            n_neg = int(
                (epoch - epoch_of_next_negative_sample[i])
                / epochs_per_negative_sample[i]
            )
            for _ in range(n_neg):
                state, draw = _xorshift64star(state)
                k = draw % n_vertices
                other = emb[k]
                dist_sq = 0.0
                for d in range(dim):
                    diff = current[d] - other[d]
                    dist_sq += diff * diff
                if dist_sq > 0.0:
                    grad_coeff = (2.0 * gamma * b) / (
                        (0.001 + dist_sq) * (a * dist_sq**b + 1.0)
                    )
                elif j == k:
                    continue
                else:
                    grad_coeff = 0.0
                for d in range(dim):
                    if grad_coeff > 0.0:
                        grad_d = _clip4(grad_coeff * (current[d] - other[d]))
                    else:
                        grad_d = 4.0
                    current[d] += grad_d * alpha
            epoch_of_next_negative_sample[i] += (
                n_neg * epochs_per_negative_sample[i]
            )
    rng_state[0] = state


def _update_medoid_caches(D, medoids, i1, i2, d1, d2, d3=None):
    n = D.shape[0]
    k = len(medoids)
    for o in range(n):
        b1 = np.inf
        b2 = np.inf
        b3 = np.inf
        s1 = -1
        s2 = -1
        for m in range(k):
            dm = D[o, medoids[m]]
            if dm < b1:
                b3 = b2
                b2 = b1
                s2 = s1
                b1 = dm
                s1 = m
            elif dm < b2:
                b3 = b2
                b2 = dm
                s2 = m
            elif dm < b3:
                b3 = dm
        i1[o] = s1
        i2[o] = s2
        d1[o] = b1
        d2[o] = b2
        if d3 is not None:
            d3[o] = b3


def fasterpam_swap(D: np.ndarray, medoids: np.ndarray, max_passes: int):
    """Eager swap descent on total deviation from an initial medoid set.

    Returns (assignment, total_deviation, n_swaps). ``medoids`` is updated in
    place. Each candidate point is scored against all k removals in a single
    O(n + k) pass; any strictly improving swap is applied immediately.
    """
    n = D.shape[0]
    k = len(medoids)
    i1 = np.zeros(n, dtype=np.int64)
    i2 = np.zeros(n, dtype=np.int64)
    d1 = np.zeros(n)
    d2 = np.zeros(n)
    is_medoid = np.zeros(n, dtype=bool)
    is_medoid[medoids] = True
    _update_medoid_caches(D, medoids, i1, i2, d1, d2)
    corr = np.zeros(k)
    n_swaps = 0
    for _ in range(max_passes):
        improved = False
        for c in range(n):
            if is_medoid[c]:
                continue
            base = 0.0
            corr[:] = 0.0
            for o in range(n):
                dc = D[o, c]
                delta_far = dc - d1[o] if dc < d1[o] else 0.0
                base += delta_far
                reach = dc if dc < d2[o] else d2[o]
                corr[i1[o]] += (reach - d1[o]) - delta_far
            best_r = 0
            best = corr[0]
            for r in range(1, k):
                if corr[r] < best:
                    best = corr[r]
                    best_r = r
            if base + best < -1e-12:
                is_medoid[medoids[best_r]] = False
                medoids[best_r] = c
                is_medoid[c] = True
                _update_medoid_caches(D, medoids, i1, i2, d1, d2)
                n_swaps += 1
                improved = True
        if not improved:
            break
    td = 0.0
    for o in range(n):
        td += d1[o]
    return i1.copy(), td, n_swaps


def _msc_s(dn, ds) -> float:
    if ds <= 0.0:
        return 0.0
    return 1.0 - dn / ds


def fastermsc_swap(D: np.ndarray, medoids: np.ndarray, max_passes: int):
    """Eager swap ascent on the average medoid silhouette.

    Per-point score is 1 - d1/d2 (distances to the nearest and second-nearest
    medoid, 0 when both are zero). Returns (assignment, objective_sum,
    objective_trace); divide the sum by n for the average. ``medoids`` is
    updated in place.
    """
    n = D.shape[0]
    k = len(medoids)
    i1 = np.zeros(n, dtype=np.int64)
    i2 = np.zeros(n, dtype=np.int64)
    d1 = np.zeros(n)
    d2 = np.zeros(n)
    d3 = np.zeros(n)
    is_medoid = np.zeros(n, dtype=bool)
    is_medoid[medoids] = True
    _update_medoid_caches(D, medoids, i1, i2, d1, d2, d3)
    corr1 = np.zeros(k)
    corr2 = np.zeros(k)

    def total() -> float:
        acc = 0.0
        for o in range(n):
            acc += _msc_s(d1[o], d2[o])
        return acc

    trace = [total()]
    for _ in range(max_passes):
        improved = False
        for c in range(n):
            if is_medoid[c]:
                continue
            base = 0.0
            corr1[:] = 0.0
            corr2[:] = 0.0
            for o in range(n):
                dc = D[o, c]
                s_now = _msc_s(d1[o], d2[o])
                if dc < d1[o]:
                    s_far = _msc_s(dc, d1[o])
                elif dc < d2[o]:
                    s_far = _msc_s(d1[o], dc)
                else:
                    s_far = s_now
                base += s_far - s_now
                if dc < d2[o]:
                    s_1 = _msc_s(dc, d2[o])
                else:
                    s_1 = _msc_s(d2[o], dc if dc < d3[o] else d3[o])
                corr1[i1[o]] += s_1 - s_far
                if dc < d1[o]:
                    s_2 = _msc_s(dc, d1[o])
                else:
                    s_2 = _msc_s(d1[o], dc if dc < d3[o] else d3[o])
                corr2[i2[o]] += s_2 - s_far
            best_r = 0
            best = corr1[0] + corr2[0]
            for r in range(1, k):
                gain = corr1[r] + corr2[r]
                if gain > best:
                    best = gain
                    best_r = r
            if base + best > 1e-12:
                is_medoid[medoids[best_r]] = False
                medoids[best_r] = c
                is_medoid[c] = True
                _update_medoid_caches(D, medoids, i1, i2, d1, d2, d3)
                trace.append(total())
                improved = True
        if not improved:
            break
    return i1.copy(), trace[-1], trace
