# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: shortest paths, t-SNE gradient, graph layout, medoid swaps.

Scalar-loop kernels replicate the arithmetic of the pure-Python fallback
exactly (same operation order, IEEE doubles, no FP contraction), so results
are bit-identical across backends; see fallback.py for the reference
semantics.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, log, pow

cnp.import_array()

ctypedef unsigned long long u64

cdef u64 MUL64 = 2685821657736338717ULL


cdef inline u64 _xorshift64star(u64* state) nogil:
    cdef u64 s = state[0]
    s ^= s >> 12
    s ^= s << 25
    s ^= s >> 27
    state[0] = s
    return s * MUL64


cdef inline double _clip4(double x) nogil:
    if x > 4.0:
        return 4.0
    if x < -4.0:
        return -4.0
    return x


# ---------------------------------------------------------------------------
# all-pairs shortest paths

cdef void _heap_push(double* keys, long* nodes, long* size, double key, long node) nogil:
    cdef long i = size[0]
    cdef long parent
    keys[i] = key
    nodes[i] = node
    size[0] += 1
    while i > 0:
        parent = (i - 1) >> 1
        if keys[parent] <= keys[i]:
            break
        keys[i], keys[parent] = keys[parent], keys[i]
        nodes[i], nodes[parent] = nodes[parent], nodes[i]
        i = parent


cdef void _heap_pop(double* keys, long* nodes, long* size, double* key, long* node) nogil:
    cdef long i = 0
    cdef long child
    cdef long last = size[0] - 1
    key[0] = keys[0]
    node[0] = nodes[0]
    keys[0] = keys[last]
    nodes[0] = nodes[last]
    size[0] = last
    while True:
        child = 2 * i + 1
        if child >= last:
            break
        if child + 1 < last and keys[child + 1] < keys[child]:
            child += 1
        if keys[i] <= keys[child]:
            break
        keys[i], keys[child] = keys[child], keys[i]
        nodes[i], nodes[child] = nodes[child], nodes[i]
        i = child


def dijkstra_apsp(indptr, indices, weights, long n):
    """All-pairs shortest paths on an undirected CSR graph, one Dijkstra per source."""
    cdef cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int64_t[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    out_arr = np.full((n, n), np.inf)
    cdef double[:, ::1] out = out_arr
    cdef long n_edges = idx.shape[0]
    # worst case every edge pushes once per relaxation
    heap_keys_arr = np.empty(n_edges + n + 1)
    heap_nodes_arr = np.empty(n_edges + n + 1, dtype=np.int64)
    cdef double[::1] heap_keys = heap_keys_arr
    cdef cnp.int64_t[::1] heap_nodes = heap_nodes_arr
    cdef long src, u, v, e, size, node
    cdef double d, nd, key
    cdef long heap_size

    with nogil:
        for src in range(n):
            out[src, src] = 0.0
            heap_size = 0
            _heap_push(&heap_keys[0], <long*>&heap_nodes[0], &heap_size, 0.0, src)
            while heap_size > 0:
                _heap_pop(&heap_keys[0], <long*>&heap_nodes[0], &heap_size, &key, &node)
                u = node
                d = key
                if d > out[src, u]:
                    continue
                for e in range(ip[u], ip[u + 1]):
                    v = idx[e]
                    nd = d + w[e]
                    if nd < out[src, v]:
                        out[src, v] = nd
                        _heap_push(&heap_keys[0], <long*>&heap_nodes[0], &heap_size, nd, v)
    return out_arr


# ---------------------------------------------------------------------------
# t-SNE objective and gradient

def tsne_kl_grad(cnp.ndarray[double, ndim=2] P_arr,
                 cnp.ndarray[double, ndim=2] Y_arr,
                 cnp.ndarray[double, ndim=2] grad_arr):
    """KL objective and its exact gradient; fills grad and returns the KL value."""
    cdef double[:, ::1] P = np.ascontiguousarray(P_arr)
    cdef double[:, ::1] Y = np.ascontiguousarray(Y_arr)
    cdef double[:, ::1] grad = grad_arr
    cdef long n = Y.shape[0]
    cdef long dim = Y.shape[1]
    num_arr = np.empty((n, n))
    cdef double[:, ::1] num = num_arr
    cdef long i, j, d
    cdef double diff, d2, z, q, wij, kl, p

    with nogil:
        z = 0.0
        for i in range(n):
            num[i, i] = 0.0
            for j in range(i + 1, n):
                d2 = 0.0
                for d in range(dim):
                    diff = Y[i, d] - Y[j, d]
                    d2 += diff * diff
                q = 1.0 / (1.0 + d2)
                num[i, j] = q
                num[j, i] = q
                z += 2.0 * q
        kl = 0.0
        for i in range(n):
            for d in range(dim):
                grad[i, d] = 0.0
            for j in range(n):
                if i == j:
                    continue
                q = num[i, j] / z
                if q < 1e-300:
                    q = 1e-300
                p = P[i, j]
                if p > 0.0:
                    kl += p * log(p / q)
                wij = (p - q) * num[i, j]
                for d in range(dim):
                    grad[i, d] += 4.0 * wij * (Y[i, d] - Y[j, d])
    return kl


# ---------------------------------------------------------------------------
# fuzzy graph layout (negative-sampling SGD)

def umap_layout(cnp.ndarray[double, ndim=2] embedding,
                cnp.ndarray[cnp.int32_t, ndim=1] head,
                cnp.ndarray[cnp.int32_t, ndim=1] tail,
                long n_epochs,
                long n_vertices,
                cnp.ndarray[double, ndim=1] epochs_per_sample_arr,
                double a,
                double b,
                double gamma,
                double initial_alpha,
                long negative_sample_rate,
                cnp.ndarray[cnp.uint64_t, ndim=1] rng_state):
    """Stochastic-gradient layout of a fuzzy graph with negative sampling (in place)."""
    cdef double[:, ::1] emb = embedding
    cdef cnp.int32_t[::1] h = head
    cdef cnp.int32_t[::1] t = tail
    cdef double[::1] eps = epochs_per_sample_arr
    cdef long n_edges = eps.shape[0]
    cdef long dim = emb.shape[1]

    epn_arr = epochs_per_sample_arr / negative_sample_rate
    eons_arr = epochs_per_sample_arr.copy()
    eonns_arr = epn_arr.copy()
    cdef double[::1] epn = epn_arr
    cdef double[::1] eons = eons_arr
    cdef double[::1] eonns = eonns_arr

    cdef u64 state = rng_state[0]
    cdef long epoch, i, j, k, d, p, n_neg
    cdef double alpha, dist_sq, diff, grad_coeff, grad_d

    with nogil:
        for epoch in range(n_epochs):
            alpha = initial_alpha * (1.0 - (<double>epoch) / (<double>n_epochs))
            for i in range(n_edges):
                if eons[i] > epoch:
                    continue
                j = h[i]
                k = t[i]
                dist_sq = 0.0
                for d in range(dim):
                    diff = emb[j, d] - emb[k, d]
                    dist_sq += diff * diff
                if dist_sq > 0.0:
                    grad_coeff = (-2.0 * a * b * pow(dist_sq, b - 1.0)) / (
                        a * pow(dist_sq, b) + 1.0)
                else:
                    grad_coeff = 0.0
                for d in range(dim):
                    grad_d = _clip4(grad_coeff * (emb[j, d] - emb[k, d]))
                    emb[j, d] += grad_d * alpha
                    emb[k, d] -= grad_d * alpha
                eons[i] += eps[i]

                n_neg = <long>((epoch - eonns[i]) / epn[i])
                for p in range(n_neg):
                    k = <long>(_xorshift64star(&state) % (<u64>n_vertices))
                    dist_sq = 0.0
                    for d in range(dim):
                        diff = emb[j, d] - emb[k, d]
                        dist_sq += diff * diff
                    if dist_sq > 0.0:
                        grad_coeff = (2.0 * gamma * b) / (
                            (0.001 + dist_sq) * (a * pow(dist_sq, b) + 1.0))
                    elif j == k:
                        continue
                    else:
                        grad_coeff = 0.0
                    for d in range(dim):
                        if grad_coeff > 0.0:
                            grad_d = _clip4(grad_coeff * (emb[j, d] - emb[k, d]))
                        else:
                            grad_d = 4.0
                        emb[j, d] += grad_d * alpha
                eonns[i] += n_neg * epn[i]
    rng_state[0] = state


# ---------------------------------------------------------------------------
# medoid swap descent

cdef void _medoid_caches(double[:, ::1] D, cnp.int64_t[::1] medoids, long k,
                         cnp.int64_t[::1] i1, cnp.int64_t[::1] i2,
                         double[::1] d1, double[::1] d2, double[::1] d3,
                         bint with_third) nogil:
    cdef long n = D.shape[0]
    cdef long o, m, s1, s2
    cdef double b1, b2, b3, dm
    for o in range(n):
        b1 = INFINITY
        b2 = INFINITY
        b3 = INFINITY
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
        if with_third:
            d3[o] = b3


def fasterpam_swap(cnp.ndarray[double, ndim=2] D_arr,
                   cnp.ndarray[cnp.int64_t, ndim=1] medoids_arr,
                   long max_passes):
    """Eager swap descent on total deviation; returns (assignment, td, n_swaps)."""
    cdef double[:, ::1] D = np.ascontiguousarray(D_arr)
    cdef cnp.int64_t[::1] medoids = medoids_arr
    cdef long n = D.shape[0]
    cdef long k = medoids.shape[0]

    i1_arr = np.zeros(n, dtype=np.int64)
    i2_arr = np.zeros(n, dtype=np.int64)
    d1_arr = np.zeros(n)
    d2_arr = np.zeros(n)
    d3_arr = np.zeros(1)
    corr_arr = np.zeros(k)
    is_medoid_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.int64_t[::1] i1 = i1_arr
    cdef cnp.int64_t[::1] i2 = i2_arr
    cdef double[::1] d1 = d1_arr
    cdef double[::1] d2 = d2_arr
    cdef double[::1] d3 = d3_arr
    cdef double[::1] corr = corr_arr
    cdef cnp.uint8_t[::1] is_medoid = is_medoid_arr

    cdef long p, c, o, r, best_r, n_swaps = 0
    cdef bint improved
    cdef double base, dc, delta_far, reach, best, td

    for o in range(k):
        is_medoid[medoids[o]] = 1
    with nogil:
        _medoid_caches(D, medoids, k, i1, i2, d1, d2, d3, 0)
        for p in range(max_passes):
            improved = 0
            for c in range(n):
                if is_medoid[c]:
                    continue
                base = 0.0
                for r in range(k):
                    corr[r] = 0.0
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
                    is_medoid[medoids[best_r]] = 0
                    medoids[best_r] = c
                    is_medoid[c] = 1
                    _medoid_caches(D, medoids, k, i1, i2, d1, d2, d3, 0)
                    n_swaps += 1
                    improved = 1
            if not improved:
                break
        td = 0.0
        for o in range(n):
            td += d1[o]
    return i1_arr.copy(), td, n_swaps


cdef inline double _msc_s(double dn, double ds) nogil:
    if ds <= 0.0:
        return 0.0
    return 1.0 - dn / ds


def fastermsc_swap(cnp.ndarray[double, ndim=2] D_arr,
                   cnp.ndarray[cnp.int64_t, ndim=1] medoids_arr,
                   long max_passes):
    """Eager swap ascent on the average medoid silhouette.

    Returns (assignment, objective_sum, objective_trace).
    """
    cdef double[:, ::1] D = np.ascontiguousarray(D_arr)
    cdef cnp.int64_t[::1] medoids = medoids_arr
    cdef long n = D.shape[0]
    cdef long k = medoids.shape[0]

    i1_arr = np.zeros(n, dtype=np.int64)
    i2_arr = np.zeros(n, dtype=np.int64)
    d1_arr = np.zeros(n)
    d2_arr = np.zeros(n)
    d3_arr = np.zeros(n)
    corr1_arr = np.zeros(k)
    corr2_arr = np.zeros(k)
    is_medoid_arr = np.zeros(n, dtype=np.uint8)
    cdef cnp.int64_t[::1] i1 = i1_arr
    cdef cnp.int64_t[::1] i2 = i2_arr
    cdef double[::1] d1 = d1_arr
    cdef double[::1] d2 = d2_arr
    cdef double[::1] d3 = d3_arr
    cdef double[::1] corr1 = corr1_arr
    cdef double[::1] corr2 = corr2_arr
    cdef cnp.uint8_t[::1] is_medoid = is_medoid_arr

    cdef long p, c, o, r, best_r
    cdef bint improved
    cdef double base, dc, s_now, s_far, s_1, s_2, best, gain, acc

    trace = []
    for o in range(k):
        is_medoid[medoids[o]] = 1
    with nogil:
        _medoid_caches(D, medoids, k, i1, i2, d1, d2, d3, 1)
        acc = 0.0
        for o in range(n):
            acc += _msc_s(d1[o], d2[o])
    trace.append(acc)
    for p in range(max_passes):
        improved = 0
        with nogil:
            for c in range(n):
                if is_medoid[c]:
                    continue
                base = 0.0
                for r in range(k):
                    corr1[r] = 0.0
                    corr2[r] = 0.0
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
                    is_medoid[medoids[best_r]] = 0
                    medoids[best_r] = c
                    is_medoid[c] = 1
                    _medoid_caches(D, medoids, k, i1, i2, d1, d2, d3, 1)
                    improved = 1
                    acc = 0.0
                    for o in range(n):
                        acc += _msc_s(d1[o], d2[o])
                    with gil:
                        trace.append(acc)
        if not improved:
            break
    return i1_arr.copy(), trace[len(trace) - 1], trace
