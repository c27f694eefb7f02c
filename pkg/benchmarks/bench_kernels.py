"""Benchmark the compiled kernels against the pure-Python fallback.

Usage: python benchmarks/bench_kernels.py [--repeat N]

Sizes are chosen so the fallback finishes in seconds; the compiled column is
what production runs use. The two backends produce identical results (see
tests/test_kernels.py), so only timing differs.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from owcluster import EmbeddingMatrix, MetricKind, build_knn_graph
from owcluster._kernels import get_backend


def time_call(fn, *args, repeat: int) -> float:
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def bench_dijkstra(backend, rng):
    X = EmbeddingMatrix.from_array(rng.normal(size=(400, 3)))
    g = build_knn_graph(X, 8, MetricKind("euclidean"))
    return lambda: backend.dijkstra_apsp(g.indptr, g.indices, g.weights, g.n)


def bench_tsne_grad(backend, rng):
    n, dim = 400, 2
    P = rng.random((n, n))
    P = (P + P.T) / 2
    np.fill_diagonal(P, 0.0)
    P /= P.sum()
    Y = rng.normal(size=(n, dim))
    grad = np.zeros_like(Y)
    return lambda: backend.tsne_kl_grad(P, Y, grad)


def bench_umap_layout(backend, rng):
    n, dim, edges = 400, 3, 8000
    head = rng.integers(0, n, size=edges, dtype=np.int32)
    tail = rng.integers(0, n, size=edges, dtype=np.int32)
    eps = rng.uniform(1.0, 4.0, size=edges)

    def run():
        emb = rng.normal(size=(n, dim))
        state = np.array([42], dtype=np.uint64)
        backend.umap_layout(emb, head, tail, 50, n, eps, 1.577, 0.895, 1.0, 1.0, 5, state)

    return run


def bench_fasterpam(backend, rng):
    pts = rng.normal(size=(300, 3))
    D = np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(-1))
    D = np.triu(D, 1)
    D = D + D.T

    def run():
        medoids = np.arange(8, dtype=np.int64)
        backend.fasterpam_swap(D, medoids, 100)

    return run


def bench_fastermsc(backend, rng):
    pts = rng.normal(size=(300, 3))
    D = np.sqrt(((pts[:, None] - pts[None, :]) ** 2).sum(-1))
    D = np.triu(D, 1)
    D = D + D.T

    def run():
        medoids = np.arange(8, dtype=np.int64)
        backend.fastermsc_swap(D, medoids, 100)

    return run


BENCHES = {
    "dijkstra_apsp (n=400, k=8)": bench_dijkstra,
    "tsne_kl_grad (n=400)": bench_tsne_grad,
    "umap_layout (n=400, 8k edges, 50 epochs)": bench_umap_layout,
    "fasterpam_swap (n=300, k=8)": bench_fasterpam,
    "fastermsc_swap (n=300, k=8)": bench_fastermsc,
}


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    compiled = get_backend("compiled")
    python = get_backend("python")
    if compiled is None:
        print("compiled extension not available; only the fallback will run")

    header = f"{'kernel':45} {'python':>10} {'compiled':>10} {'speedup':>9}"
    print(header)
    print("-" * len(header))
    for name, setup in BENCHES.items():
        rng = np.random.default_rng(0)
        t_py = time_call(setup(python, rng), repeat=args.repeat)
        if compiled is not None:
            rng = np.random.default_rng(0)
            t_cy = time_call(setup(compiled, rng), repeat=args.repeat)
            print(f"{name:45} {t_py:9.4f}s {t_cy:9.4f}s {t_py / t_cy:8.1f}x")
        else:
            print(f"{name:45} {t_py:9.4f}s {'-':>10} {'-':>9}")


if __name__ == "__main__":
    main()
