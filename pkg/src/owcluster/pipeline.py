"""End-to-end workflow: embeddings -> normalize -> reduce -> cluster (or
estimate k) -> internal indices -> external metrics (when labels exist).

Every stage failure is re-raised as a StageError tagged with the stage name
so the CLI can report where a run died.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .distances import MetricKind, build_knn_graph, geodesic_distance_matrix, pairwise_distance_matrix
from .engines import KMeansConfig, MedoidConfig, fasterpam, fastermsc, kmeans
from .errors import LengthMismatch, OwclusterError, StageError
from .evaluation import ari, clustering_accuracy, nmi
from .indices import avg_clustering_coefficient, calinski_harabasz, davies_bouldin, silhouette_score
from .io import read_embedding_file, read_labels_file
from .model import ClusterAssignment, EmbeddingMatrix, LabelVector
from .pseudo import core_percentile_labels
from .reduction import ReducerConfig, l2_normalize, reduce_embeddings
from .selection import BayesOptConfig, SweepResult, bayes_estimate, sweep_estimate

ENGINES = ("kmeans", "fasterpam", "fastermsc")


@dataclass(frozen=True)
class PipelineConfig:
    input: str
    format: str = "auto"
    labels: str = "embedded"  # "embedded", "none", or a path
    normalize: bool = True
    reducer: ReducerConfig = field(default_factory=ReducerConfig)
    engine: str = "kmeans"
    metric: str = "euclidean"
    geodesic_k: int = 10
    n_init: int = 50
    restarts: int = 10
    engine_max_iter: int = 10000
    restart_selection: str = "objective"
    k: int | None = None
    k_min: int | None = None
    k_max: int | None = None
    estimator: str = "sweep"
    budget: int | None = None
    init_points: int = 3
    percentile: float | None = None
    cvi_neighbors: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.engine not in ENGINES:
            raise ValueError(f"unknown engine {self.engine!r}")
        if self.estimator not in ("sweep", "bayes"):
            raise ValueError(f"unknown estimator {self.estimator!r}")


@dataclass
class RunReport:
    chosen_k: int
    assignment: list[int]
    internal: dict[str, Any]
    external: dict[str, Any] | None
    trace: list[tuple[int, float]] | None
    config_echo: dict[str, Any]
    seed: int

    def to_dict(self) -> dict[str, Any]:
        return {
            "chosen_k": self.chosen_k,
            "assignment": self.assignment,
            "internal": self.internal,
            "external": self.external,
            "trace": self.trace,
            "config_echo": self.config_echo,
            "seed": self.seed,
        }


def _jsonify(obj):
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, np.ndarray):
        return _jsonify(obj.tolist())
    return obj


def report_json(report: RunReport) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_jsonify(report.to_dict()), indent=2, sort_keys=True) + "\n"


def _stage(name: str, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (OwclusterError, ValueError) as err:
        raise StageError(name, err) from err


def load_input(cfg: PipelineConfig) -> tuple[EmbeddingMatrix, LabelVector | None]:
    mode = cfg.labels if cfg.labels in ("embedded", "none") else "none"
    X, labels = read_embedding_file(cfg.input, fmt=cfg.format, labels_mode=mode)
    if cfg.labels not in ("embedded", "none"):
        labels = read_labels_file(cfg.labels)
    if labels is not None and labels.n != X.n:
        raise LengthMismatch(f"{labels.n} labels for {X.n} instances")
    return X, labels


def _metric_kind(cfg: PipelineConfig) -> MetricKind:
    return MetricKind.parse(cfg.metric, geodesic_k=cfg.geodesic_k)


def _engine_distances(Y: EmbeddingMatrix, metric: MetricKind):
    if metric.kind == "geodesic":
        graph = build_knn_graph(
            Y, min(metric.geodesic_k, Y.n - 1), MetricKind("euclidean", normalized=metric.normalized)
        )
        return geodesic_distance_matrix(graph)
    return pairwise_distance_matrix(Y, metric)


def _cluster_fixed_k(Y: EmbeddingMatrix, cfg: PipelineConfig) -> ClusterAssignment:
    if cfg.engine == "kmeans":
        return kmeans(
            Y,
            KMeansConfig(
                k=cfg.k, n_init=cfg.n_init, max_iter=cfg.engine_max_iter, seed=cfg.seed
            ),
        )
    D = _engine_distances(Y, _metric_kind(cfg))
    medoid_cfg = MedoidConfig(
        k=cfg.k,
        restarts=cfg.restarts,
        max_iter=cfg.engine_max_iter,
        seed=cfg.seed,
        algorithm=cfg.engine,
        restart_selection=cfg.restart_selection,
    )
    return (fastermsc if cfg.engine == "fastermsc" else fasterpam)(D, medoid_cfg)


def _estimation_engine(cfg: PipelineConfig):
    if cfg.engine == "kmeans":
        return KMeansConfig(
            k=2, n_init=cfg.n_init, max_iter=cfg.engine_max_iter, seed=cfg.seed
        )
    return MedoidConfig(
        k=2,
        restarts=cfg.restarts,
        max_iter=cfg.engine_max_iter,
        seed=cfg.seed,
        algorithm=cfg.engine,
        restart_selection=cfg.restart_selection,
    )


def internal_indices(Y: EmbeddingMatrix, A: ClusterAssignment, cvi_neighbors: int) -> dict:
    """The four internal scores on the clustered space; silhouette uses
    Euclidean distances, the clustering coefficient a kNN graph."""
    out: dict[str, Any] = {}
    if A.k >= 2:
        D = pairwise_distance_matrix(Y, MetricKind("euclidean"))
        out["silhouette"] = silhouette_score(D, A)
        out["calinski_harabasz"] = calinski_harabasz(Y, A) if A.n > A.k else None
        out["davies_bouldin"] = davies_bouldin(Y, A)
    else:
        out["silhouette"] = None
        out["calinski_harabasz"] = None
        out["davies_bouldin"] = None
    k_graph = min(cvi_neighbors, Y.n - 1)
    graph = build_knn_graph(Y, k_graph, MetricKind("euclidean"), symmetrize=True)
    out["avg_clustering_coefficient"] = avg_clustering_coefficient(graph)
    return out


def external_metrics(A: ClusterAssignment, labels: LabelVector) -> dict:
    return {
        "acc": clustering_accuracy(A, labels),
        "nmi": nmi(A, labels),
        "ari": ari(A, labels),
    }


def _as_percent(value: float) -> float:
    return round(100.0 * value, 1)


def config_echo(cfg: PipelineConfig) -> dict:
    echo = asdict(cfg)
    echo["reducer"] = {k: (int(v) if k == "seed" else v) for k, v in asdict(cfg.reducer).items()}
    return echo


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    """Execute the full workflow and assemble the report."""
    X, labels = _stage("read", load_input, cfg)
    _stage("validate", X.validate)
    if cfg.normalize:
        X = _stage("normalize", l2_normalize, X)
    reducer = cfg.reducer
    if int(reducer.seed) != cfg.seed:
        from dataclasses import replace

        reducer = replace(reducer, seed=cfg.seed)
    Y = _stage("reduce", reduce_embeddings, X, reducer)

    trace = None
    if cfg.k is not None:
        A = _stage("cluster", _cluster_fixed_k, Y, cfg)
        chosen_k = cfg.k
    else:
        if cfg.k_min is None or cfg.k_max is None:
            raise StageError("cluster", ValueError("need --k or --k-min/--k-max"))
        engine = _estimation_engine(cfg)
        if cfg.estimator == "bayes":
            budget = cfg.budget if cfg.budget is not None else min(
                10, cfg.k_max - cfg.k_min + 1
            )
            result: SweepResult = _stage(
                "estimate",
                bayes_estimate,
                Y,
                BayesOptConfig(
                    k_min=cfg.k_min,
                    k_max=cfg.k_max,
                    budget=budget,
                    init_points=cfg.init_points,
                    seed=cfg.seed,
                ),
                engine,
            )
        else:
            result = _stage("estimate", sweep_estimate, Y, cfg.k_min, cfg.k_max, engine)
        A = result.best_labels
        chosen_k = result.best_k
        trace = [(int(k), float(s)) for k, s in result.trace]

    internal = _stage("score", internal_indices, Y, A, cfg.cvi_neighbors)
    external = None
    if labels is not None:
        raw = _stage("evaluate", external_metrics, A, labels)
        external = {key: _as_percent(val) for key, val in raw.items()}

    return RunReport(
        chosen_k=int(chosen_k),
        assignment=[int(c) for c in A.assignment],
        internal=internal,
        external=external,
        trace=trace,
        config_echo=config_echo(cfg),
        seed=cfg.seed,
    )


def run_pseudo_label(cfg: PipelineConfig) -> dict:
    """Pipeline plus core-percentile retention; returns a JSON-ready dict."""
    percentile = cfg.percentile if cfg.percentile is not None else 0.5
    X, labels = _stage("read", load_input, cfg)
    _stage("validate", X.validate)
    if cfg.normalize:
        X = _stage("normalize", l2_normalize, X)
    from dataclasses import replace

    reducer = replace(cfg.reducer, seed=cfg.seed)
    Y = _stage("reduce", reduce_embeddings, X, reducer)
    if cfg.k is not None:
        A = _stage("cluster", _cluster_fixed_k, Y, cfg)
    else:
        if cfg.k_min is None or cfg.k_max is None:
            raise StageError("cluster", ValueError("need --k or --k-min/--k-max"))
        result = _stage("estimate", sweep_estimate, Y, cfg.k_min, cfg.k_max, _estimation_engine(cfg))
        A = result.best_labels
    pseudo = _stage("pseudo-label", core_percentile_labels, Y, A, percentile)
    out = {
        "kept_indices": [int(i) for i in pseudo.kept_indices],
        "pseudo_labels": [int(c) for c in pseudo.pseudo_labels],
        "percentile": percentile,
        "pseudo_accuracy": None,
        "config_echo": config_echo(cfg),
        "seed": cfg.seed,
    }
    if labels is not None:
        kept_truth = labels.labels[pseudo.kept_indices]
        acc = clustering_accuracy(np.asarray(pseudo.pseudo_labels), kept_truth)
        out["pseudo_accuracy"] = _as_percent(acc)
    return out


def run_evaluate(cfg: PipelineConfig, assignment_path: str) -> RunReport:
    """Score a stored assignment against the input's labels and space."""
    X, labels = _stage("read", load_input, cfg)
    _stage("validate", X.validate)
    A = _stage("read", _load_assignment, assignment_path, X.n)
    internal = _stage("score", internal_indices, X, A, cfg.cvi_neighbors)
    external = None
    if labels is not None:
        raw = _stage("evaluate", external_metrics, A, labels)
        external = {key: _as_percent(val) for key, val in raw.items()}
    return RunReport(
        chosen_k=A.k,
        assignment=[int(c) for c in A.assignment],
        internal=internal,
        external=external,
        trace=None,
        config_echo=config_echo(cfg),
        seed=cfg.seed,
    )


def _load_assignment(path: str, n: int) -> ClusterAssignment:
    text = open(path).read().strip()
    if text.startswith("{"):
        data = json.loads(text)
        values = data["assignment"]
    else:
        values = [int(line) for line in text.splitlines() if line.strip()]
    arr = np.asarray(values, dtype=np.int64)
    if arr.shape[0] != n:
        raise LengthMismatch(f"assignment length {arr.shape[0]} != n {n}")
    # compact cluster ids so every cluster in [0, K) is non-empty
    _, compact = np.unique(arr, return_inverse=True)
    return ClusterAssignment.from_labels(compact)
