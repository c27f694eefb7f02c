"""owcluster: unsupervised image-embedding clustering toolkit.

Pipeline: L2-normalize embeddings, reduce dimension (PCA / MDS / Isomap /
t-SNE / UMAP), cluster (k-means / FasterPAM / FasterMSC), estimate the
cluster count from silhouette sweeps or Bayesian optimization, and evaluate
with internal indices plus Hungarian-matched ACC / NMI / ARI when labels
exist.
"""

import os as _os

# OWCLUSTER_THREADS caps BLAS parallelism; must be set before numpy loads.
_threads = _os.environ.get("OWCLUSTER_THREADS")
if _threads and _threads != "0":
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _threads)

from ._kernels import backend_name
from .distances import (
    MetricKind,
    build_knn_graph,
    geodesic_distance_matrix,
    jeffreys_divergence,
    pairwise_distance_matrix,
    vector_distance,
)
from .engines import KMeansConfig, MedoidConfig, fasterpam, fastermsc, kmeans
from .errors import OwclusterError
from .evaluation import ContingencyTable, ari, clustering_accuracy, nmi
from .indices import (
    CviWorkspace,
    GraphStats,
    avg_clustering_coefficient,
    calinski_harabasz,
    clustering_stats,
    cvi_workspace,
    davies_bouldin,
    silhouette_samples,
    silhouette_score,
)
from .io import read_embedding_file, write_embedding_file
from .model import (
    ClusterAssignment,
    DistanceMatrix,
    EmbeddingMatrix,
    KnnGraph,
    LabelVector,
    RngSeed,
    validate,
)
from .pipeline import PipelineConfig, RunReport, report_json, run_pipeline
from .pseudo import PseudoLabelSet, core_percentile_labels
from .reduction import (
    ReducerConfig,
    classical_mds,
    isomap,
    l2_normalize,
    pca,
    reduce_embeddings,
    tsne,
    umap,
)
from .selection import BayesOptConfig, SweepResult, bayes_estimate, sweep_estimate

__version__ = "0.1.0"

__all__ = [
    "BayesOptConfig",
    "ClusterAssignment",
    "ContingencyTable",
    "CviWorkspace",
    "DistanceMatrix",
    "EmbeddingMatrix",
    "GraphStats",
    "KMeansConfig",
    "KnnGraph",
    "LabelVector",
    "MedoidConfig",
    "MetricKind",
    "OwclusterError",
    "PipelineConfig",
    "PseudoLabelSet",
    "ReducerConfig",
    "RngSeed",
    "RunReport",
    "SweepResult",
    "ari",
    "avg_clustering_coefficient",
    "backend_name",
    "bayes_estimate",
    "build_knn_graph",
    "calinski_harabasz",
    "classical_mds",
    "clustering_accuracy",
    "clustering_stats",
    "core_percentile_labels",
    "cvi_workspace",
    "davies_bouldin",
    "fasterpam",
    "fastermsc",
    "geodesic_distance_matrix",
    "isomap",
    "jeffreys_divergence",
    "kmeans",
    "l2_normalize",
    "nmi",
    "pairwise_distance_matrix",
    "pca",
    "read_embedding_file",
    "reduce_embeddings",
    "report_json",
    "run_pipeline",
    "silhouette_samples",
    "silhouette_score",
    "sweep_estimate",
    "tsne",
    "umap",
    "validate",
    "vector_distance",
    "write_embedding_file",
]
