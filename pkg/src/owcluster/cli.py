"""Command-line interface.

Subcommands: reduce, cluster, estimate-k, evaluate, pseudo-label, pipeline.
Reports are JSON on stdout (and --out when given); `reduce` writes a binary
embedding file instead. Exit code 0 means a report/file was emitted; all
errors go to stderr tagged with the stage that failed.
"""

from __future__ import annotations

import argparse
import json
import secrets
import sys

from .errors import OwclusterError, StageError
from .io import write_embedding_file
from .model import EmbeddingMatrix
from .pipeline import (
    PipelineConfig,
    RunReport,
    _jsonify,
    _stage,
    load_input,
    report_json,
    run_evaluate,
    run_pipeline,
    run_pseudo_label,
)
from .reduction import REDUCER_METHODS, ReducerConfig, l2_normalize, reduce_embeddings


def _io_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--input", required=True, help="embedding file (binary or CSV)")
    p.add_argument("--format", choices=["auto", "owcl", "csv"], default="auto")
    p.add_argument(
        "--labels",
        default="embedded",
        help="'embedded', 'none', or a path to a label file (one id per line)",
    )
    p.add_argument("--out", default=None, help="write the report/output file here")
    p.add_argument("--seed", type=int, default=None, help="64-bit seed; fixes all randomness")
    return p


def _reducer_parser(default_method: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--reducer", choices=list(REDUCER_METHODS), default=default_method)
    p.add_argument("--dims", type=int, default=None, help="output dimensions (method default if omitted)")
    p.add_argument("--perplexity", type=float, default=30.0)
    p.add_argument("--n-neighbors", type=int, default=10)
    p.add_argument("--min-dist", type=float, default=0.1)
    p.add_argument("--max-iter", type=int, default=10000, help="t-SNE iteration cap")
    p.add_argument("--n-epochs", type=int, default=200, help="UMAP layout epochs")
    return p


def _engine_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--engine", choices=["kmeans", "fasterpam", "fastermsc"], default="kmeans")
    p.add_argument(
        "--metric",
        default="euclidean",
        help="medoid-engine metric: euclidean/manhattan/chebyshev/cosine/jeffreys/"
        "geodesic, optionally prefixed 'normalized-'",
    )
    p.add_argument("--geodesic-k", type=int, default=10)
    p.add_argument("--n-init", type=int, default=50, help="k-means restarts")
    p.add_argument("--restarts", type=int, default=10, help="medoid-engine restarts")
    p.add_argument("--engine-max-iter", type=int, default=10000)
    p.add_argument("--restart-selection", choices=["objective", "silhouette"], default="objective")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="owcluster", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    io_p = _io_parser()
    eng_p = _engine_parser()

    p = sub.add_parser("reduce", parents=[io_p, _reducer_parser("umap")],
                       help="normalize + reduce, write a binary embedding file")
    _add_normalize(p, default=True)

    p = sub.add_parser("cluster", parents=[io_p, _reducer_parser("none"), eng_p],
                       help="cluster at a fixed k and report")
    p.add_argument("--k", type=int, required=True)
    _add_normalize(p, default=False)

    p = sub.add_parser("estimate-k", parents=[io_p, _reducer_parser("none"), eng_p],
                       help="estimate the cluster count over [k-min, k-max]")
    _add_estimation(p)
    _add_normalize(p, default=False)

    p = sub.add_parser("evaluate", parents=[io_p],
                       help="score a stored assignment against labels")
    p.add_argument("--assignment", required=True,
                   help="report JSON or text file with one cluster id per line")

    p = sub.add_parser("pseudo-label", parents=[io_p, _reducer_parser("umap"), eng_p],
                       help="pipeline + core-percentile pseudo-labels")
    p.add_argument("--k", type=int, default=None)
    _add_estimation(p)
    p.add_argument("--percentile", type=float, default=0.5)
    _add_normalize(p, default=True)

    p = sub.add_parser("pipeline", parents=[io_p, _reducer_parser("umap"), eng_p],
                       help="normalize -> reduce -> cluster/estimate -> evaluate")
    p.add_argument("--k", type=int, default=None)
    _add_estimation(p)
    _add_normalize(p, default=True)
    return parser


def _add_normalize(p: argparse.ArgumentParser, default: bool) -> None:
    group = p.add_mutually_exclusive_group()
    group.add_argument("--normalize", dest="normalize", action="store_true")
    group.add_argument("--no-normalize", dest="normalize", action="store_false")
    p.set_defaults(normalize=default)


def _add_estimation(p: argparse.ArgumentParser) -> None:
    p.add_argument("--k-min", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--estimator", choices=["sweep", "bayes"], default="sweep")
    p.add_argument("--budget", type=int, default=None, help="bayes evaluation budget")
    p.add_argument("--init-points", type=int, default=3)


def _config_from(args: argparse.Namespace) -> PipelineConfig:
    seed = args.seed if args.seed is not None else secrets.randbits(63)
    reducer = ReducerConfig(
        method=getattr(args, "reducer", "none"),
        target_dims=getattr(args, "dims", None),
        perplexity=getattr(args, "perplexity", 30.0),
        n_neighbors=getattr(args, "n_neighbors", 10),
        min_dist=getattr(args, "min_dist", 0.1),
        max_iter=getattr(args, "max_iter", 10000),
        n_epochs=getattr(args, "n_epochs", 200),
        seed=seed,
    )
    return PipelineConfig(
        input=args.input,
        format=args.format,
        labels=args.labels,
        normalize=getattr(args, "normalize", True),
        reducer=reducer,
        engine=getattr(args, "engine", "kmeans"),
        metric=getattr(args, "metric", "euclidean"),
        geodesic_k=getattr(args, "geodesic_k", 10),
        n_init=getattr(args, "n_init", 50),
        restarts=getattr(args, "restarts", 10),
        engine_max_iter=getattr(args, "engine_max_iter", 10000),
        restart_selection=getattr(args, "restart_selection", "objective"),
        k=getattr(args, "k", None),
        k_min=getattr(args, "k_min", None),
        k_max=getattr(args, "k_max", None),
        estimator=getattr(args, "estimator", "sweep"),
        budget=getattr(args, "budget", None),
        init_points=getattr(args, "init_points", 3),
        percentile=getattr(args, "percentile", None),
        seed=seed,
    )


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _cmd_reduce(cfg: PipelineConfig, out_path: str | None) -> None:
    if not out_path:
        raise StageError("write", ValueError("reduce needs --out for the embedding file"))
    X, labels = _stage("read", load_input, cfg)
    _stage("validate", X.validate)
    if cfg.normalize:
        X = _stage("normalize", l2_normalize, X)
    Y = _stage("reduce", reduce_embeddings, X, cfg.reducer)
    _stage("write", write_embedding_file, out_path, Y, labels)
    sys.stdout.write(f"wrote {Y.n}x{Y.d} embeddings to {out_path}\n")


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = _config_from(args)
    try:
        if args.command == "reduce":
            _cmd_reduce(cfg, args.out)
        elif args.command == "evaluate":
            report = run_evaluate(cfg, args.assignment)
            _emit(report_json(report), args.out)
        elif args.command == "pseudo-label":
            result = run_pseudo_label(cfg)
            _emit(json.dumps(_jsonify(result), indent=2, sort_keys=True) + "\n", args.out)
        else:  # cluster, estimate-k, pipeline
            report: RunReport = run_pipeline(cfg)
            _emit(report_json(report), args.out)
        return 0
    except StageError as err:
        print(f"error {err}", file=sys.stderr)
        return 1
    except OwclusterError as err:
        print(f"error [config] {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
