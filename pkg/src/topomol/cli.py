"""Command-line front end for reproduction runs.

Subcommands: featurize, evaluate, benchmark, expressivity, importance.
All randomness flows from the --seeds argument; reruns with identical
configuration and inputs produce byte-identical numeric outputs
(benchmark timing values excepted). Output formats are JSON documents
plus CSV/NPZ feature matrices.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import datasets, featurizer, forest, metrics
from .expressivity import count_indistinguishable
from .featurizer import FeaturizerConfig, FeatureMatrix
from .forest import ForestConfig
from .metrics import EvalReport, UndefinedMetricError

ABLATION_FLAGS = {
    "no-degree": {"use_degree_features": False},
    "no-edges": {"use_edge_features": False},
    "no-atom-bond": {"use_atom_bond_features": False},
    "no-reduced-bins": {"reduced_degree_bins": False},
    "no-drop-constant": {"drop_constant_columns": False},
}


class CliError(ValueError):
    pass


def _parse_seeds(text: Optional[str]) -> List[int]:
    if text is None:
        return list(range(10))
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if part:
            seeds.append(int(part))
    if not seeds:
        raise CliError("seed list must be non-empty")
    return seeds


def _featurizer_config(args) -> FeaturizerConfig:
    overrides: Dict[str, object] = {}
    for name in args.ablate or []:
        if name not in ABLATION_FLAGS:
            raise CliError(
                f"unknown ablation {name!r}; choose from {sorted(ABLATION_FLAGS)}"
            )
        overrides.update(ABLATION_FLAGS[name])
    if args.bins is not None:
        overrides["bins"] = args.bins
    return FeaturizerConfig(**overrides)


def _load_inputs(args):
    task_columns = [c.strip() for c in args.tasks.split(",") if c.strip()]
    if not task_columns:
        raise CliError("--tasks must name at least one label column")
    ds = datasets.load_csv_dataset(
        args.dataset, args.smiles_col, task_columns, strict=args.strict
    )
    if ds.n_molecules == 0:
        raise CliError(f"{args.dataset}: no molecules loaded")
    split = datasets.load_split(args.split_dir)
    split.validate_for(ds.n_molecules)
    return ds, split


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
        fh.write("\n")


def _skip_manifest(ds: datasets.LabeledDataset) -> List[dict]:
    return [
        {"row": s.row, "smiles": s.smiles, "reason": s.reason} for s in ds.skipped
    ]


def cmd_featurize(args) -> int:
    ds, split = _load_inputs(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    config = _featurizer_config(args)
    train_graphs = [ds.graphs[i] for i in split.train]
    model = featurizer.fit(train_graphs, config)
    model.save(out / "featurizer.json")

    for name, indices in (
        ("train", split.train),
        ("valid", split.valid),
        ("test", split.test),
    ):
        part = [ds.graphs[i] for i in indices]
        matrix = featurizer.transform_collection(part, model, workers=args.workers)
        matrix.write_csv(out / f"features_{name}.csv")
        matrix.write_npz(out / f"features_{name}.npz")
    _write_json(
        out / "skipped.json",
        {"n_skipped": len(ds.skipped), "rows": _skip_manifest(ds)},
    )
    print(f"featurize: n_bins={model.n_bins} columns={model.n_features} -> {out}")
    return 0


def _score_matrix(
    metric: str, proba: np.ndarray, labels: np.ndarray, missing: np.ndarray
) -> List[Optional[float]]:
    """Per-task metric values; None where the task is undefined."""
    per_task: List[Optional[float]] = []
    fn = metrics.auroc if metric == "auroc" else metrics.average_precision
    for t in range(labels.shape[1]):
        keep = ~missing[:, t]
        if keep.sum() == 0:
            per_task.append(None)
            continue
        try:
            per_task.append(
                fn(proba[keep, t].tolist(), [int(v) for v in labels[keep, t]])
            )
        except UndefinedMetricError:
            per_task.append(None)
    if all(v is None for v in per_task):
        raise UndefinedMetricError(f"{metric} undefined for every task")
    return per_task


def _forest_config(args, seed: int) -> ForestConfig:
    return ForestConfig(
        n_trees=args.trees,
        min_samples_split=args.min_samples_split,
        seed=seed,
    )


def run_evaluation(ds, split, fconfig, args):
    """Fit featurizer on train rows only, then train/score one forest per
    seed. Returns (model, reports dict keyed by part name)."""
    train_graphs = [ds.graphs[i] for i in split.train]
    model = featurizer.fit(train_graphs, fconfig)

    parts = {}
    for name, indices in (
        ("train", split.train),
        ("valid", split.valid),
        ("test", split.test),
    ):
        idx = list(indices)
        graphs = [ds.graphs[i] for i in idx]
        parts[name] = (
            featurizer.transform_collection(graphs, model, workers=args.workers),
            ds.labels[idx],
            ds.missing[idx],
        )

    x_train, y_train, miss_train = parts["train"]
    seeds = _parse_seeds(args.seeds)
    per_seed: Dict[str, List[List[Optional[float]]]] = {"valid": [], "test": []}
    for seed in seeds:
        fo = forest.train(x_train.data, y_train, miss_train, _forest_config(args, seed))
        for name in ("valid", "test"):
            matrix, labels, missing = parts[name]
            proba = forest.predict_proba(fo, matrix.data)
            per_seed[name].append(_score_matrix(args.metric, proba, labels, missing))

    reports = {
        name: EvalReport(
            metric=args.metric,
            seeds=seeds,
            task_names=ds.task_names,
            per_seed_task=per_seed[name],
        )
        for name in ("valid", "test")
    }
    return model, reports


def cmd_evaluate(args) -> int:
    ds, split = _load_inputs(args)
    fconfig = _featurizer_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    model, reports = run_evaluation(ds, split, fconfig, args)
    model.save(out / "featurizer.json")
    for name, report in reports.items():
        with open(out / f"report_{name}.json", "w", encoding="utf-8") as fh:
            fh.write(report.to_json())
            fh.write("\n")
    _write_json(
        out / "skipped.json",
        {"n_skipped": len(ds.skipped), "rows": _skip_manifest(ds)},
    )
    for name in ("valid", "test"):
        report = reports[name]
        print(
            f"{name} {args.metric}: mean={report.mean():.4f} std={report.std():.4f} "
            f"({len(report.seeds)} seeds)"
        )
    return 0


def cmd_benchmark(args) -> int:
    ds, split = _load_inputs(args)
    fconfig = _featurizer_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    train_graphs = [ds.graphs[i] for i in split.train]
    model = featurizer.fit(train_graphs, fconfig)
    matrix = featurizer.transform_collection(ds.graphs, model, workers=args.workers)
    t_featurize = time.perf_counter() - t0

    idx = list(split.train)
    t0 = time.perf_counter()
    forest.train(
        matrix.data[idx], ds.labels[idx], ds.missing[idx], _forest_config(args, 0)
    )
    t_train = time.perf_counter() - t0

    payload = {
        "n_molecules": ds.n_molecules,
        "n_tasks": ds.n_tasks,
        "n_features": model.n_features,
        "workers": args.workers,
        "featurize_seconds": t_featurize,
        "train_seconds": t_train,
    }
    _write_json(out / "benchmark.json", payload)
    print(
        f"benchmark: {ds.n_molecules} molecules, featurize {t_featurize:.2f}s, "
        f"train {t_train:.2f}s"
    )
    return 0


def cmd_expressivity(args) -> int:
    graphs = datasets.load_graph6(args.graphs)
    report = count_indistinguishable(graphs, mode=args.mode, n_bins=args.bins)
    payload = {
        "graphs": report.total_graphs,
        "total_pairs": report.total_pairs,
        "indistinguishable_pairs": report.indistinguishable_pairs,
        "bucket_sizes": {str(k): v for k, v in report.bucket_sizes.items()},
        "mode": args.mode,
    }
    if args.out:
        _write_json(Path(args.out) / "expressivity.json", payload)
    print(
        f"expressivity[{args.mode}]: {report.total_graphs} graphs, "
        f"{report.indistinguishable_pairs} undistinguished of "
        f"{report.total_pairs} pairs"
    )
    return 0


def cmd_importance(args) -> int:
    ds, split = _load_inputs(args)
    fconfig = _featurizer_config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    train_graphs = [ds.graphs[i] for i in split.train]
    model = featurizer.fit(train_graphs, fconfig)
    matrix = featurizer.transform_collection(train_graphs, model, workers=args.workers)
    idx = list(split.train)
    y_train = ds.labels[idx]
    miss_train = ds.missing[idx]

    seeds = _parse_seeds(args.seeds)
    per_seed = []
    for seed in seeds:
        fo = forest.train(matrix.data, y_train, miss_train, _forest_config(args, seed))
        importances = forest.feature_importance(fo)
        per_seed.append(
            metrics.aggregate_importance(importances.tolist(), matrix.column_groups)
        )
    mean_map = metrics.mean_group_importance(per_seed)

    payload = {
        "seeds": seeds,
        "per_seed": per_seed,
        "mean": mean_map,
    }
    _write_json(out / "importance.json", payload)
    ranked = sorted(mean_map.items(), key=lambda kv: -kv[1])
    print("importance:", ", ".join(f"{k}={v:.4f}" for k, v in ranked))
    return 0


def _add_dataset_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dataset", required=True, help="CSV file with SMILES and labels")
    p.add_argument("--smiles-col", required=True, help="name of the SMILES column")
    p.add_argument("--tasks", required=True, help="comma-separated label columns")
    p.add_argument("--split-dir", required=True, help="directory with train/valid/test index files")
    p.add_argument("--workers", type=int, default=1, help="featurization worker cap")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--bins", type=int, default=None, help="override histogram bin count")
    p.add_argument(
        "--ablate",
        action="append",
        default=None,
        metavar="FAMILY",
        help=f"disable a feature family; repeatable ({', '.join(sorted(ABLATION_FLAGS))})",
    )
    strictness = p.add_mutually_exclusive_group()
    strictness.add_argument(
        "--strict", dest="strict", action="store_true", default=True,
        help="fail on unparseable SMILES (default)",
    )
    strictness.add_argument(
        "--lenient", dest="strict", action="store_false",
        help="skip unparseable SMILES, recording them in the skip manifest",
    )


def _add_forest_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trees", type=int, default=1000, help="number of trees")
    p.add_argument(
        "--min-samples-split", type=int, default=10, help="minimum samples to split"
    )
    p.add_argument("--seeds", default=None, help="comma-separated seeds (default 0..9)")
    p.add_argument("--metric", choices=("auroc", "ap"), default="auroc")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topomol",
        description="Topological molecular-graph featurization and evaluation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("featurize", help="fit featurizer on train split, export matrices")
    _add_dataset_args(p)
    p.set_defaults(func=cmd_featurize)

    p = sub.add_parser("evaluate", help="multi-seed train/score run")
    _add_dataset_args(p)
    _add_forest_args(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", help="wall-clock featurization/training times")
    _add_dataset_args(p)
    _add_forest_args(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("expressivity", help="count indistinguishable graph pairs")
    p.add_argument("--graphs", required=True, help="graph6 file")
    p.add_argument("--mode", choices=("histogram", "exact"), default="exact")
    p.add_argument("--bins", type=int, default=None, help="bin count for histogram mode")
    p.add_argument("--out", default=None, help="optional output directory")
    p.set_defaults(func=cmd_expressivity)

    p = sub.add_parser("importance", help="per-group feature importances over seeds")
    _add_dataset_args(p)
    _add_forest_args(p)
    p.set_defaults(func=cmd_importance)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        CliError,
        datasets.DatasetError,
        featurizer.FeaturizerError,
        forest.ForestError,
        UndefinedMetricError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
