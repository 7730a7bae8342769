"""Command-line entry point.

Subcommands: gen-dataset, train, evaluate, embed, transition, reproduce.
Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .classifier import TrainedPipeline
from .dataset_io import (
    ExperimentConfig,
    apply_scale,
    canonical_json,
    load_config,
    read_dataset,
    shape_string,
    write_dataset,
    write_embedding_csv,
)
from .fileio import atomic_write_text
from .errors import (
    ConfigError,
    ContractViolationError,
    DatasetParseError,
    EntpartError,
    InvalidArgumentError,
)
from .experiments import (
    evaluate_pipeline,
    generate_dataset,
    run_reproduce,
    run_transition,
    train_on_dataset,
)
from .partitions import parse_partition

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_NUMERIC = 4


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--seed", type=int, default=None, help="override the master seed")
    parser.add_argument("--workers", type=int, default=1, help="worker processes for state featurization")
    parser.add_argument("--sequential", action="store_true", help="force single-worker execution")
    parser.add_argument("--scale", choices=("desk", "paper"), default="desk", help="experiment scale")


def _prepared_config(args) -> ExperimentConfig:
    config = load_config(args.config)
    if args.seed is not None:
        config = replace(config, master_seed=int(args.seed))
        config.validate()
    return apply_scale(config, args.scale)


def _workers(args) -> int:
    return 1 if args.sequential else max(1, args.workers)


def cmd_gen_dataset(args) -> int:
    config = _prepared_config(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    dataset = generate_dataset(config, args.role, _workers(args))
    path = out_dir / f"dataset_{args.role}.csv"
    write_dataset(path, dataset)
    print(f"wrote {dataset.n_rows} rows to {path}")
    return EXIT_OK


def cmd_train(args) -> int:
    config = _prepared_config(args)
    dataset = read_dataset(args.dataset)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if len(set(dataset.labels)) < 2:
        raise ConfigError(["training dataset carries a single label; nothing to classify"])
    result = train_on_dataset(dataset, config)
    result.pipeline.save(out_dir / "pipeline.json")
    rows = [
        (
            dataset.state_ids[i],
            dataset.labels[i],
            shape_string(parse_partition(dataset.labels[i])),
            "train",
            result.pipeline.embedding_model.embedding[i, 0],
            result.pipeline.embedding_model.embedding[i, 1],
        )
        for i in range(dataset.n_rows)
    ]
    write_embedding_csv(out_dir / "embedding.csv", dataset.config_hash, rows)
    report = {
        "train_accuracy": result.train_accuracy,
        "n_rows": dataset.n_rows,
        "n_labels": len(result.pipeline.labels),
        "config_hash": config.config_hash(),
    }
    atomic_write_text(out_dir / "train_report.json", canonical_json(report))
    print(f"trained on {dataset.n_rows} rows; train accuracy {result.train_accuracy:.4f}")
    return EXIT_OK


def cmd_evaluate(args) -> int:
    pipeline = TrainedPipeline.load(args.pipeline)
    dataset = read_dataset(args.dataset)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    report = evaluate_pipeline(pipeline, dataset)
    atomic_write_text(out_dir / "score_report.json", canonical_json(report))
    print(f"test accuracy {report['accuracy']:.4f} on {report['n_test']} rows")
    return EXIT_OK


def cmd_embed(args) -> int:
    pipeline = TrainedPipeline.load(args.pipeline)
    dataset = read_dataset(args.dataset)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    full = dataset.layout
    sub = pipeline.layout
    feats = dataset.features
    if full != sub:
        feats = feats[:, full.column_indices(sub.t, sub.k)]
    coords = pipeline.embed(feats)
    rows = [
        (
            dataset.state_ids[i],
            dataset.labels[i],
            shape_string(parse_partition(dataset.labels[i])),
            "query",
            coords[i, 0],
            coords[i, 1],
        )
        for i in range(dataset.n_rows)
    ]
    path = out_dir / "embedded.csv"
    write_embedding_csv(path, dataset.config_hash, rows)
    print(f"embedded {dataset.n_rows} rows to {path}")
    return EXIT_OK


def cmd_transition(args) -> int:
    config = _prepared_config(args)
    if config.kind != "transition":
        raise ConfigError(["transition command needs a config with kind='transition'"])
    summary = run_transition(config, args.out, _workers(args))
    print(f"transition sweep over {summary['n_lambda']} points; NPT fraction {summary['npt_fraction']:.3f}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    summaries = run_reproduce(args.manifest, args.out, _workers(args), args.scale)
    for name, summary in summaries.items():
        print(f"{name}: done ({summary.get('kind')})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entpart",
        description="Entanglement-partition classification from randomized correlator statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-dataset", help="sample states and write a feature dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--role", choices=("train", "test"), default="train")
    _add_common(p)
    p.set_defaults(fn=cmd_gen_dataset)

    p = sub.add_parser("train", help="fit the standardize/embed/classify pipeline on a dataset")
    p.add_argument("--config", required=True)
    p.add_argument("--dataset", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("evaluate", help="score a trained pipeline on a test dataset")
    p.add_argument("--pipeline", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("embed", help="embed dataset rows through a trained pipeline")
    p.add_argument("--pipeline", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("transition", help="run the depolarizing-transition sweep")
    p.add_argument("--config", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_transition)

    p = sub.add_parser("reproduce", help="run every experiment in a manifest")
    p.add_argument("--manifest", required=True)
    _add_common(p)
    p.set_defaults(fn=cmd_reproduce)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DatasetParseError, FileNotFoundError, InvalidArgumentError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (ContractViolationError, EntpartError, FloatingPointError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
