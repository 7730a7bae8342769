"""End-to-end experiment drivers: dataset generation, training, evaluation,
order sweeps, and the depolarizing-transition sweep.

Every sampled state owns an independent random stream derived from
(master seed, role, partition index, state index), so datasets are identical
whether they are generated sequentially or by a worker pool, and any single
row can be regenerated in isolation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from multiprocessing import get_context
from pathlib import Path

import numpy as np

from .classifier import TrainedPipeline, accuracy, fit_pipeline
from .correlators import MomentSpec, estimate_moments
from .dataset_io import (
    Dataset,
    ExperimentConfig,
    canonical_json,
    shape_string,
    write_dataset,
    write_embedding_csv,
    write_score_vs_k,
    write_score_vs_t,
    write_transition_csv,
)
from .errors import InvalidArgumentError
from .fileio import atomic_write_text
from .negativity import partition_log_negativity
from .partitions import format_partition, parse_partition
from .states import (
    depolarize_interpolate,
    derived_rng,
    maximally_mixed,
    purity,
    random_mixed_partitioned,
    random_pure_partitioned,
)

ROLE_TAGS = {"train": 0, "test": 1, "transition": 2, "reference": 3}


def _featurize_mixed(args):
    """Worker task: one labeled mixed state -> (purity, feature values)."""
    (n_qubits, partition_str, n_mixed, t, k, n_unit, master_seed, role_tag, part_idx, state_idx) = args
    p = parse_partition(partition_str)
    rng = derived_rng(master_seed, role_tag, part_idx, state_idx)
    state = random_mixed_partitioned(p, n_mixed, rng)
    fv = estimate_moments(state, MomentSpec(t=t, k=k, n_unit=n_unit), rng)
    return purity(state), fv.values


def _featurize_transition(args):
    """Worker task: one lambda grid point -> (purity, negativity, npt, features)."""
    (n_qubits, partition_str, lam, t, k, n_unit, master_seed, index) = args
    p = parse_partition(partition_str)
    rng = derived_rng(master_seed, ROLE_TAGS["transition"], index)
    psi = random_pure_partitioned(p, rng)
    rho = depolarize_interpolate(psi, lam)
    fv = estimate_moments(rho, MomentSpec(t=t, k=k, n_unit=n_unit), rng)
    report = partition_log_negativity(rho, p)
    return purity(rho), report.total, report.is_npt, fv.values


def _run_tasks(task_fn, tasks, workers: int):
    if workers <= 1:
        return [task_fn(t) for t in tasks]
    # fork keeps worker startup cheap and avoids re-importing __main__; every
    # task reseeds its own stream, so results do not depend on the pool.
    with get_context("fork").Pool(workers) as pool:
        return pool.map(task_fn, tasks, chunksize=max(1, len(tasks) // (workers * 8)))


def generate_dataset(config: ExperimentConfig, role: str, workers: int = 1) -> Dataset:
    """Sample states_per_partition (or the test count) states for every
    partition in scope and featurize them."""
    if role not in ("train", "test"):
        raise InvalidArgumentError(f"role must be 'train' or 'test', got {role!r}")
    parts = config.scope_partitions()
    n_states = config.states_per_partition if role == "train" else config.test_states_per_partition
    print(
        f"featurizing {len(parts) * n_states} {role} states "
        f"({len(parts)} partitions x {n_states}, {workers} worker{'s' if workers != 1 else ''})",
        flush=True,
    )
    tasks = []
    labels = []
    for part_idx, p in enumerate(parts):
        label = format_partition(p)
        for state_idx in range(n_states):
            tasks.append(
                (
                    config.n_qubits,
                    label,
                    config.n_mixed,
                    config.t,
                    config.k,
                    config.n_unit,
                    config.master_seed,
                    ROLE_TAGS[role],
                    part_idx,
                    state_idx,
                )
            )
            labels.append(label)
    results = _run_tasks(_featurize_mixed, tasks, workers)
    purities = np.array([r[0] for r in results])
    features = np.vstack([r[1] for r in results]) if results else np.zeros((0, config.layout.dimension))
    n = len(labels)
    return Dataset(
        config_hash=config.config_hash(),
        role=role,
        layout=config.layout,
        state_ids=np.arange(n, dtype=np.int64),
        labels=labels,
        lams=np.zeros(n),
        purities=purities,
        features=features,
    )


@dataclass
class TrainResult:
    pipeline: TrainedPipeline
    train_accuracy: float


def train_on_dataset(
    dataset: Dataset,
    config: ExperimentConfig,
    t_sel=None,
    k_sel=None,
) -> TrainResult:
    """Fit the standardize -> embed -> tree pipeline on a (sliced) dataset."""
    t_sel = list(config.t) if t_sel is None else list(t_sel)
    k_sel = list(config.k) if k_sel is None else list(k_sel)
    idx = dataset.layout.column_indices(t_sel, k_sel)
    sub_layout = dataset.layout.sliced(t_sel, k_sel)
    labels = dataset.partitions()
    pipeline = fit_pipeline(
        dataset.features[:, idx],
        labels,
        sub_layout,
        config.embedding,
        max_depth=config.max_depth,
        config_hash=config.config_hash(),
    )
    train_pred = pipeline.tree.predict(pipeline.embedding_model.embedding)
    return TrainResult(pipeline=pipeline, train_accuracy=accuracy(train_pred, labels))


def evaluate_pipeline(pipeline: TrainedPipeline, dataset: Dataset) -> dict:
    """Score a pipeline on a dataset with a matching feature layout."""
    full = dataset.layout
    sub = pipeline.layout
    if full == sub:
        feats = dataset.features
    else:
        if not (set(sub.t) <= set(full.t) and set(sub.k) <= set(full.k) and sub.n_qubits == full.n_qubits):
            raise InvalidArgumentError("pipeline layout is not a slice of the dataset layout")
        feats = dataset.features[:, full.column_indices(sub.t, sub.k)]
    truth = dataset.partitions()
    if not truth:
        raise InvalidArgumentError("cannot evaluate on an empty dataset")
    predictions = pipeline.predict(feats)
    confusion: dict[str, dict[str, int]] = {}
    for p, t in zip(predictions, truth):
        row = confusion.setdefault(format_partition(t), {})
        key = format_partition(p)
        row[key] = row.get(key, 0) + 1
    return {"accuracy": accuracy(predictions, truth), "confusion": confusion, "n_test": len(truth)}


def _embedding_rows(dataset: Dataset, pipeline: TrainedPipeline, test_dataset=None, test_coords=None):
    rows = []
    coords = pipeline.embedding_model.embedding
    for i, label in enumerate(dataset.labels):
        p = parse_partition(label)
        rows.append((dataset.state_ids[i], label, shape_string(p), "train", coords[i, 0], coords[i, 1]))
    if test_dataset is not None and test_coords is not None:
        for i, label in enumerate(test_dataset.labels):
            p = parse_partition(label)
            rows.append(
                (test_dataset.state_ids[i], label, shape_string(p), "test", test_coords[i, 0], test_coords[i, 1])
            )
    return rows


def _write_report(out_dir: Path, payload: dict) -> None:
    atomic_write_text(out_dir / "report.json", canonical_json(payload))


def run_moments_compare(config: ExperimentConfig, out_dir, workers: int = 1) -> dict:
    """Train one pipeline per moment order and score each on fresh test data."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_ds = generate_dataset(config, "train", workers)
    test_ds = generate_dataset(config, "test", workers)
    write_dataset(out_dir / "dataset_train.csv", train_ds)
    write_dataset(out_dir / "dataset_test.csv", test_ds)
    chash = config.config_hash()
    scores = []
    for t in config.t:
        result = train_on_dataset(train_ds, config, t_sel=[t])
        idx = train_ds.layout.column_indices([t], config.k)
        test_coords = result.pipeline.embed(test_ds.features[:, idx])
        report = evaluate_pipeline(result.pipeline, test_ds)
        scores.append((t, report["accuracy"]))
        write_embedding_csv(
            out_dir / f"embedding_t{t}.csv",
            chash,
            _embedding_rows(train_ds, result.pipeline, test_ds, test_coords),
        )
        if t == config.t[0]:
            result.pipeline.save(out_dir / "pipeline.json")
    write_score_vs_t(out_dir / "score_vs_t.csv", chash, scores)
    summary = {
        "kind": config.kind,
        "config_hash": chash,
        "scores": {str(t): s for t, s in scores},
        "n_train": train_ds.n_rows,
        "n_test": test_ds.n_rows,
    }
    _write_report(out_dir, summary)
    return summary


def run_all_partitions(config: ExperimentConfig, out_dir, workers: int = 1) -> dict:
    """One pipeline over every partition in scope, scored on fresh test data."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_ds = generate_dataset(config, "train", workers)
    test_ds = generate_dataset(config, "test", workers)
    write_dataset(out_dir / "dataset_train.csv", train_ds)
    write_dataset(out_dir / "dataset_test.csv", test_ds)
    chash = config.config_hash()
    result = train_on_dataset(train_ds, config)
    report = evaluate_pipeline(result.pipeline, test_ds)
    test_coords = result.pipeline.embed(test_ds.features)
    write_embedding_csv(
        out_dir / "embedding.csv", chash, _embedding_rows(train_ds, result.pipeline, test_ds, test_coords)
    )
    result.pipeline.save(out_dir / "pipeline.json")
    summary = {
        "kind": config.kind,
        "config_hash": chash,
        "train_accuracy": result.train_accuracy,
        "test_accuracy": report["accuracy"],
        "n_labels": len(result.pipeline.labels),
        "n_train": train_ds.n_rows,
        "n_test": test_ds.n_rows,
    }
    _write_report(out_dir, summary)
    return summary


def run_orders_compare(config: ExperimentConfig, out_dir, workers: int = 1) -> dict:
    """Score exclusive-order and cumulative-order feature slices per k."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_ds = generate_dataset(config, "train", workers)
    test_ds = generate_dataset(config, "test", workers)
    write_dataset(out_dir / "dataset_train.csv", train_ds)
    write_dataset(out_dir / "dataset_test.csv", test_ds)
    chash = config.config_hash()
    entries = []
    for k in config.k:
        for mode, k_sel in (("exclusive", [k]), ("cumulative", [kk for kk in config.k if kk <= k])):
            result = train_on_dataset(train_ds, config, k_sel=k_sel)
            report = evaluate_pipeline(result.pipeline, test_ds)
            entries.append((config.n_qubits, k, mode, report["accuracy"]))
    write_score_vs_k(out_dir / "score_vs_k.csv", chash, entries)
    summary = {
        "kind": config.kind,
        "config_hash": chash,
        "scores": [
            {"k": k, "mode": mode, "score": s} for (_, k, mode, s) in entries
        ],
        "n_train": train_ds.n_rows,
        "n_test": test_ds.n_rows,
    }
    _write_report(out_dir, summary)
    return summary


def run_transition(config: ExperimentConfig, out_dir, workers: int = 1) -> dict:
    """Sweep the depolarizing interpolation, embed it, and quantify negativity.

    Each lambda grid point gets a freshly drawn pure state of the target
    partition. The maximally mixed state is featurized separately, embedded
    through the trained model, and emitted as a flagged row.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = config.transition
    lams = np.linspace(0.0, 1.0, spec.n_lambda)
    print(
        f"featurizing {spec.n_lambda} interpolation states for {spec.partition} "
        f"({workers} worker{'s' if workers != 1 else ''})",
        flush=True,
    )
    tasks = [
        (config.n_qubits, spec.partition, float(lam), config.t, config.k, config.n_unit, config.master_seed, i)
        for i, lam in enumerate(lams)
    ]
    results = _run_tasks(_featurize_transition, tasks, workers)
    purities = np.array([r[0] for r in results])
    totals = np.array([r[1] for r in results])
    npt = np.array([r[2] for r in results], dtype=bool)
    features = np.vstack([r[3] for r in results])

    dataset = Dataset(
        config_hash=config.config_hash(),
        role="transition",
        layout=config.layout,
        state_ids=np.arange(spec.n_lambda, dtype=np.int64),
        labels=[spec.partition] * spec.n_lambda,
        lams=lams,
        purities=purities,
        features=features,
    )
    write_dataset(out_dir / "dataset_transition.csv", dataset)

    from . import embedding as emb
    from .classifier import fit_standardizer

    standardizer = fit_standardizer(features)
    model = emb.fit(standardizer.apply(features), config.embedding)
    model.save(out_dir / "embedding_model.json")

    rng = derived_rng(config.master_seed, ROLE_TAGS["reference"], 0)
    mm = maximally_mixed(config.n_qubits)
    mm_features = estimate_moments(mm, MomentSpec(t=config.t, k=config.k, n_unit=config.n_unit), rng)
    mm_coords = emb.transform(model, standardizer.apply(mm_features.values))[0]

    entries = [
        (lams[i], purities[i], totals[i], int(npt[i]), 0, model.embedding[i, 0], model.embedding[i, 1])
        for i in range(spec.n_lambda)
    ]
    entries.append((1.0, purity(mm), 0.0, 0, 1, mm_coords[0], mm_coords[1]))
    chash = config.config_hash()
    write_transition_csv(out_dir / "transition.csv", chash, entries)
    summary = {
        "kind": config.kind,
        "config_hash": chash,
        "n_lambda": spec.n_lambda,
        "partition": spec.partition,
        "npt_fraction": float(npt.mean()),
        "embedding_note": "n_neighbours scales with the lambda grid to keep the neighbour/data ratio fixed",
    }
    _write_report(out_dir, summary)
    return summary


RUNNERS = {
    "moments-compare": run_moments_compare,
    "all-partitions": run_all_partitions,
    "orders-compare": run_orders_compare,
    "transition": run_transition,
}


def run_experiment(config: ExperimentConfig, out_dir, workers: int = 1) -> dict:
    return RUNNERS[config.kind](config, out_dir, workers)


def run_reproduce(manifest_path, out_dir, workers: int = 1, scale: str = "desk") -> dict:
    """Run every experiment named in a manifest file into out_dir/<name>/."""
    from .dataset_io import apply_scale, load_config
    from .errors import ConfigError

    manifest_path = Path(manifest_path)
    try:
        manifest = json.loads(manifest_path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError([f"manifest not found: {manifest_path}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"manifest is not valid JSON: {exc}"]) from exc
    if "experiments" not in manifest:
        raise ConfigError(["manifest needs an 'experiments' list"])
    out_dir = Path(out_dir)
    summaries = {}
    for entry in manifest["experiments"]:
        name = entry["name"]
        config = load_config(manifest_path.parent / entry["config"])
        config = apply_scale(config, scale)
        summaries[name] = run_experiment(config, out_dir / name, workers)
    atomic_write_text(out_dir / "reproduce_report.json", canonical_json(summaries))
    return summaries
