"""Experiment configuration, dataset/results files, canonical hashing.

File contract: every file this module writes starts with one comment line
``# <schema-tag> <canonical JSON header>`` followed by a CSV header row and
data rows. Floats are serialized with 17 significant digits, so numbers
round-trip exactly and reruns with the same seed produce byte-identical
files. Writers go through a temp file and an atomic rename.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .correlators import FeatureLayout
from .embedding import EmbeddingConfig
from .errors import ConfigError, DatasetParseError
from .fileio import atomic_write_text
from .partitions import SetPartition, all_partitions, ordered_partitions, parse_partition

CONFIG_SCHEMA = "entpart-config/1"
DATASET_SCHEMA = "entpart-dataset/1"
RESULTS_SCHEMA = "entpart-results/1"

EXPERIMENT_KINDS = ("moments-compare", "orders-compare", "all-partitions", "transition")

# Desk scale shrinks the heavy knobs by fixed, documented factors.
DESK_FACTORS = {"states": 0.5, "n_unit": 0.4, "grid": 0.3}


def fmt_float(x: float) -> str:
    return f"{float(x):.17g}"


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


@dataclass(frozen=True)
class TransitionSpec:
    partition: str
    n_lambda: int


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a run needs; hashable canonically for provenance stamps."""

    kind: str
    n_qubits: int
    partition_scope: object  # "all" | "ordered" | list of partition strings
    states_per_partition: int
    test_states_per_partition: int
    n_mixed: int
    t: tuple[int, ...]
    k: tuple[int, ...]
    n_unit: int
    embedding: EmbeddingConfig
    max_depth: int | None
    master_seed: int
    transition: TransitionSpec | None = None

    def validate(self) -> None:
        problems = []
        if self.kind not in EXPERIMENT_KINDS:
            problems.append(f"kind must be one of {EXPERIMENT_KINDS}, got {self.kind!r}")
        if not 1 <= self.n_qubits <= 10:
            problems.append(f"n_qubits must be 1..10, got {self.n_qubits}")
        if isinstance(self.partition_scope, str):
            if self.partition_scope not in ("all", "ordered"):
                problems.append(f"partition_scope string must be 'all' or 'ordered', got {self.partition_scope!r}")
        else:
            try:
                for s in self.partition_scope:
                    p = parse_partition(s)
                    if not p.covers_register(self.n_qubits):
                        problems.append(f"partition {s} does not cover {self.n_qubits} qubits")
            except Exception as exc:  # noqa: BLE001 - reported as a config problem
                problems.append(f"partition_scope: {exc}")
        if self.states_per_partition < 1:
            problems.append("states_per_partition must be >= 1")
        if self.test_states_per_partition < 0:
            problems.append("test_states_per_partition must be >= 0")
        if self.n_mixed < 1:
            problems.append("n_mixed must be >= 1")
        if not self.t or any(x <= 0 or x % 2 for x in self.t):
            problems.append(f"moment orders must be even positives, got {self.t}")
        if not self.k or max(self.k) > self.n_qubits or min(self.k) < 1:
            problems.append(f"correlation orders {self.k} invalid for {self.n_qubits} qubits")
        if self.n_unit < 1:
            problems.append("n_unit must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            problems.append("max_depth must be null or >= 1")
        if self.kind == "transition":
            if self.transition is None:
                problems.append("transition experiments need a 'transition' block")
            else:
                try:
                    p = parse_partition(self.transition.partition)
                    if not p.covers_register(self.n_qubits):
                        problems.append(f"transition partition {self.transition.partition} does not cover register")
                except Exception as exc:  # noqa: BLE001
                    problems.append(f"transition.partition: {exc}")
                if self.transition is not None and self.transition.n_lambda < 10:
                    problems.append("transition.n_lambda must be >= 10")
        if problems:
            raise ConfigError(problems)

    @property
    def layout(self) -> FeatureLayout:
        return FeatureLayout(self.n_qubits, self.t, self.k)

    def scope_partitions(self) -> list[SetPartition]:
        if self.partition_scope == "all":
            return all_partitions(self.n_qubits)
        if self.partition_scope == "ordered":
            return ordered_partitions(self.n_qubits)
        return [parse_partition(s) for s in self.partition_scope]

    def to_dict(self) -> dict:
        payload = {
            "schema": CONFIG_SCHEMA,
            "kind": self.kind,
            "n_qubits": self.n_qubits,
            "partition_scope": self.partition_scope
            if isinstance(self.partition_scope, str)
            else list(self.partition_scope),
            "states_per_partition": self.states_per_partition,
            "test_states_per_partition": self.test_states_per_partition,
            "n_mixed": self.n_mixed,
            "moments": {"t": list(self.t), "k": list(self.k), "n_unit": self.n_unit},
            "embedding": {
                "n_neighbours": self.embedding.n_neighbours,
                "d_min": self.embedding.d_min,
                "embedding_dim": self.embedding.embedding_dim,
                "n_epochs": self.embedding.n_epochs,
                "learning_rate": self.embedding.learning_rate,
                "negative_sample_rate": self.embedding.negative_sample_rate,
                "seed": self.embedding.seed,
            },
            "tree": {"max_depth": self.max_depth},
            "master_seed": self.master_seed,
        }
        if self.transition is not None:
            payload["transition"] = {
                "partition": self.transition.partition,
                "n_lambda": self.transition.n_lambda,
            }
        return payload

    @classmethod
    def from_dict(cls, payload: dict) -> "ExperimentConfig":
        if payload.get("schema", CONFIG_SCHEMA) != CONFIG_SCHEMA:
            raise ConfigError([f"unknown config schema {payload.get('schema')!r}"])
        try:
            moments = payload["moments"]
            embedding = payload.get("embedding", {})
            embedding = {k: v for k, v in embedding.items()}
            tree = payload.get("tree", {})
            transition = payload.get("transition")
            cfg = cls(
                kind=payload["kind"],
                n_qubits=int(payload["n_qubits"]),
                partition_scope=payload["partition_scope"],
                states_per_partition=int(payload["states_per_partition"]),
                test_states_per_partition=int(payload.get("test_states_per_partition", 0)),
                n_mixed=int(payload["n_mixed"]),
                t=tuple(int(x) for x in moments["t"]),
                k=tuple(int(x) for x in moments["k"]),
                n_unit=int(moments["n_unit"]),
                embedding=EmbeddingConfig(**embedding),
                max_depth=tree.get("max_depth"),
                master_seed=int(payload["master_seed"]),
                transition=None
                if transition is None
                else TransitionSpec(partition=transition["partition"], n_lambda=int(transition["n_lambda"])),
            )
        except ConfigError:
            raise
        except Exception as exc:  # noqa: BLE001 - malformed payloads become config errors
            raise ConfigError([f"malformed config: {exc}"]) from exc
        cfg.validate()
        return cfg

    def config_hash(self) -> str:
        return hashlib.sha256(canonical_json(self.to_dict()).encode()).hexdigest()[:16]


def load_config(path) -> ExperimentConfig:
    try:
        payload = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError([f"config file not found: {path}"]) from exc
    except json.JSONDecodeError as exc:
        raise ConfigError([f"config file is not valid JSON: {exc}"]) from exc
    return ExperimentConfig.from_dict(payload)


def apply_scale(config: ExperimentConfig, scale: str) -> ExperimentConfig:
    """'paper' keeps the config; 'desk' shrinks states x0.5, n_unit x0.4 and,
    for transition runs, the lambda grid and neighbour count x0.3."""
    if scale == "paper":
        return config
    if scale != "desk":
        raise ConfigError([f"scale must be 'desk' or 'paper', got {scale!r}"])
    transition = config.transition
    embedding = config.embedding
    if transition is not None:
        transition = TransitionSpec(
            partition=transition.partition,
            n_lambda=max(10, round(transition.n_lambda * DESK_FACTORS["grid"])),
        )
        embedding = replace(
            embedding,
            n_neighbours=max(2, round(embedding.n_neighbours * DESK_FACTORS["grid"])),
        )
    scaled = replace(
        config,
        states_per_partition=max(1, round(config.states_per_partition * DESK_FACTORS["states"])),
        test_states_per_partition=max(1, round(config.test_states_per_partition * DESK_FACTORS["states"])),
        n_unit=max(1, round(config.n_unit * DESK_FACTORS["n_unit"])),
        embedding=embedding,
        transition=transition,
    )
    scaled.validate()
    return scaled


@dataclass
class Dataset:
    """In-memory dataset: one row per sampled state."""

    config_hash: str
    role: str
    layout: FeatureLayout
    state_ids: np.ndarray
    labels: list[str]
    lams: np.ndarray
    purities: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        n = len(self.labels)
        if not (
            self.state_ids.shape == (n,)
            and self.lams.shape == (n,)
            and self.purities.shape == (n,)
            and self.features.shape == (n, self.layout.dimension)
        ):
            raise DatasetParseError("dataset arrays have inconsistent shapes")

    @property
    def n_rows(self) -> int:
        return len(self.labels)

    def partitions(self) -> list[SetPartition]:
        return [parse_partition(s) for s in self.labels]

    def structurally_equal(self, other: "Dataset") -> bool:
        return (
            self.config_hash == other.config_hash
            and self.role == other.role
            and self.layout == other.layout
            and np.array_equal(self.state_ids, other.state_ids)
            and self.labels == other.labels
            and np.array_equal(self.lams, other.lams)
            and np.array_equal(self.purities, other.purities)
            and np.array_equal(self.features, other.features)
        )


def write_dataset(path, dataset: Dataset) -> None:
    header = {
        "schema": DATASET_SCHEMA,
        "config_hash": dataset.config_hash,
        "role": dataset.role,
        "layout": {
            "n_qubits": dataset.layout.n_qubits,
            "t": list(dataset.layout.t),
            "k": list(dataset.layout.k),
        },
    }
    columns = ["state_id", "partition", "lambda", "purity"] + dataset.layout.column_names()
    buf = io.StringIO()
    buf.write(f"# {DATASET_SCHEMA} {canonical_json(header)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for i in range(dataset.n_rows):
        row = [
            str(int(dataset.state_ids[i])),
            dataset.labels[i],
            fmt_float(dataset.lams[i]),
            fmt_float(dataset.purities[i]),
        ]
        row.extend(fmt_float(v) for v in dataset.features[i])
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())


def read_dataset(path) -> Dataset:
    path = Path(path)
    try:
        lines = path.read_text().splitlines()
    except FileNotFoundError as exc:
        raise DatasetParseError(f"dataset file not found: {path}") from exc
    if not lines or not lines[0].startswith(f"# {DATASET_SCHEMA} "):
        raise DatasetParseError(f"missing or unknown dataset header in {path}")
    try:
        header = json.loads(lines[0][len(f"# {DATASET_SCHEMA} ") :])
    except json.JSONDecodeError as exc:
        raise DatasetParseError(f"malformed dataset header: {exc}") from exc
    if header.get("schema") != DATASET_SCHEMA:
        raise DatasetParseError(f"unknown dataset schema {header.get('schema')!r}")
    layout = FeatureLayout(
        int(header["layout"]["n_qubits"]),
        tuple(header["layout"]["t"]),
        tuple(header["layout"]["k"]),
    )
    reader = csv.reader(lines[1:])
    rows = list(reader)
    if not rows:
        raise DatasetParseError("dataset has no column header row")
    columns = rows[0]
    expected = ["state_id", "partition", "lambda", "purity"] + layout.column_names()
    if columns != expected:
        raise DatasetParseError("dataset columns do not match the layout descriptor")
    state_ids, labels, lams, purities, feats = [], [], [], [], []
    for idx, row in enumerate(rows[1:], start=1):
        if len(row) != len(expected):
            raise DatasetParseError(
                f"expected {len(expected)} fields, found {len(row)}", row=idx
            )
        try:
            state_ids.append(int(row[0]))
            parse_partition(row[1])
            labels.append(row[1])
            lams.append(float(row[2]))
            purities.append(float(row[3]))
            feats.append([float(v) for v in row[4:]])
        except DatasetParseError:
            raise
        except Exception as exc:  # noqa: BLE001 - malformed cell
            raise DatasetParseError(f"malformed value: {exc}", row=idx) from exc
    return Dataset(
        config_hash=header.get("config_hash", ""),
        role=header.get("role", "train"),
        layout=layout,
        state_ids=np.asarray(state_ids, dtype=np.int64),
        labels=labels,
        lams=np.asarray(lams, dtype=float),
        purities=np.asarray(purities, dtype=float),
        features=np.asarray(feats, dtype=float).reshape(len(labels), layout.dimension),
    )


def _write_results(path, kind: str, config_hash: str, columns: Sequence[str], rows) -> None:
    header = {"schema": RESULTS_SCHEMA, "kind": kind, "config_hash": config_hash}
    buf = io.StringIO()
    buf.write(f"# {RESULTS_SCHEMA} {canonical_json(header)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(row)
    atomic_write_text(path, buf.getvalue())


def write_score_vs_t(path, config_hash: str, entries) -> None:
    rows = [[str(int(t)), fmt_float(score)] for t, score in entries]
    _write_results(path, "score-vs-t", config_hash, ["t", "score"], rows)


def write_score_vs_k(path, config_hash: str, entries) -> None:
    rows = [
        [str(int(n)), str(int(k)), mode, fmt_float(score)]
        for n, k, mode, score in entries
    ]
    _write_results(path, "score-vs-k", config_hash, ["n_qubits", "k", "mode", "score"], rows)


def write_embedding_csv(path, config_hash: str, entries) -> None:
    rows = [
        [str(int(sid)), label, shape, role, fmt_float(y1), fmt_float(y2)]
        for sid, label, shape, role, y1, y2 in entries
    ]
    _write_results(
        path,
        "embedding-scatter",
        config_hash,
        ["state_id", "partition", "shape", "role", "y1", "y2"],
        rows,
    )


def write_transition_csv(path, config_hash: str, entries) -> None:
    rows = [
        [
            fmt_float(lam),
            fmt_float(pur),
            fmt_float(e_total),
            str(int(is_npt)),
            str(int(is_max_mixed)),
            fmt_float(y1),
            fmt_float(y2),
        ]
        for lam, pur, e_total, is_npt, is_max_mixed, y1, y2 in entries
    ]
    _write_results(
        path,
        "transition",
        config_hash,
        ["lambda", "purity", "part_logneg", "is_npt", "is_max_mixed", "y1", "y2"],
        rows,
    )


def shape_string(p: SetPartition) -> str:
    return "[" + ",".join(str(s) for s in p.shape) + "]"
