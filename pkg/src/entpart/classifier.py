"""Standardization, CART decision tree over the embedding plane, and the
trained end-to-end pipeline (standardize -> embed -> classify)."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import embedding as emb
from .correlators import FeatureLayout
from .errors import DatasetParseError, InvalidArgumentError
from .fileio import atomic_write_text
from .partitions import SetPartition, format_partition, parse_partition

CONSTANT_FEATURE_STD = 1e-12
PIPELINE_FORMAT = "entpart-pipeline/1"


@dataclass(frozen=True)
class Standardizer:
    """Per-feature affine map to zero mean, unit variance.

    Features whose training standard deviation is below 1e-12 are recorded as
    constant and always map to 0.
    """

    mean: np.ndarray
    std: np.ndarray
    constant: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if x.shape[1] != self.mean.shape[0]:
            raise InvalidArgumentError(
                f"feature count {x.shape[1]} does not match standardizer ({self.mean.shape[0]})"
            )
        out = (x - self.mean) / self.std
        out[:, self.constant] = 0.0
        return out

    def to_dict(self) -> dict:
        return {
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "constant": self.constant.astype(int).tolist(),
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "Standardizer":
        return cls(
            mean=np.asarray(payload["mean"], dtype=float),
            std=np.asarray(payload["std"], dtype=float),
            constant=np.asarray(payload["constant"], dtype=bool),
        )


def fit_standardizer(data: np.ndarray) -> Standardizer:
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[0] < 2:
        raise InvalidArgumentError("standardizer needs at least 2 rows")
    mean = data.mean(axis=0)
    std = data.std(axis=0)
    constant = std < CONSTANT_FEATURE_STD
    safe_std = std.copy()
    safe_std[constant] = 1.0
    return Standardizer(mean=mean, std=safe_std, constant=constant)


@dataclass
class TreeNode:
    feature: int = -1
    threshold: float = 0.0
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    label: int = -1
    counts: dict = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.left is None


@dataclass
class DecisionTree:
    """Axis-aligned CART tree with Gini impurity; labels are partitions."""

    root: TreeNode
    labels: list[SetPartition]

    def predict_one(self, point) -> SetPartition:
        node = self.root
        x = np.asarray(point, dtype=float)
        while not node.is_leaf:
            node = node.left if x[node.feature] <= node.threshold else node.right
        return self.labels[node.label]

    def predict(self, points) -> list[SetPartition]:
        return [self.predict_one(p) for p in np.atleast_2d(np.asarray(points, dtype=float))]

    def to_dict(self) -> dict:
        def encode(node: TreeNode) -> dict:
            if node.is_leaf:
                return {"label": node.label, "counts": {str(k): v for k, v in node.counts.items()}}
            return {
                "feature": node.feature,
                "threshold": node.threshold,
                "left": encode(node.left),
                "right": encode(node.right),
            }

        return {"labels": [format_partition(l) for l in self.labels], "root": encode(self.root)}

    @classmethod
    def from_dict(cls, payload: dict) -> "DecisionTree":
        def decode(item: dict) -> TreeNode:
            if "label" in item:
                return TreeNode(label=int(item["label"]), counts={int(k): v for k, v in item["counts"].items()})
            return TreeNode(
                feature=int(item["feature"]),
                threshold=float(item["threshold"]),
                left=decode(item["left"]),
                right=decode(item["right"]),
            )

        labels = [parse_partition(s) for s in payload["labels"]]
        return cls(root=decode(payload["root"]), labels=labels)


def _gini_from_counts(counts: np.ndarray, total: int) -> float:
    if total == 0:
        return 0.0
    p = counts / total
    return 1.0 - float(np.sum(p * p))


def _best_split(points: np.ndarray, y: np.ndarray, n_classes: int):
    """Best (feature, threshold) by Gini decrease.

    Candidates are midpoints between consecutive distinct sorted values.
    Ties break toward the lower feature index, then the lower threshold:
    features are scanned in order and only strictly better splits replace the
    incumbent, and within a feature thresholds ascend so argmax picks the
    first maximum.
    """
    n = points.shape[0]
    total_counts = np.bincount(y, minlength=n_classes)
    parent_gini = _gini_from_counts(total_counts, n)
    best = None
    for f in range(points.shape[1]):
        order = np.argsort(points[:, f], kind="stable")
        vals = points[order, f]
        labels_sorted = y[order]
        boundaries = np.nonzero(vals[1:] > vals[:-1])[0] + 1
        if boundaries.size == 0:
            continue
        onehot = np.zeros((n, n_classes))
        onehot[np.arange(n), labels_sorted] = 1.0
        cum = np.cumsum(onehot, axis=0)
        left = cum[boundaries - 1]
        n_left = boundaries.astype(float)
        right = total_counts - left
        n_right = n - n_left
        gini_left = 1.0 - np.sum((left / n_left[:, None]) ** 2, axis=1)
        gini_right = 1.0 - np.sum((right / n_right[:, None]) ** 2, axis=1)
        decrease = parent_gini - (n_left * gini_left + n_right * gini_right) / n
        pick = int(np.argmax(decrease))
        if best is None or decrease[pick] > best[0]:
            threshold = float((vals[boundaries[pick] - 1] + vals[boundaries[pick]]) / 2.0)
            best = (float(decrease[pick]), f, threshold)
    return best


def fit_tree(
    points: np.ndarray,
    labels: Sequence[SetPartition],
    max_depth: int | None = None,
) -> DecisionTree:
    """Grow an unpruned CART tree; stops at pure nodes or single samples."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if points.shape[0] == 0:
        raise InvalidArgumentError("cannot fit a tree on empty data")
    if points.shape[0] != len(labels):
        raise InvalidArgumentError("points and labels length mismatch")
    label_set = sorted(set(labels))
    index_of = {lab: i for i, lab in enumerate(label_set)}
    y = np.array([index_of[lab] for lab in labels], dtype=np.int64)
    n_classes = len(label_set)

    def leaf(idx: np.ndarray) -> TreeNode:
        counts = np.bincount(y[idx], minlength=n_classes)
        # Majority label; ties resolve to the canonically first label.
        return TreeNode(label=int(np.argmax(counts)), counts={i: int(c) for i, c in enumerate(counts) if c})

    def grow(idx: np.ndarray, depth: int) -> TreeNode:
        node_y = y[idx]
        if idx.shape[0] < 2 or np.all(node_y == node_y[0]):
            return leaf(idx)
        if max_depth is not None and depth >= max_depth:
            return leaf(idx)
        best = _best_split(points[idx], node_y, n_classes)
        if best is None:
            return leaf(idx)
        _, feature, threshold = best
        mask = points[idx, feature] <= threshold
        left = grow(idx[mask], depth + 1)
        right = grow(idx[~mask], depth + 1)
        return TreeNode(feature=feature, threshold=threshold, left=left, right=right)

    root = grow(np.arange(points.shape[0]), 0)
    return DecisionTree(root=root, labels=label_set)


def accuracy(predictions: Sequence[SetPartition], truth: Sequence[SetPartition]) -> float:
    """Fraction of correct predictions: n_correct / (n_correct + n_incorrect)."""
    if len(predictions) != len(truth):
        raise InvalidArgumentError(
            f"prediction/truth length mismatch: {len(predictions)} vs {len(truth)}"
        )
    if not truth:
        raise InvalidArgumentError("cannot score an empty test set")
    correct = sum(1 for p, t in zip(predictions, truth) if p == t)
    return correct / len(truth)


@dataclass
class TrainedPipeline:
    """Standardizer + embedding + tree, with the layout they were fit on."""

    standardizer: Standardizer
    embedding_model: emb.EmbeddingModel
    tree: DecisionTree
    labels: list[SetPartition]
    layout: FeatureLayout
    config_hash: str = ""

    def embed(self, features: np.ndarray) -> np.ndarray:
        return emb.transform(self.embedding_model, self.standardizer.apply(features))

    def predict(self, features: np.ndarray) -> list[SetPartition]:
        return self.tree.predict(self.embed(features))

    def to_dict(self) -> dict:
        return {
            "format": PIPELINE_FORMAT,
            "standardizer": self.standardizer.to_dict(),
            "embedding": self.embedding_model.to_dict(),
            "tree": self.tree.to_dict(),
            "labels": [format_partition(l) for l in self.labels],
            "layout": {
                "n_qubits": self.layout.n_qubits,
                "t": list(self.layout.t),
                "k": list(self.layout.k),
            },
            "config_hash": self.config_hash,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "TrainedPipeline":
        if payload.get("format") != PIPELINE_FORMAT:
            raise DatasetParseError(f"unknown pipeline format {payload.get('format')!r}")
        layout = payload["layout"]
        return cls(
            standardizer=Standardizer.from_dict(payload["standardizer"]),
            embedding_model=emb.EmbeddingModel.from_dict(payload["embedding"]),
            tree=DecisionTree.from_dict(payload["tree"]),
            labels=[parse_partition(s) for s in payload["labels"]],
            layout=FeatureLayout(layout["n_qubits"], tuple(layout["t"]), tuple(layout["k"])),
            config_hash=payload.get("config_hash", ""),
        )

    def save(self, path) -> None:
        atomic_write_text(path, json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")))

    @classmethod
    def load(cls, path) -> "TrainedPipeline":
        return cls.from_dict(json.loads(Path(path).read_text()))


def fit_pipeline(
    features: np.ndarray,
    labels: Sequence[SetPartition],
    layout: FeatureLayout,
    embed_config: emb.EmbeddingConfig,
    max_depth: int | None = None,
    config_hash: str = "",
) -> TrainedPipeline:
    """Train the full mapping: standardize, embed (unsupervised), classify."""
    features = np.asarray(features, dtype=float)
    if len(set(labels)) < 2:
        raise InvalidArgumentError("training needs at least two distinct labels")
    standardizer = fit_standardizer(features)
    model = emb.fit(standardizer.apply(features), embed_config)
    tree = fit_tree(model.embedding, labels, max_depth=max_depth)
    return TrainedPipeline(
        standardizer=standardizer,
        embedding_model=model,
        tree=tree,
        labels=sorted(set(labels)),
        layout=layout,
        config_hash=config_hash,
    )
