#!/usr/bin/env python3
"""End-to-end partition classification at toy scale.

Generates labeled feature datasets for every ordered partition of a 3-qubit
register, trains the standardize -> embed -> decision-tree pipeline, and
scores fresh test states. The same flow runs from the command line via
`entpart gen-dataset / train / evaluate` and, for the full desk-scale study,
`entpart reproduce --manifest configs/acceptance_manifest.json --out runs/`.
"""

import numpy as np

from entpart.classifier import accuracy
from entpart.dataset_io import ExperimentConfig
from entpart.embedding import EmbeddingConfig
from entpart.experiments import evaluate_pipeline, generate_dataset, train_on_dataset

config = ExperimentConfig(
    kind="moments-compare",
    n_qubits=3,
    partition_scope="ordered",
    states_per_partition=60,
    test_states_per_partition=12,
    n_mixed=10,
    t=(2,),
    k=(1, 2, 3),
    n_unit=150,
    embedding=EmbeddingConfig(n_neighbours=10, d_min=0.6, seed=0),
    max_depth=None,
    master_seed=42,
)
config.validate()

print("sampling and featurizing training states ...")
train = generate_dataset(config, "train")
print(f"  {train.n_rows} rows, {train.layout.dimension} features "
      f"({', '.join(train.layout.column_names()[:4])}, ...)")

print("training the pipeline ...")
result = train_on_dataset(train, config)
print(f"  training accuracy: {result.train_accuracy:.3f}")

print("scoring freshly generated test states ...")
test = generate_dataset(config, "test")
report = evaluate_pipeline(result.pipeline, test)
print(f"  test accuracy: {report['accuracy']:.3f} on {report['n_test']} states")

print("\nper-class results:")
for truth, row in report["confusion"].items():
    total = sum(row.values())
    correct = row.get(truth, 0)
    print(f"  {truth:20s} {correct}/{total}")

coords = result.pipeline.embedding_model.embedding
labels = np.array(train.labels)
print("\nembedded cluster centroids:")
for label in sorted(set(train.labels)):
    c = coords[labels == label].mean(axis=0)
    print(f"  {label:20s} ({c[0]:6.2f}, {c[1]:6.2f})")
