"""Tests for standardization, the CART tree, and the accuracy score."""

import numpy as np
import pytest

from entpart.classifier import (
    DecisionTree,
    TrainedPipeline,
    accuracy,
    fit_pipeline,
    fit_standardizer,
    fit_tree,
)
from entpart.correlators import FeatureLayout
from entpart.embedding import EmbeddingConfig
from entpart.errors import InvalidArgumentError
from entpart.partitions import SetPartition

LAB_A = SetPartition.of([0, 1])
LAB_B = SetPartition.of([0], [1])


class TestStandardizer:
    def test_constant_feature_maps_to_zero(self):
        data = np.column_stack([np.full(10, 3.0), np.arange(10.0)])
        s = fit_standardizer(data)
        assert s.constant.tolist() == [True, False]
        out = s.apply(data)
        assert np.all(out[:, 0] == 0.0)

    def test_symmetric_pair_unchanged(self):
        data = np.array([[-1.0], [1.0]])
        out = fit_standardizer(data).apply(data)
        assert np.allclose(out, data)

    def test_zero_mean_unit_variance(self):
        rng = np.random.default_rng(0)
        data = rng.standard_normal((100, 5)) * 7 + 3
        s = fit_standardizer(data)
        out = s.apply(data)
        # Oracle: recompute column statistics directly.
        assert np.max(np.abs(out.mean(axis=0))) <= 1e-10
        assert np.max(np.abs(out.std(axis=0) - 1.0)) <= 1e-8

    def test_needs_two_rows(self):
        with pytest.raises(InvalidArgumentError):
            fit_standardizer(np.ones((1, 3)))


class TestFitTree:
    def test_separable_data_trains_to_one(self):
        rng = np.random.default_rng(1)
        pts = np.vstack([rng.normal(0, 0.5, (30, 2)), rng.normal(5, 0.5, (30, 2))])
        labels = [LAB_A] * 30 + [LAB_B] * 30
        tree = fit_tree(pts, labels)
        assert accuracy(tree.predict(pts), labels) == 1.0

    def test_identical_points_yield_majority_leaf(self):
        pts = np.zeros((5, 2))
        labels = [LAB_A, LAB_A, LAB_A, LAB_B, LAB_B]
        tree = fit_tree(pts, labels)
        assert tree.root.is_leaf
        assert tree.predict_one([0.0, 0.0]) == LAB_A

    def test_tie_breaks_to_canonical_label(self):
        pts = np.zeros((4, 2))
        labels = [LAB_A, LAB_A, LAB_B, LAB_B]
        tree = fit_tree(pts, labels)
        assert tree.predict_one([0.0, 0.0]) == min(LAB_A, LAB_B)

    def test_four_gaussians_held_out(self):
        rng = np.random.default_rng(2)
        centers = np.array([[0, 0], [8, 0], [0, 8], [8, 8]], dtype=float)
        parts = [
            SetPartition.of([0, 1, 2]),
            SetPartition.of([0], [1, 2]),
            SetPartition.of([1], [0, 2]),
            SetPartition.of([0], [1], [2]),
        ]
        train_pts, train_lab, test_pts, test_lab = [], [], [], []
        for c, p in zip(centers, parts):
            train_pts.append(c + rng.standard_normal((60, 2)))
            train_lab += [p] * 60
            test_pts.append(c + rng.standard_normal((40, 2)))
            test_lab += [p] * 40
        tree = fit_tree(np.vstack(train_pts), train_lab)
        assert accuracy(tree.predict(np.vstack(test_pts)), test_lab) >= 0.97

    def test_monotone_rescaling_invariance(self):
        rng = np.random.default_rng(3)
        pts = rng.standard_normal((80, 2))
        labels = [LAB_A if x + y > 0 else LAB_B for x, y in pts]

        def rescale(p):
            out = p.copy()
            out[:, 0] = np.exp(out[:, 0])  # strictly monotone per-feature map
            out[:, 1] = out[:, 1] ** 3
            return out

        tree_raw = fit_tree(pts, labels)
        tree_scaled = fit_tree(rescale(pts), labels)
        queries = rng.standard_normal((50, 2))
        assert tree_raw.predict(queries) == tree_scaled.predict(rescale(queries))

    def test_unlimited_depth_memorizes_consistent_data(self):
        rng = np.random.default_rng(4)
        pts = rng.standard_normal((100, 2))
        labels = [LAB_A if rng.uniform() < 0.5 else LAB_B for _ in range(100)]
        tree = fit_tree(pts, labels)
        assert accuracy(tree.predict(pts), labels) == 1.0

    def test_max_depth_limits_growth(self):
        rng = np.random.default_rng(5)
        pts = rng.standard_normal((100, 2))
        labels = [LAB_A if rng.uniform() < 0.5 else LAB_B for _ in range(100)]
        tree = fit_tree(pts, labels, max_depth=1)
        assert not tree.root.is_leaf
        assert tree.root.left.is_leaf and tree.root.right.is_leaf

    def test_leaf_counts_sum_to_training_points(self):
        rng = np.random.default_rng(12)
        pts = rng.standard_normal((120, 2))
        labels = [LAB_A if rng.uniform() < 0.6 else LAB_B for _ in range(120)]
        tree = fit_tree(pts, labels)

        def walk(node):
            if node.is_leaf:
                yield node
            else:
                assert node.left is not None and node.right is not None
                yield from walk(node.left)
                yield from walk(node.right)

        total = sum(sum(leaf.counts.values()) for leaf in walk(tree.root))
        assert total == 120

    def test_empty_input_rejected(self):
        with pytest.raises(InvalidArgumentError):
            fit_tree(np.zeros((0, 2)), [])


class TestAccuracy:
    def test_extremes(self):
        labs = [LAB_A, LAB_B, LAB_A, LAB_B]
        assert accuracy(labs, labs) == 1.0
        assert accuracy(labs, [LAB_A, LAB_A, LAB_A, LAB_A]) == 0.5

    def test_counting_oracle(self):
        rng = np.random.default_rng(6)
        pool = [LAB_A, LAB_B]
        preds = [pool[i] for i in rng.integers(0, 2, size=200)]
        truth = [pool[i] for i in rng.integers(0, 2, size=200)]
        oracle = sum(int(p == t) for p, t in zip(preds, truth)) / 200
        assert accuracy(preds, truth) == oracle

    def test_binary_flip_complement(self):
        rng = np.random.default_rng(7)
        pool = [LAB_A, LAB_B]
        preds = [pool[i] for i in rng.integers(0, 2, size=100)]
        truth = [pool[i] for i in rng.integers(0, 2, size=100)]
        flipped = [LAB_B if p == LAB_A else LAB_A for p in preds]
        assert accuracy(preds, truth) + accuracy(flipped, truth) == pytest.approx(1.0)

    def test_length_mismatch(self):
        with pytest.raises(InvalidArgumentError):
            accuracy([LAB_A], [LAB_A, LAB_B])
        with pytest.raises(InvalidArgumentError):
            accuracy([], [])


class TestTrainedPipeline:
    def _toy_pipeline(self, rng):
        n = 80
        f_a = rng.standard_normal((n, 6))
        f_b = rng.standard_normal((n, 6)) + 12.0
        features = np.vstack([f_a, f_b])
        labels = [LAB_A] * n + [LAB_B] * n
        layout = FeatureLayout(2, (2, 4), (1, 2))
        assert layout.dimension == 6
        pipe = fit_pipeline(features, labels, layout, EmbeddingConfig(seed=1, n_neighbours=8))
        return pipe, features, labels

    def test_round_trip_predictions_identical(self, tmp_path):
        rng = np.random.default_rng(8)
        pipe, features, labels = self._toy_pipeline(rng)
        path = tmp_path / "pipeline.json"
        pipe.save(path)
        loaded = TrainedPipeline.load(path)
        assert loaded.predict(features) == pipe.predict(features)
        assert [str(l) for l in loaded.labels] == [str(l) for l in pipe.labels]

    def test_train_accuracy_high_on_separated_blobs(self):
        rng = np.random.default_rng(9)
        pipe, features, labels = self._toy_pipeline(rng)
        assert accuracy(pipe.predict(features), labels) >= 0.99

    def test_single_label_rejected(self):
        rng = np.random.default_rng(10)
        feats = rng.standard_normal((20, 4))
        layout = FeatureLayout(2, (2,), (1, 2))
        with pytest.raises(InvalidArgumentError):
            fit_pipeline(feats, [LAB_A] * 20, layout, EmbeddingConfig(seed=0))

    def test_tree_serialization_round_trip(self):
        rng = np.random.default_rng(11)
        pts = np.vstack([rng.normal(0, 1, (30, 2)), rng.normal(6, 1, (30, 2))])
        labels = [LAB_A] * 30 + [LAB_B] * 30
        tree = fit_tree(pts, labels)
        clone = DecisionTree.from_dict(tree.to_dict())
        queries = rng.standard_normal((40, 2)) * 4
        assert tree.predict(queries) == clone.predict(queries)
