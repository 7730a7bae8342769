"""Manifold-learning embedding of feature vectors into the plane.

The construction follows the uniform-manifold-approximation recipe. A fuzzy
neighbourhood graph is built over the standardized feature vectors: for each
point j, ``rho_j`` is the distance to its nearest neighbour and ``sigma_j``
is calibrated by bisection so that the total membership of its k nearest
neighbours,

    sum_i exp(-max(0, d(x_i, x_j) - rho_j) / sigma_j),

equals log2(k). Directed memberships are symmetrized with the probabilistic
t-conorm ``v + v' - v v'``. The plane layout minimizes the fuzzy cross
entropy between those graph weights and the low-dimensional similarity
``w(d) = (1 + a d^(2b))^(-1)`` via stochastic gradient descent with negative
sampling, starting from the first two principal components.

Determinism contract: with a fixed seed the fit is bit-reproducible, and the
whole pipeline is equivariant under permutations of the input rows (exactly,
for distinct rows). Equivariance is obtained structurally: the fit sorts the
rows into a canonical lexicographic order, runs every numerical step on the
sorted copy, and un-permutes the result, so no intermediate float reduction
ever sees the caller's row order.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.optimize import curve_fit

from .errors import (
    ContractViolationError,
    DatasetParseError,
    DegenerateDataError,
    InvalidArgumentError,
)
from .fileio import atomic_write_text

SIGMA_BISECTION_TOL = 1e-5
SIGMA_BISECTION_MAX_ITER = 64
SIGMA_FLOOR_SCALE = 1e-3
GRADIENT_CLIP = 4.0
REPULSION_EPS = 1e-3

MODEL_FORMAT = "entpart-embedding/1"


@dataclass(frozen=True)
class EmbeddingConfig:
    """Hyperparameters of the graph construction and layout optimization."""

    n_neighbours: int = 10
    d_min: float = 0.6
    embedding_dim: int = 2
    n_epochs: int = 300
    learning_rate: float = 1.0
    negative_sample_rate: int = 5
    seed: int = 0

    def __post_init__(self):
        problems = []
        if self.n_neighbours < 2:
            problems.append(f"n_neighbours must be >= 2, got {self.n_neighbours}")
        if not self.d_min > 0:
            problems.append(f"d_min must be > 0, got {self.d_min}")
        if self.embedding_dim != 2:
            problems.append("only a 2-dimensional embedding space is supported")
        if self.n_epochs < 1:
            problems.append(f"n_epochs must be >= 1, got {self.n_epochs}")
        if not self.learning_rate > 0:
            problems.append(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.negative_sample_rate < 1:
            problems.append(f"negative_sample_rate must be >= 1, got {self.negative_sample_rate}")
        if problems:
            raise InvalidArgumentError("; ".join(problems))


@dataclass
class EmbeddingModel:
    """Frozen result of a fit: everything transform needs, nothing else."""

    config: EmbeddingConfig
    train_data: np.ndarray
    embedding: np.ndarray
    rho: np.ndarray
    sigma: np.ndarray
    curve_a: float
    curve_b: float

    def __post_init__(self):
        n = self.train_data.shape[0]
        if self.embedding.shape != (n, 2) or self.rho.shape != (n,) or self.sigma.shape != (n,):
            raise ContractViolationError("embedding model arrays disagree on the point count")
        if np.any(self.sigma <= 0) or np.any(self.rho < 0):
            raise ContractViolationError("bandwidths must be positive and offsets non-negative")

    def to_dict(self) -> dict:
        return {
            "format": MODEL_FORMAT,
            "config": asdict(self.config),
            "train_data": self.train_data.tolist(),
            "embedding": self.embedding.tolist(),
            "rho": self.rho.tolist(),
            "sigma": self.sigma.tolist(),
            "curve_a": self.curve_a,
            "curve_b": self.curve_b,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "EmbeddingModel":
        if payload.get("format") != MODEL_FORMAT:
            raise DatasetParseError(f"unknown embedding model format {payload.get('format')!r}")
        return cls(
            config=EmbeddingConfig(**payload["config"]),
            train_data=np.asarray(payload["train_data"], dtype=float),
            embedding=np.asarray(payload["embedding"], dtype=float),
            rho=np.asarray(payload["rho"], dtype=float),
            sigma=np.asarray(payload["sigma"], dtype=float),
            curve_a=float(payload["curve_a"]),
            curve_b=float(payload["curve_b"]),
        )

    def save(self, path) -> None:
        atomic_write_text(path, json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")))

    @classmethod
    def load(cls, path) -> "EmbeddingModel":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _knn(queries: np.ndarray, refs: np.ndarray, k: int, exclude_self: bool, block: int = 512):
    """Exact k nearest neighbours by blocked brute force (ascending distances)."""
    nq = queries.shape[0]
    ref_sq = np.einsum("ij,ij->i", refs, refs)
    idx = np.empty((nq, k), dtype=np.int64)
    dist = np.empty((nq, k))
    for start in range(0, nq, block):
        stop = min(start + block, nq)
        q = queries[start:stop]
        d2 = np.einsum("ij,ij->i", q, q)[:, None] + ref_sq[None, :] - 2.0 * (q @ refs.T)
        np.maximum(d2, 0.0, out=d2)
        if exclude_self:
            d2[np.arange(stop - start), np.arange(start, stop)] = np.inf
        part = np.argpartition(d2, k - 1, axis=1)[:, :k]
        pd = np.take_along_axis(d2, part, axis=1)
        order = np.argsort(pd, axis=1, kind="stable")
        idx[start:stop] = np.take_along_axis(part, order, axis=1)
        dist[start:stop] = np.sqrt(np.take_along_axis(pd, order, axis=1))
    return idx, dist


def _solve_sigma(knn_dists: np.ndarray, rho: np.ndarray, n_neighbours: int) -> np.ndarray:
    """Per-point bandwidth via bisection on the membership-mass equation."""
    target = np.log2(float(n_neighbours))
    adjusted = np.maximum(knn_dists - rho[:, None], 0.0)
    n = knn_dists.shape[0]
    lo = np.zeros(n)
    hi = np.full(n, np.inf)
    mid = np.ones(n)
    for _ in range(SIGMA_BISECTION_MAX_ITER):
        psum = np.exp(-adjusted / mid[:, None]).sum(axis=1)
        err = psum - target
        done = np.abs(err) < SIGMA_BISECTION_TOL
        if done.all():
            break
        shrink = ~done & (err > 0)
        grow = ~done & (err <= 0)
        hi[shrink] = mid[shrink]
        lo[grow] = mid[grow]
        nxt = np.where(np.isinf(hi), mid * 2.0, (lo + hi) / 2.0)
        mid = np.where(done, mid, nxt)
    # Keep bandwidths away from zero on pathological rows (duplicates).
    floor = SIGMA_FLOOR_SCALE * np.maximum(knn_dists.mean(axis=1), 1e-12)
    return np.maximum(mid, floor)


def membership_weights(knn_dists: np.ndarray, rho: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """Directed membership strengths for the k nearest neighbours of each point."""
    return np.exp(-np.maximum(knn_dists - rho[:, None], 0.0) / sigma[:, None])


def fit_similarity_curve(d_min: float, spread: float = 1.0) -> tuple[float, float]:
    """Least-squares (a, b) for w(d) = 1/(1 + a d^(2b)) against the target
    curve that is 1 below d_min and exp(-(d - d_min)) above."""
    xs = np.linspace(0.0, 3.0 * spread, 300)
    ys = np.where(xs < d_min, 1.0, np.exp(-(xs - d_min) / spread))
    (a, b), _ = curve_fit(lambda x, a, b: 1.0 / (1.0 + a * x ** (2.0 * b)), xs, ys)
    return float(a), float(b)


def _pca_init(data: np.ndarray) -> np.ndarray:
    """First two principal components, unit variance, deterministic sign."""
    centered = data - data.mean(axis=0)
    u, s, vt = np.linalg.svd(centered, full_matrices=False)
    comps = min(2, s.shape[0])
    coords = np.zeros((data.shape[0], 2))
    coords[:, :comps] = u[:, :comps] * s[:comps]
    for c in range(comps):
        pivot = int(np.argmax(np.abs(vt[c])))
        if vt[c, pivot] < 0:
            coords[:, c] = -coords[:, c]
    std = coords.std(axis=0)
    std[std < 1e-12] = 1.0
    return coords / std


def _canonical_order(data: np.ndarray) -> np.ndarray:
    """Row indices sorted lexicographically by value: the permutation-proof order."""
    keys = tuple(data[:, c] for c in reversed(range(data.shape[1])))
    return np.lexsort(keys)


def _optimize_layout(
    y_head: np.ndarray,
    y_tail: np.ndarray,
    head: np.ndarray,
    tail: np.ndarray,
    weights: np.ndarray,
    n_epochs: int,
    learning_rate: float,
    negative_sample_rate: int,
    rng: np.random.Generator,
    a: float,
    b: float,
    move_other: bool,
    same_space: bool,
    chunk: int = 1024,
) -> None:
    """Cross-entropy SGD over graph edges, sampled proportionally to weight.

    Edges are revisited every w_max/w epochs; each visit applies one
    attractive step and a batch of repulsive steps against uniformly drawn
    negative targets. Updates are applied chunk-by-chunk in edge order, so
    the optimization is deterministic for a fixed seed.
    """
    w_max = weights.max()
    keep = weights >= w_max / n_epochs
    head, tail, weights = head[keep], tail[keep], weights[keep]
    epochs_per_sample = w_max / weights
    next_sample = epochs_per_sample.copy()
    epochs_per_negative = epochs_per_sample / negative_sample_rate
    next_negative = epochs_per_negative.copy()
    n_targets = y_tail.shape[0]

    for epoch in range(n_epochs):
        alpha = learning_rate * (1.0 - epoch / n_epochs)
        active = np.nonzero(next_sample <= epoch)[0]
        for start in range(0, active.shape[0], chunk):
            sel = active[start : start + chunk]
            h = head[sel]
            t = tail[sel]
            diff = y_head[h] - y_tail[t]
            d2 = np.einsum("ij,ij->i", diff, diff)
            coef = np.zeros_like(d2)
            nz = d2 > 0.0
            coef[nz] = (-2.0 * a * b * d2[nz] ** (b - 1.0)) / (a * d2[nz] ** b + 1.0)
            grad = np.clip(coef[:, None] * diff, -GRADIENT_CLIP, GRADIENT_CLIP)
            np.add.at(y_head, h, alpha * grad)
            if move_other:
                np.add.at(y_tail, t, -alpha * grad)
            next_sample[sel] += epochs_per_sample[sel]

            n_neg = np.floor((epoch - next_negative[sel]) / epochs_per_negative[sel]).astype(np.int64)
            np.clip(n_neg, 0, None, out=n_neg)
            total = int(n_neg.sum())
            if total:
                rep_h = np.repeat(h, n_neg)
                targets = rng.integers(0, n_targets, size=total)
                diff_n = y_head[rep_h] - y_tail[targets]
                d2n = np.einsum("ij,ij->i", diff_n, diff_n)
                coef_n = np.zeros_like(d2n)
                nzn = d2n > 0.0
                coef_n[nzn] = (2.0 * b) / ((REPULSION_EPS + d2n[nzn]) * (a * d2n[nzn] ** b + 1.0))
                # Coincident points are pushed apart by a full clip step, except
                # a vertex paired with itself, which is skipped.
                grad_n = np.where(
                    nzn[:, None],
                    np.clip(coef_n[:, None] * diff_n, -GRADIENT_CLIP, GRADIENT_CLIP),
                    GRADIENT_CLIP,
                )
                if same_space:
                    grad_n[rep_h == targets] = 0.0
                np.add.at(y_head, rep_h, alpha * grad_n)
            next_negative[sel] += n_neg * epochs_per_negative[sel]


def fit(data: np.ndarray, config: EmbeddingConfig) -> EmbeddingModel:
    """Learn the neighbourhood graph and optimize the 2-D layout."""
    x = np.ascontiguousarray(np.asarray(data, dtype=float))
    if x.ndim != 2:
        raise InvalidArgumentError(f"expected a 2-D data array, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ContractViolationError("data contains non-finite entries")
    n = x.shape[0]
    k = config.n_neighbours
    if n < k + 1:
        raise InvalidArgumentError(f"need at least n_neighbours + 1 = {k + 1} points, got {n}")
    if np.all(x == x[0]):
        raise DegenerateDataError("all data points are identical")

    # Work on the canonically sorted copy; map results back at the end.
    order = _canonical_order(x)
    xs = np.ascontiguousarray(x[order])

    knn_idx, knn_dist = _knn(xs, xs, k, exclude_self=True)
    rho_s = knn_dist[:, 0].copy()
    sigma_s = _solve_sigma(knn_dist, rho_s, k)
    vals = membership_weights(knn_dist, rho_s, sigma_s)

    rows = np.repeat(np.arange(n), k)
    directed = sp.csr_matrix((vals.ravel(), (rows, knn_idx.ravel())), shape=(n, n))
    # v_ij = v_i|j + v_j|i - v_i|j v_j|i, on the union support of both directions.
    graph = directed + directed.T - directed.multiply(directed.T)
    graph = graph.tocoo()

    a, b = fit_similarity_curve(config.d_min)
    ys = _pca_init(xs)

    edge_order = np.lexsort((graph.col, graph.row))
    head = graph.row[edge_order].astype(np.int64)
    tail = graph.col[edge_order].astype(np.int64)
    weights = graph.data[edge_order]

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x4C41594F]))
    _optimize_layout(
        ys,
        ys,
        head,
        tail,
        weights,
        config.n_epochs,
        config.learning_rate,
        config.negative_sample_rate,
        rng,
        a,
        b,
        move_other=True,
        same_space=True,
    )

    y = np.empty_like(ys)
    rho = np.empty_like(rho_s)
    sigma = np.empty_like(sigma_s)
    y[order] = ys
    rho[order] = rho_s
    sigma[order] = sigma_s
    return EmbeddingModel(
        config=config,
        train_data=x,
        embedding=y,
        rho=rho,
        sigma=sigma,
        curve_a=a,
        curve_b=b,
    )


def transform(model: EmbeddingModel, new_points: np.ndarray) -> np.ndarray:
    """Embed unseen points against the frozen training layout.

    Each point starts at the membership-weighted mean of its nearest training
    points' coordinates and is refined for a third of the training epochs by
    the same SGD forces, with the training layout held fixed.
    """
    xq = np.ascontiguousarray(np.asarray(new_points, dtype=float))
    if xq.ndim != 2 or xq.shape[1] != model.train_data.shape[1]:
        raise InvalidArgumentError(
            f"new points of shape {xq.shape} do not match training dimension {model.train_data.shape[1]}"
        )
    if xq.shape[0] == 0:
        return np.zeros((0, 2))
    if not np.all(np.isfinite(xq)):
        raise ContractViolationError("new points contain non-finite entries")

    config = model.config
    k = min(config.n_neighbours, model.train_data.shape[0])
    knn_idx, knn_dist = _knn(xq, model.train_data, k, exclude_self=False)
    rho = knn_dist[:, 0].copy()
    sigma = _solve_sigma(knn_dist, rho, k)
    vals = membership_weights(knn_dist, rho, sigma)

    norm = vals.sum(axis=1, keepdims=True)
    y = np.einsum("qk,qkd->qd", vals / norm, model.embedding[knn_idx])

    m = xq.shape[0]
    head = np.repeat(np.arange(m, dtype=np.int64), k)
    tail = knn_idx.ravel().astype(np.int64)
    weights = vals.ravel()

    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 0x5452414E]))
    _optimize_layout(
        y,
        model.embedding.copy(),
        head,
        tail,
        weights,
        max(1, config.n_epochs // 3),
        config.learning_rate / 4.0,
        config.negative_sample_rate,
        rng,
        model.curve_a,
        model.curve_b,
        move_other=False,
        same_space=False,
    )
    return y
