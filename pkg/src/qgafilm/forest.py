"""Random forest regression on binary feature vectors, built on CART trees.

Trees are grown greedily with the squared-error (variance reduction)
criterion on bootstrap resamples, with a fresh feature subsample drawn
at every split. Prediction is the mean of the per-tree outputs. All
randomness derives from per-tree generators spawned deterministically
from the config seed, so training is reproducible and trees may be
grown in parallel without changing the result.

Features are bits, so every split is "x[f] = 0 goes left". Models
serialize to a versioned JSON text dump that round-trips exactly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset

RF_FORMAT = "qgafilm-random-forest"
RF_VERSION = 1


@dataclass(frozen=True)
class ForestConfig:
    tree_count: int = 100
    max_depth: int | None = None
    min_samples_leaf: int = 1
    feature_subsample: float = 1.0 / 3.0
    bootstrap: bool = True
    rng_seed: int = 0

    def __post_init__(self):
        if self.tree_count < 1:
            raise ValueError("tree_count must be >= 1")
        if self.max_depth is not None and self.max_depth < 1:
            raise ValueError("max_depth must be >= 1 or None")
        if self.min_samples_leaf < 1:
            raise ValueError("min_samples_leaf must be >= 1")
        if not 0.0 < self.feature_subsample <= 1.0:
            raise ValueError("feature_subsample must be in (0, 1]")


class _Tree:
    """Flat-array CART tree. feature[i] == -1 marks a leaf."""

    __slots__ = ("feature", "left", "right", "value", "depth")

    def __init__(self, feature, left, right, value, depth=None):
        self.feature = np.asarray(feature, dtype=np.int32)
        self.left = np.asarray(left, dtype=np.int32)
        self.right = np.asarray(right, dtype=np.int32)
        self.value = np.asarray(value, dtype=float)
        self.depth = int(depth) if depth is not None else self._measure_depth()

    def _measure_depth(self) -> int:
        depths = np.zeros(len(self.feature), dtype=np.int32)
        deepest = 0
        for node in range(len(self.feature)):
            if self.feature[node] >= 0:
                child_depth = depths[node] + 1
                depths[self.left[node]] = child_depth
                depths[self.right[node]] = child_depth
                deepest = max(deepest, child_depth)
        return deepest

    def predict_many(self, x: np.ndarray) -> np.ndarray:
        nodes = np.zeros(len(x), dtype=np.int32)
        active = self.feature[nodes] >= 0
        while np.any(active):
            idx = np.flatnonzero(active)
            node = nodes[idx]
            goes_right = x[idx, self.feature[node]] > 0
            nodes[idx] = np.where(goes_right, self.right[node], self.left[node])
            active[idx] = self.feature[nodes[idx]] >= 0
        return self.value[nodes]


def _grow_tree(x: np.ndarray, y: np.ndarray, config: ForestConfig, rng) -> _Tree:
    """x is float64 (n, p) with 0/1 entries; y float64 (n,)."""
    n_features = x.shape[1]
    n_candidates = max(1, round(config.feature_subsample * n_features))
    subsampling = n_candidates < n_features
    all_features = np.arange(n_features)
    msl = config.min_samples_leaf
    y_sq = y * y
    feature, left, right, value, max_depth = [], [], [], [], 0

    def new_node(mean):
        feature.append(-1)
        left.append(-1)
        right.append(-1)
        value.append(mean)
        return len(feature) - 1

    def build(rows, depth):
        nonlocal max_depth
        max_depth = max(max_depth, depth)
        labels = y[rows]
        total = labels.sum()
        node = new_node(total / len(rows))
        if (len(rows) < 2 * msl
                or (config.max_depth is not None and depth >= config.max_depth)):
            return node
        total_sq = y_sq[rows].sum()
        parent_sse = total_sq - total * total / len(rows)
        if parent_sse <= 0.0:
            return node
        if subsampling:
            candidates = np.sort(rng.choice(n_features, size=n_candidates,
                                            replace=False))
        else:
            candidates = all_features
        xn = x[rows][:, candidates]
        n_right = xn.sum(axis=0)
        n_left = len(rows) - n_right
        valid = (n_left >= msl) & (n_right >= msl)
        if not np.any(valid):
            return node
        s_right = labels @ xn
        q_right = y_sq[rows] @ xn
        s_left = total - s_right
        q_left = total_sq - q_right
        with np.errstate(divide="ignore", invalid="ignore"):
            child_sse = (q_left - s_left * s_left / n_left
                         + q_right - s_right * s_right / n_right)
        gains = np.where(valid, parent_sse - child_sse, -np.inf)
        best = int(np.argmax(gains))
        if gains[best] <= 0.0:
            return node
        split_feature = int(candidates[best])
        goes_right = x[rows, split_feature] > 0
        feature[node] = split_feature
        left[node] = build(rows[~goes_right], depth + 1)
        right[node] = build(rows[goes_right], depth + 1)
        return node

    build(np.arange(len(x)), 0)
    return _Tree(feature, left, right, value, max_depth)


class RandomForestModel:
    def __init__(self, trees: list[_Tree], code_length: int, config: ForestConfig):
        self.trees = trees
        self.code_length = code_length
        self.config = config
        self._stacked = None

    def _check(self, x: np.ndarray) -> None:
        if x.shape[-1] != self.code_length:
            raise ValueError(f"code length {x.shape[-1]} != training length "
                             f"{self.code_length}")

    def _stack(self):
        # pad per-tree node arrays to a common width; leaves self-loop so a
        # fixed number of descent steps lands every sample on its leaf
        width = max(len(t.feature) for t in self.trees)
        count = len(self.trees)
        feature = np.full((count, width), -1, dtype=np.int32)
        left = np.zeros((count, width), dtype=np.int32)
        right = np.zeros((count, width), dtype=np.int32)
        value = np.zeros((count, width))
        for i, tree in enumerate(self.trees):
            k = len(tree.feature)
            feature[i, :k] = tree.feature
            node_ids = np.arange(k, dtype=np.int32)
            is_leaf = tree.feature < 0
            left[i, :k] = np.where(is_leaf, node_ids, tree.left)
            right[i, :k] = np.where(is_leaf, node_ids, tree.right)
            value[i, :k] = tree.value
        depth = max(t.depth for t in self.trees)
        return feature, left, right, value, depth

    def predict(self, code) -> float:
        return float(self.predict_many(np.asarray(code, dtype=np.uint8)[None, :])[0])

    def predict_many(self, codes) -> np.ndarray:
        x = np.atleast_2d(np.asarray(codes, dtype=np.uint8))
        self._check(x)
        if self._stacked is None:
            self._stacked = self._stack()
        feature, left, right, value, depth = self._stacked
        t_idx = np.arange(len(self.trees), dtype=np.int32)[:, None]
        s_idx = np.arange(len(x), dtype=np.int32)[None, :]
        x_t = x.T  # (p, m)
        nodes = np.zeros((len(self.trees), len(x)), dtype=np.int32)
        for _ in range(depth):
            f = feature[t_idx, nodes]
            bit = x_t[np.maximum(f, 0), s_idx]
            nxt = np.where(bit > 0, right[t_idx, nodes], left[t_idx, nodes])
            nodes = np.where(f < 0, nodes, nxt)
        return value[t_idx, nodes].mean(axis=0)


def rf_train(data: LabeledDataset, config: ForestConfig) -> RandomForestModel:
    if len(data) < 2:
        raise ValueError("need at least 2 training rows")
    x = data.codes().astype(float)
    y = data.labels()
    if np.all(np.all(x == x[0], axis=1)):
        raise ValueError("degenerate training data: all codes identical")
    seeds = np.random.SeedSequence(config.rng_seed).spawn(config.tree_count)
    trees = []
    for seed in seeds:
        rng = np.random.default_rng(seed)
        if config.bootstrap:
            rows = rng.integers(0, len(x), size=len(x))
            trees.append(_grow_tree(x[rows], y[rows], config, rng))
        else:
            trees.append(_grow_tree(x, y, config, rng))
    return RandomForestModel(trees, x.shape[1], config)


def rf_save(model: RandomForestModel, path) -> None:
    payload = {
        "format": RF_FORMAT,
        "version": RF_VERSION,
        "code_length": model.code_length,
        "config": {
            "tree_count": model.config.tree_count,
            "max_depth": model.config.max_depth,
            "min_samples_leaf": model.config.min_samples_leaf,
            "feature_subsample": model.config.feature_subsample,
            "bootstrap": model.config.bootstrap,
            "rng_seed": model.config.rng_seed,
        },
        "trees": [
            {
                "feature": tree.feature.tolist(),
                "left": tree.left.tolist(),
                "right": tree.right.tolist(),
                "value": tree.value.tolist(),
            }
            for tree in model.trees
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh)


def rf_load(path) -> RandomForestModel:
    with open(path) as fh:
        payload = json.load(fh)
    if payload.get("format") != RF_FORMAT:
        raise ValueError(f"{path} is not a forest model file")
    if payload.get("version") != RF_VERSION:
        raise ValueError(f"unsupported forest model version {payload.get('version')}")
    trees = [_Tree(t["feature"], t["left"], t["right"], t["value"])
             for t in payload["trees"]]
    return RandomForestModel(trees, payload["code_length"],
                             ForestConfig(**payload["config"]))
