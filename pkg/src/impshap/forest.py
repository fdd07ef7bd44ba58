"""A small random forest whose leaves store class frequencies.

Trees are kept as flat arrays (feature, threshold, children, leaf payload)
so prediction is a vectorized descent and serialization is plain JSON.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .core import ProbabilityDistribution, make_distribution
from .data import Dataset

FORMAT_VERSION = 1
LEAF = -1


@dataclass
class DecisionTree:
    feature: np.ndarray     # split feature, LEAF for leaves
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray       # (n_nodes, n_classes) class frequencies

    @property
    def depth(self) -> int:
        def walk(node: int) -> int:
            if self.feature[node] == LEAF:
                return 0
            return 1 + max(walk(self.left[node]), walk(self.right[node]))
        return walk(0)

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=int)
        active = self.feature[node] != LEAF
        while active.any():
            idx = np.nonzero(active)[0]
            f = self.feature[node[idx]]
            go_left = X[idx, f] <= self.threshold[node[idx]]
            node[idx] = np.where(go_left, self.left[node[idx]], self.right[node[idx]])
            active = self.feature[node] != LEAF
        return node

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "value": self.value.tolist()}

    @classmethod
    def from_dict(cls, d: dict) -> "DecisionTree":
        return cls(np.array(d["feature"], dtype=int), np.array(d["threshold"], dtype=float),
                   np.array(d["left"], dtype=int), np.array(d["right"], dtype=int),
                   np.array(d["value"], dtype=float))


def _best_split(X: np.ndarray, y: np.ndarray, n_classes: int, features: np.ndarray):
    """Lowest weighted Gini impurity over midpoints of consecutive distinct values."""
    n = len(y)
    best = None
    onehot = np.eye(n_classes)[y]
    total = onehot.sum(axis=0)
    for f in features:
        order = np.argsort(X[:, f], kind="stable")
        xs = X[order, f]
        distinct = np.nonzero(xs[1:] > xs[:-1])[0]
        if distinct.size == 0:
            continue
        left_counts = np.cumsum(onehot[order], axis=0)[distinct]
        n_left = (distinct + 1).astype(float)
        n_right = n - n_left
        right_counts = total - left_counts
        gini_left = 1.0 - ((left_counts / n_left[:, None]) ** 2).sum(axis=1)
        gini_right = 1.0 - ((right_counts / n_right[:, None]) ** 2).sum(axis=1)
        score = (n_left * gini_left + n_right * gini_right) / n
        j = int(np.argmin(score))
        if best is None or score[j] < best[0] - 1e-15:
            i = distinct[j]
            best = (float(score[j]), int(f), 0.5 * (xs[i] + xs[i + 1]))
    return best


def fit_tree(X: np.ndarray, y: np.ndarray, n_classes: int, max_depth: int | None,
             max_features: int, rng: np.random.Generator) -> DecisionTree:
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(idx: np.ndarray) -> int:
        counts = np.bincount(y[idx], minlength=n_classes).astype(float)
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(counts / counts.sum())
        return len(feature) - 1

    root = new_node(np.arange(len(y)))
    stack = [(root, np.arange(len(y)), 0)]
    while stack:
        node, idx, depth = stack.pop()
        if max_depth is not None and depth >= max_depth:
            continue
        if np.all(y[idx] == y[idx[0]]):
            continue
        m = X.shape[1]
        feats = np.sort(rng.choice(m, size=max_features, replace=False))
        split = _best_split(X[idx], y[idx], n_classes, feats)
        if split is None and max_features < m:
            split = _best_split(X[idx], y[idx], n_classes, np.arange(m))
        if split is None:
            continue
        _, f, thr = split
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(li)
        right[node] = new_node(ri)
        stack.append((right[node], ri, depth + 1))
        stack.append((left[node], li, depth + 1))
    return DecisionTree(np.array(feature, dtype=int), np.array(threshold), np.array(left, dtype=int),
                        np.array(right, dtype=int), np.array(value))


@dataclass
class RandomForestModel:
    trees: list[DecisionTree]
    n_features: int
    n_classes: int
    max_depth: int | None
    seed: int | None
    bootstrap: bool = True
    oob_accuracy: float | None = None

    @property
    def tree_count(self) -> int:
        return len(self.trees)

    def predict_proba_batch(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise ValueError(f"expected {self.n_features} features, got {X.shape[1]}")
        out = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            out += tree.predict_proba(X)
        return out / len(self.trees)

    def predict_proba(self, x: Sequence[float]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.ndim != 1:
            raise ValueError("predict_proba takes a single feature vector")
        return self.predict_proba_batch(x[None, :])[0]

    def predict(self, X) -> np.ndarray:
        return self.predict_proba_batch(X).argmax(axis=1)

    def to_dict(self) -> dict:
        return {"format": "impshap-forest", "version": FORMAT_VERSION,
                "n_features": self.n_features, "n_classes": self.n_classes,
                "max_depth": self.max_depth, "seed": self.seed, "bootstrap": self.bootstrap,
                "oob_accuracy": self.oob_accuracy,
                "trees": [t.to_dict() for t in self.trees]}

    @classmethod
    def from_dict(cls, d: dict) -> "RandomForestModel":
        if d.get("format") != "impshap-forest" or d.get("version") != FORMAT_VERSION:
            raise ValueError("not a serialized forest of a supported version")
        return cls([DecisionTree.from_dict(t) for t in d["trees"]], d["n_features"],
                   d["n_classes"], d["max_depth"], d["seed"], d["bootstrap"], d["oob_accuracy"])

    def save(self, path: "str | Path") -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path: "str | Path") -> "RandomForestModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def fit_random_forest(data: Dataset, tree_count: int = 100, max_depth: int | None = 8,
                      seed: int | None = 0, bootstrap: bool = True,
                      max_features: int | None = None) -> RandomForestModel:
    """Bagged Gini trees with sqrt(m) candidate features per split."""
    if data.n_rows < 2:
        raise ValueError("need at least 2 training rows")
    if len(np.unique(data.y)) < 2:
        raise ValueError("training data contains a single class")
    if tree_count < 1:
        raise ValueError("tree_count must be >= 1")
    m = data.n_features
    if max_features is None:
        max_features = max(1, int(math.isqrt(m)))
    max_features = min(max_features, m)
    n = data.n_rows
    rng = np.random.default_rng(seed)
    trees = []
    oob_votes = np.zeros((n, data.n_classes))
    for _ in range(tree_count):
        tree_rng = np.random.default_rng(rng.integers(2**63))
        idx = tree_rng.integers(0, n, size=n) if bootstrap else np.arange(n)
        tree = fit_tree(data.X[idx], data.y[idx], data.n_classes, max_depth, max_features, tree_rng)
        trees.append(tree)
        if bootstrap:
            out = np.setdiff1d(np.arange(n), idx)
            if out.size:
                oob_votes[out] += tree.predict_proba(data.X[out])
    oob = None
    seen = oob_votes.sum(axis=1) > 0
    if bootstrap and seen.any():
        oob = float(np.mean(oob_votes[seen].argmax(axis=1) == data.y[seen]))
    return RandomForestModel(trees, m, data.n_classes, max_depth, seed, bootstrap, oob)


def predict_proba(model: RandomForestModel, x: Sequence[float]) -> ProbabilityDistribution:
    return make_distribution(model.predict_proba(x))
