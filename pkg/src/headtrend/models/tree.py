"""CART classification trees (Gini) and a bagged random forest."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from headtrend.models.base import Dataset, Model, TrainConfig

LEAF = -1


def best_split(X: np.ndarray, y: np.ndarray, features: np.ndarray, min_leaf: int):
    """Lowest weighted-Gini split of the rows ``X`` over candidate ``features``.

    Thresholds are midpoints between consecutive distinct sorted values.
    Ties go to the lowest feature index, then the lowest threshold.
    Returns ``(feature, threshold)`` or ``None`` when no admissible split exists.
    """
    n = X.shape[0]
    if n < 2 * min_leaf or n < 2:
        return None
    sub = X[:, features]
    varying = sub.max(axis=0) > sub.min(axis=0)
    if not varying.any():
        return None
    # constant columns admit no split; dropping them keeps feature order intact
    features, sub = features[varying], sub[:, varying]
    order = np.argsort(sub, axis=0, kind="stable")
    xs = np.take_along_axis(sub, order, axis=0)
    ys = y[order]
    left_pos = np.cumsum(ys, axis=0)[:-1].astype(float)
    n_left = np.arange(1, n, dtype=float)[:, None]
    n_right = n - n_left
    right_pos = ys[:, :1].sum() - left_pos
    # n * weighted Gini / 2, up to a constant factor
    impurity = (left_pos * (n_left - left_pos) / n_left
                + right_pos * (n_right - right_pos) / n_right)
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    impurity = np.where(valid, impurity, np.inf)
    flat = impurity.T.ravel()
    j = int(np.argmin(flat))
    if not np.isfinite(flat[j]):
        return None
    f_local, i = divmod(j, n - 1)
    lo, hi = xs[i, f_local], xs[i + 1, f_local]
    threshold = lo + (hi - lo) / 2.0
    if not lo <= threshold < hi:
        threshold = lo
    return int(features[f_local]), float(threshold)


@dataclass(frozen=True, eq=False)
class DecisionTree(Model):
    """Array-encoded binary tree; row ``x`` goes left when ``x[feature] <= threshold``."""

    kind = "dtree"
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # fraction of class 1 among training rows in the node
    feature_dim: int

    @property
    def n_nodes(self) -> int:
        return self.feature.size

    def apply(self, X: np.ndarray) -> np.ndarray:
        node = np.zeros(X.shape[0], dtype=int)
        active = self.feature[node] != LEAF
        while active.any():
            idx = np.nonzero(active)[0]
            cur = node[idx]
            go_left = X[idx, self.feature[cur]] <= self.threshold[cur]
            node[idx] = np.where(go_left, self.left[cur], self.right[cur])
            active = self.feature[node] != LEAF
        return node

    def _predict(self, X):
        # majority in the leaf, ties to class 0
        return (self.value[self.apply(X)] > 0.5).astype(int)

    def _predict_proba(self, X):
        return self.value[self.apply(X)]

    def state(self):
        return {"feature": self.feature.astype(float), "threshold": self.threshold,
                "left": self.left.astype(float), "right": self.right.astype(float),
                "value": self.value}

    @classmethod
    def from_state(cls, feature_dim, state):
        as_int = lambda a: a.astype(int)  # noqa: E731
        return cls(as_int(state["feature"]), state["threshold"], as_int(state["left"]),
                   as_int(state["right"]), state["value"], feature_dim)


def grow_tree(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: int,
    min_leaf: int,
    choose_features: Callable[[], np.ndarray],
) -> DecisionTree:
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[rows].mean()))
        return len(feature) - 1

    root = new_node(np.arange(X.shape[0]))
    stack = [(root, np.arange(X.shape[0]), 0)]
    while stack:
        node, rows, depth = stack.pop()
        v = value[node]
        if depth >= max_depth or v == 0.0 or v == 1.0:
            continue
        split = best_split(X[rows], y[rows], choose_features(), min_leaf)
        if split is None:
            continue
        f, t = split
        mask = X[rows, f] <= t
        feature[node], threshold[node] = f, t
        left[node] = new_node(rows[mask])
        right[node] = new_node(rows[~mask])
        stack.append((right[node], rows[~mask], depth + 1))
        stack.append((left[node], rows[mask], depth + 1))
    return DecisionTree(np.array(feature), np.array(threshold, dtype=float), np.array(left),
                        np.array(right), np.array(value), X.shape[1])


def train_dtree(data: Dataset, config: TrainConfig = TrainConfig()) -> DecisionTree:
    all_features = np.arange(data.dim)
    return grow_tree(data.X, data.y, config.max_depth, config.min_leaf, lambda: all_features)


@dataclass(frozen=True, eq=False)
class RandomForest(Model):
    kind = "rforest"
    trees: tuple[DecisionTree, ...]
    feature_dim: int

    def votes(self, X: np.ndarray) -> np.ndarray:
        return np.mean([t._predict(X) for t in self.trees], axis=0)

    def _predict(self, X):
        # strict majority; split votes go to class 0
        return (self.votes(X) > 0.5).astype(int)

    def _predict_proba(self, X):
        return self.votes(X)

    def state(self):
        out = {"n_trees": np.array([len(self.trees)])}
        for i, t in enumerate(self.trees):
            out.update({f"tree{i}.{k}": v for k, v in t.state().items()})
        return out

    @classmethod
    def from_state(cls, feature_dim, state):
        n = int(state["n_trees"][0])
        trees = []
        for i in range(n):
            prefix = f"tree{i}."
            sub = {k[len(prefix):]: v for k, v in state.items() if k.startswith(prefix)}
            trees.append(DecisionTree.from_state(feature_dim, sub))
        return cls(tuple(trees), feature_dim)


def train_rforest(data: Dataset, config: TrainConfig = TrainConfig()) -> RandomForest:
    """Each tree sees a bootstrap sample and ``ceil(feature_fraction * D)`` random
    features per split; tree seeds are spawned from ``config.seed``."""
    n_feat = math.ceil(config.feature_fraction * data.dim)
    all_features = np.arange(data.dim)
    trees = []
    for seq in np.random.SeedSequence(config.seed).spawn(config.n_trees):
        rng = np.random.default_rng(seq)
        rows = rng.integers(0, data.n, size=data.n) if config.bootstrap else np.arange(data.n)
        if n_feat >= data.dim:
            choose = lambda: all_features  # noqa: E731
        else:
            choose = lambda rng=rng: np.sort(rng.choice(data.dim, n_feat, replace=False))  # noqa: E731
        trees.append(grow_tree(data.X[rows], data.y[rows], config.max_depth, config.min_leaf,
                               choose))
    return RandomForest(tuple(trees), data.dim)
