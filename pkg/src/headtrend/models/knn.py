from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from headtrend.models.base import Dataset, Model, ModelError, TrainConfig


@dataclass(frozen=True, eq=False)
class KNearestNeighbors(Model):
    """Majority vote of the k nearest training rows (Euclidean).

    Equal distances favor the lower training index; a split vote goes to the
    label of the single nearest neighbor.
    """

    kind = "knn"
    X: np.ndarray
    y: np.ndarray
    k: int
    feature_dim: int

    def neighbors(self, x: np.ndarray) -> np.ndarray:
        dist = np.sum((self.X - x) ** 2, axis=1)
        return np.argsort(dist, kind="stable")[: self.k]

    def _predict(self, X):
        out = np.empty(X.shape[0], dtype=int)
        for i, x in enumerate(X):
            labels = self.y[self.neighbors(x)]
            ones = int(labels.sum())
            zeros = labels.size - ones
            out[i] = 1 if ones > zeros else 0 if zeros > ones else labels[0]
        return out

    def state(self):
        return {"X": self.X.ravel(), "y": self.y.astype(float), "k": np.array([self.k])}

    @classmethod
    def from_state(cls, feature_dim, state):
        y = state["y"].astype(int)
        return cls(state["X"].reshape(y.size, feature_dim), y, int(state["k"][0]), feature_dim)


def train_knn(data: Dataset, config: TrainConfig = TrainConfig()) -> KNearestNeighbors:
    if config.k > data.n:
        raise ModelError(f"k={config.k} exceeds the {data.n} training rows")
    return KNearestNeighbors(data.X.copy(), data.y.copy(), config.k, data.dim)


def predict_knn(model: KNearestNeighbors, x) -> int:
    return int(model.predict(np.atleast_2d(x))[0])
