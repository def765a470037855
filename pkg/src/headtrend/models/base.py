from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace
from importlib import resources
from typing import Any, ClassVar

import numpy as np


class ModelError(ValueError):
    pass


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    return np.exp(-np.logaddexp(0.0, -z))


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        y = np.asarray(self.y).astype(int).ravel()
        if X.ndim != 2 or X.shape[0] < 1:
            raise ModelError("dataset needs at least one row")
        if X.shape[0] != y.shape[0]:
            raise ModelError(f"{X.shape[0]} feature rows but {y.shape[0]} labels")
        if not np.isfinite(X).all():
            raise ModelError("non-finite feature values")
        if not np.isin(y, (0, 1)).all():
            raise ModelError("labels must be 0 or 1")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def dim(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for every model kind; each trainer reads the ones it uses."""

    seed: int = 0
    learning_rate: float = 0.1
    epochs: int = 500
    l2: float = 0.0
    tol: float = 1e-6
    batch_size: int = 32
    k: int = 5
    max_depth: int = 10
    min_leaf: int = 1
    n_trees: int = 100
    feature_fraction: float = 0.3
    bootstrap: bool = True
    hidden_size: int = 16

    def __post_init__(self):
        if self.learning_rate < 0 or self.l2 < 0 or self.tol < 0:
            raise ModelError("learning_rate, l2 and tol must be non-negative")
        for name in ("epochs", "batch_size", "k", "max_depth", "min_leaf", "n_trees", "hidden_size"):
            if getattr(self, name) < 1:
                raise ModelError(f"{name} must be >= 1")
        if not 0.0 < self.feature_fraction <= 1.0:
            raise ModelError("feature_fraction must lie in (0, 1]")

    @classmethod
    def for_kind(cls, kind: str, seed: int = 0, **overrides) -> "TrainConfig":
        """Shipped defaults for ``kind`` with ``overrides`` applied."""
        params = dict(default_hyperparameters().get(kind, {}))
        params.update(overrides)
        known = {f.name for f in fields(cls)}
        unknown = set(params) - known
        if unknown:
            raise ModelError(f"unknown hyperparameters for {kind}: {sorted(unknown)}")
        return cls(seed=seed, **params)

    def with_seed(self, seed: int) -> "TrainConfig":
        return replace(self, seed=seed)


def default_hyperparameters() -> dict[str, dict[str, Any]]:
    text = (resources.files("headtrend.resources") / "defaults.json").read_text(encoding="utf-8")
    return json.loads(text)["models"]


class Model:
    """Trained binary classifier. Subclasses set ``kind`` and implement ``_predict``."""

    kind: ClassVar[str]
    feature_dim: int

    def _check(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        if X.size == 0:
            return X.reshape(0, self.feature_dim)
        if X.ndim == 1:
            X = X[None, :]
        if X.ndim != 2 or X.shape[1] != self.feature_dim:
            raise ModelError(
                f"{self.kind}: expected {self.feature_dim} features, got shape {X.shape}"
            )
        return X

    def predict(self, X) -> np.ndarray:
        X = self._check(X)
        if X.shape[0] == 0:
            return np.zeros(0, dtype=int)
        return self._predict(X)

    def predict_proba(self, X) -> np.ndarray:
        X = self._check(X)
        if X.shape[0] == 0:
            return np.zeros(0)
        return self._predict_proba(X)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return (self._predict_proba(X) >= 0.5).astype(int)

    def _predict_proba(self, X: np.ndarray) -> np.ndarray:
        raise ModelError(f"{self.kind} does not define class probabilities")

    @property
    def has_proba(self) -> bool:
        return type(self)._predict_proba is not Model._predict_proba

    def state(self) -> dict[str, np.ndarray]:
        raise NotImplementedError

    @classmethod
    def from_state(cls, feature_dim: int, state: dict[str, np.ndarray]) -> "Model":
        raise NotImplementedError


def require_both_classes(data: Dataset) -> None:
    if np.unique(data.y).size < 2:
        raise ModelError("degenerate class distribution: both classes must be present")
