"""Logistic regression and linear SVM, both trained by full-batch descent."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from headtrend.models.base import Dataset, Model, ModelError, TrainConfig, sigmoid


def logreg_loss_and_grad(weights, bias: float, data: Dataset, l2: float = 0.0):
    """Mean binary cross-entropy plus ``(l2/2)*||w||^2``.

    Returns ``(loss, grad_weights, grad_bias)``.
    """
    w = np.asarray(weights, dtype=float)
    z = data.X @ w + bias
    # log(1+e^z) - y*z is the cross-entropy written in logits
    loss = np.mean(np.logaddexp(0.0, z) - data.y * z) + 0.5 * l2 * (w @ w)
    err = sigmoid(z) - data.y
    grad_w = data.X.T @ err / data.n + l2 * w
    grad_b = float(err.mean())
    return float(loss), grad_w, grad_b


@dataclass(frozen=True, eq=False)
class LogisticRegression(Model):
    kind = "logreg"
    weights: np.ndarray
    bias: float
    feature_dim: int

    def _predict_proba(self, X):
        return sigmoid(X @ self.weights + self.bias)

    def state(self):
        return {"weights": self.weights, "bias": np.array([self.bias])}

    @classmethod
    def from_state(cls, feature_dim, state):
        return cls(state["weights"], float(state["bias"][0]), feature_dim)


def train_logreg(data: Dataset, config: TrainConfig = TrainConfig()) -> LogisticRegression:
    w = np.zeros(data.dim)
    b = 0.0
    lr = config.learning_rate
    # divergence is detected below, so overflow warnings would only be noise
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(config.epochs):
            loss, gw, gb = logreg_loss_and_grad(w, b, data, config.l2)
            if not np.isfinite(loss):
                raise ModelError(f"logreg loss diverged at learning rate {lr}; use a smaller rate")
            if np.sqrt(gw @ gw + gb * gb) < config.tol:
                break
            w = w - lr * gw
            b = b - lr * gb
    if not (np.isfinite(w).all() and np.isfinite(b)):
        raise ModelError(f"logreg parameters diverged at learning rate {lr}; use a smaller rate")
    return LogisticRegression(w, float(b), data.dim)


def svm_objective_and_subgrad(weights, bias: float, X, y_pm, l2: float):
    """``(l2/2)||w||^2 + mean(max(0, 1 - y(w.x+b)))`` and a subgradient.

    ``y_pm`` holds labels in {-1, +1}. Points with margin >= 1 contribute
    nothing beyond the regularizer.
    """
    w = np.asarray(weights, dtype=float)
    margins = y_pm * (X @ w + bias)
    active = margins < 1.0
    n = X.shape[0]
    obj = 0.5 * l2 * (w @ w) + np.maximum(0.0, 1.0 - margins).mean()
    grad_w = l2 * w - (y_pm[active] @ X[active]) / n
    grad_b = -float(y_pm[active].sum()) / n
    return float(obj), grad_w, grad_b


@dataclass(frozen=True, eq=False)
class LinearSVM(Model):
    kind = "svm"
    weights: np.ndarray
    bias: float
    feature_dim: int

    def decision_function(self, X):
        return self._check(X) @ self.weights + self.bias

    def _predict(self, X):
        # sign(0) maps to class 1
        return (X @ self.weights + self.bias >= 0).astype(int)

    def state(self):
        return {"weights": self.weights, "bias": np.array([self.bias])}

    @classmethod
    def from_state(cls, feature_dim, state):
        return cls(state["weights"], float(state["bias"][0]), feature_dim)


def train_svm(data: Dataset, config: TrainConfig = TrainConfig()) -> LinearSVM:
    y_pm = 2.0 * data.y - 1.0
    w = np.zeros(data.dim)
    b = 0.0
    for t in range(config.epochs):
        _, gw, gb = svm_objective_and_subgrad(w, b, data.X, y_pm, config.l2)
        step = config.learning_rate / np.sqrt(t + 1.0)
        w = w - step * gw
        b = b - step * gb
        if not (np.isfinite(w).all() and np.isfinite(b)):
            raise ModelError("svm parameters became non-finite; use a smaller learning rate")
    return LinearSVM(w, float(b), data.dim)
