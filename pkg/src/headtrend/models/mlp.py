"""One-hidden-layer perceptron: D -> hidden (ReLU) -> 1 (sigmoid)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from headtrend.models.base import Dataset, Model, ModelError, TrainConfig, sigmoid


@dataclass(frozen=True, eq=False)
class MLPParams:
    W1: np.ndarray  # (D, H)
    b1: np.ndarray  # (H,)
    W2: np.ndarray  # (H,)
    b2: float

    def copy(self) -> "MLPParams":
        return MLPParams(self.W1.copy(), self.b1.copy(), self.W2.copy(), float(self.b2))

    @classmethod
    def zeros(cls, dim: int, hidden: int) -> "MLPParams":
        return cls(np.zeros((dim, hidden)), np.zeros(hidden), np.zeros(hidden), 0.0)


def init_params(dim: int, hidden: int, rng: np.random.Generator) -> MLPParams:
    """Uniform +-sqrt(6/(fan_in+fan_out)) weights, zero biases."""
    lim1 = np.sqrt(6.0 / (dim + hidden))
    lim2 = np.sqrt(6.0 / (hidden + 1))
    return MLPParams(rng.uniform(-lim1, lim1, (dim, hidden)), np.zeros(hidden),
                     rng.uniform(-lim2, lim2, hidden), 0.0)


def mlp_forward(params: MLPParams, X: np.ndarray):
    pre = X @ params.W1 + params.b1
    hidden = np.maximum(pre, 0.0)
    logits = hidden @ params.W2 + params.b2
    return pre, hidden, logits


def mlp_loss_and_grad(params: MLPParams, data: Dataset):
    """Mean binary cross-entropy and its backpropagated gradients.

    Returns ``(loss, MLPParams)`` with the gradient of every parameter.
    """
    pre, hidden, logits = mlp_forward(params, data.X)
    y = data.y
    n = data.n
    loss = float(np.mean(np.logaddexp(0.0, logits) - y * logits))
    d_logits = (sigmoid(logits) - y) / n
    gW2 = hidden.T @ d_logits
    gb2 = float(d_logits.sum())
    d_pre = np.outer(d_logits, params.W2) * (pre > 0)
    gW1 = data.X.T @ d_pre
    gb1 = d_pre.sum(axis=0)
    return loss, MLPParams(gW1, gb1, gW2, gb2)


@dataclass(frozen=True, eq=False)
class MLP(Model):
    kind = "mlp"
    params: MLPParams
    feature_dim: int

    def _predict_proba(self, X):
        return sigmoid(mlp_forward(self.params, X)[2])

    def state(self):
        p = self.params
        return {"W1": p.W1.ravel(), "b1": p.b1, "W2": p.W2, "b2": np.array([p.b2])}

    @classmethod
    def from_state(cls, feature_dim, state):
        h = state["b1"].size
        p = MLPParams(state["W1"].reshape(feature_dim, h), state["b1"], state["W2"],
                      float(state["b2"][0]))
        return cls(p, feature_dim)


def train_mlp(data: Dataset, config: TrainConfig = TrainConfig(),
              init: MLPParams | None = None) -> MLP:
    """Mini-batch SGD with a seeded shuffle each epoch."""
    rng = np.random.default_rng(config.seed)
    params = init.copy() if init is not None else init_params(data.dim, config.hidden_size, rng)
    lr = config.learning_rate
    bs = min(config.batch_size, data.n)
    for _ in range(config.epochs):
        order = rng.permutation(data.n)
        for start in range(0, data.n, bs):
            rows = order[start:start + bs]
            loss, g = mlp_loss_and_grad(params, Dataset(data.X[rows], data.y[rows]))
            if not np.isfinite(loss):
                raise ModelError(f"mlp loss diverged at learning rate {lr}; use a smaller rate")
            params = MLPParams(params.W1 - lr * g.W1, params.b1 - lr * g.b1,
                               params.W2 - lr * g.W2, params.b2 - lr * g.b2)
    return MLP(params, data.dim)
