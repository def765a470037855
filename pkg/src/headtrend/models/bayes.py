"""Gaussian naive Bayes and diagonal linear discriminant analysis."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from headtrend.models.base import (
    Dataset, Model, TrainConfig, require_both_classes, sigmoid,
)

VAR_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class GaussianNB(Model):
    kind = "gnb"
    log_prior: np.ndarray  # (2,)
    means: np.ndarray  # (2, D)
    variances: np.ndarray  # (2, D)
    feature_dim: int

    def log_posterior(self, X) -> np.ndarray:
        """Unnormalized per-class log posteriors, shape (N, 2)."""
        X = self._check(X)
        out = np.empty((X.shape[0], 2))
        for c in (0, 1):
            var = self.variances[c]
            out[:, c] = (
                self.log_prior[c]
                - 0.5 * np.sum(np.log(2.0 * np.pi * var))
                - 0.5 * np.sum((X - self.means[c]) ** 2 / var, axis=1)
            )
        return out

    def _predict(self, X):
        lp = self.log_posterior(X)
        return (lp[:, 1] >= lp[:, 0]).astype(int)

    def _predict_proba(self, X):
        lp = self.log_posterior(X)
        return sigmoid(lp[:, 1] - lp[:, 0])

    def state(self):
        return {"log_prior": self.log_prior, "means": self.means.ravel(),
                "variances": self.variances.ravel()}

    @classmethod
    def from_state(cls, feature_dim, state):
        return cls(state["log_prior"], state["means"].reshape(2, feature_dim),
                   state["variances"].reshape(2, feature_dim), feature_dim)


def train_gnb(data: Dataset, config: TrainConfig = TrainConfig()) -> GaussianNB:
    require_both_classes(data)
    means = np.empty((2, data.dim))
    variances = np.empty((2, data.dim))
    log_prior = np.empty(2)
    for c in (0, 1):
        Xc = data.X[data.y == c]
        log_prior[c] = np.log(Xc.shape[0] / data.n)
        means[c] = Xc.mean(axis=0)
        variances[c] = np.maximum(Xc.var(axis=0), VAR_FLOOR)
    return GaussianNB(log_prior, means, variances, data.dim)


@dataclass(frozen=True, eq=False)
class DiagonalLDA(Model):
    """Class means with one pooled variance per feature.

    Discriminants are evaluated on features centered by the training mean,
    which changes every class score by the same amount and keeps the
    decision stable under feature translation.
    """

    kind = "lda"
    center: np.ndarray  # (D,)
    means: np.ndarray  # (2, D), centered
    variances: np.ndarray  # (D,)
    log_prior: np.ndarray  # (2,)
    feature_dim: int

    def discriminants(self, X) -> np.ndarray:
        Xc = self._check(X) - self.center
        scaled = self.means / self.variances  # (2, D)
        quad = 0.5 * np.sum(self.means * scaled, axis=1)
        return Xc @ scaled.T - quad + self.log_prior

    def _predict(self, X):
        d = self.discriminants(X)
        # exact ties go to class 0
        return (d[:, 1] > d[:, 0]).astype(int)

    def _predict_proba(self, X):
        d = self.discriminants(X)
        return sigmoid(d[:, 1] - d[:, 0])

    def state(self):
        return {"center": self.center, "means": self.means.ravel(),
                "variances": self.variances, "log_prior": self.log_prior}

    @classmethod
    def from_state(cls, feature_dim, state):
        return cls(state["center"], state["means"].reshape(2, feature_dim),
                   state["variances"], state["log_prior"], feature_dim)


def train_lda(data: Dataset, config: TrainConfig = TrainConfig()) -> DiagonalLDA:
    require_both_classes(data)
    center = data.X.mean(axis=0)
    X = data.X - center
    means = np.empty((2, data.dim))
    log_prior = np.empty(2)
    sq = np.zeros(data.dim)
    for c in (0, 1):
        Xc = X[data.y == c]
        means[c] = Xc.mean(axis=0)
        sq += ((Xc - means[c]) ** 2).sum(axis=0)
        log_prior[c] = np.log(Xc.shape[0] / data.n)
    dof = data.n - 2 if data.n > 2 else data.n
    variances = np.maximum(sq / dof, VAR_FLOOR)
    return DiagonalLDA(center, means, variances, log_prior, data.dim)
