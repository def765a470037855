"""Binary classifiers sharing a ``train_*(dataset, config) -> Model`` contract."""

from __future__ import annotations

import numpy as np

from headtrend.models.base import Dataset, Model, ModelError, TrainConfig, sigmoid
from headtrend.models.bayes import DiagonalLDA, GaussianNB, train_gnb, train_lda
from headtrend.models.io import dumps_model, load_model, loads_model, save_model
from headtrend.models.knn import KNearestNeighbors, predict_knn, train_knn
from headtrend.models.linear import (
    LinearSVM, LogisticRegression, logreg_loss_and_grad, svm_objective_and_subgrad,
    train_logreg, train_svm,
)
from headtrend.models.mlp import MLP, MLPParams, mlp_loss_and_grad, train_mlp
from headtrend.models.tree import DecisionTree, RandomForest, train_dtree, train_rforest

TRAINERS = {
    "logreg": train_logreg,
    "lda": train_lda,
    "knn": train_knn,
    "dtree": train_dtree,
    "svm": train_svm,
    "rforest": train_rforest,
    "gnb": train_gnb,
    "mlp": train_mlp,
}
KINDS = tuple(TRAINERS)

MODEL_CLASSES = {
    cls.kind: cls
    for cls in (LogisticRegression, DiagonalLDA, KNearestNeighbors, DecisionTree, LinearSVM,
                RandomForest, GaussianNB, MLP)
}

# TrainConfig fields each trainer reads (seed aside)
HYPERPARAMETERS = {
    "logreg": ("learning_rate", "epochs", "l2", "tol"),
    "lda": (),
    "knn": ("k",),
    "dtree": ("max_depth", "min_leaf"),
    "svm": ("learning_rate", "epochs", "l2"),
    "rforest": ("n_trees", "feature_fraction", "bootstrap", "max_depth", "min_leaf"),
    "gnb": (),
    "mlp": ("learning_rate", "epochs", "batch_size", "hidden_size"),
}

DISPLAY_NAMES = {
    "logreg": "Logistic Regression",
    "lda": "Linear Discriminant Analysis",
    "knn": "K-Nearest Neighbors",
    "dtree": "Decision Tree Classifier",
    "svm": "Support Vector Machine",
    "rforest": "Random Forest",
    "gnb": "Naive Bayes",
    "mlp": "MLP",
}


def train(kind: str, data: Dataset, config: TrainConfig | None = None) -> Model:
    if kind not in TRAINERS:
        raise ModelError(f"unknown model kind {kind!r}; choose from {', '.join(KINDS)}")
    return TRAINERS[kind](data, config or TrainConfig.for_kind(kind))


def predict(model: Model, X) -> np.ndarray:
    return model.predict(X)


def predict_proba(model: Model, X) -> np.ndarray:
    return model.predict_proba(X)


__all__ = [
    "Dataset", "Model", "ModelError", "TrainConfig", "KINDS", "TRAINERS", "DISPLAY_NAMES",
    "HYPERPARAMETERS",
    "train", "predict", "predict_proba", "sigmoid",
    "logreg_loss_and_grad", "svm_objective_and_subgrad", "mlp_loss_and_grad", "MLPParams",
    "train_logreg", "train_lda", "train_knn", "predict_knn", "train_dtree", "train_svm",
    "train_rforest", "train_gnb", "train_mlp",
    "LogisticRegression", "DiagonalLDA", "KNearestNeighbors", "DecisionTree", "LinearSVM",
    "RandomForest", "GaussianNB", "MLP",
    "dumps_model", "loads_model", "save_model", "load_model",
]
