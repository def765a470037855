import dataclasses
import math

import numpy as np
import pytest

from headtrend.models import (
    KINDS, Dataset, MLPParams, ModelError, TrainConfig, dumps_model, loads_model,
    logreg_loss_and_grad, mlp_loss_and_grad, predict_knn, svm_objective_and_subgrad, train,
    train_dtree, train_gnb, train_knn, train_lda, train_logreg, train_mlp, train_rforest, train_svm,
)
from headtrend.models.linear import LogisticRegression
from tests.conftest import two_blobs
from tests.oracles import central_difference, relative_error

XOR_X = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
XOR_Y = np.array([0, 1, 1, 0])


# logistic regression

def test_logreg_loss_at_zero():
    rng = np.random.default_rng(0)
    data = Dataset(rng.normal(size=(10, 3)), [0, 1] * 5)
    loss, gw, gb = logreg_loss_and_grad(np.zeros(3), 0.0, data, 0.0)
    assert loss == pytest.approx(math.log(2))
    assert gb == pytest.approx(0.0)


@pytest.mark.parametrize("seed", range(5))
def test_logreg_gradient_check(seed):
    rng = np.random.default_rng(seed)
    data = Dataset(rng.normal(size=(20, 10)), rng.integers(0, 2, 20))
    w, b, lam = rng.normal(size=10), float(rng.normal()), 0.3
    _, gw, gb = logreg_loss_and_grad(w, b, data, lam)
    num_w = central_difference(lambda x: logreg_loss_and_grad(x, b, data, lam)[0], w)
    num_b = central_difference(lambda x: logreg_loss_and_grad(w, x[0], data, lam)[0], np.array([b]))
    assert relative_error(gw, num_w) < 1e-4
    assert relative_error([gb], num_b) < 1e-4


def test_logreg_regularizer_dominates():
    data = Dataset(np.ones((4, 2)), [0, 1, 0, 1])
    w = np.array([1.0, -2.0])
    loss, _, _ = logreg_loss_and_grad(w, 0.0, data, 1e6)
    assert loss == pytest.approx(0.5 * 1e6 * 5.0, rel=1e-5)


def test_logreg_1d():
    m = train_logreg(Dataset([[-1.0], [1.0]], [0, 1]), TrainConfig(learning_rate=0.5, epochs=200))
    assert m.weights[0] > 0
    assert m.predict([[-1.0], [1.0]]).tolist() == [0, 1]


def test_logreg_divergence_reported():
    X = np.array([[1e200], [-1e200]])
    with pytest.raises(ModelError, match="smaller"):
        train_logreg(Dataset(X, [1, 0]), TrainConfig(learning_rate=1e300, epochs=5))


def test_zero_logreg_probability_half():
    m = LogisticRegression(np.zeros(3), 0.0, 3)
    np.testing.assert_array_equal(m.predict_proba(np.ones((2, 3))), [0.5, 0.5])
    np.testing.assert_array_equal(m.predict(np.ones((2, 3))), [1, 1])


# naive Bayes / LDA

def test_gnb_basic_and_degenerate():
    X = np.array([[-2.0], [-2.1], [-1.9], [2.0], [2.1], [1.9]])
    m = train_gnb(Dataset(X, [0, 0, 0, 1, 1, 1]))
    assert m.predict([[2.0]]).tolist() == [1]
    with pytest.raises(ModelError, match="degenerate"):
        train_gnb(Dataset(X, [1] * 6))


def test_gnb_constant_feature_uses_floor():
    X = np.array([[5.0, -1], [5.0, -1.2], [5.0, 1], [5.0, 1.2]])
    m = train_gnb(Dataset(X, [0, 0, 1, 1]))
    np.testing.assert_array_equal(m.variances[:, 0], [1e-9, 1e-9])
    lp_const = m.log_posterior([[5.0, 0.3]]) - m.log_posterior([[5.0, 0.3]])
    np.testing.assert_array_equal(lp_const, 0)
    # the constant column contributes the same term to both classes
    assert m.means[0, 0] == m.means[1, 0]


def test_lda_examples():
    X = np.array([[-1.2], [-0.8], [0.8], [1.2]])
    m = train_lda(Dataset(X, [0, 0, 1, 1]))
    assert m.predict([[0.9]]).tolist() == [1]
    tie = train_lda(Dataset(np.array([[1.0], [-1.0], [1.0], [-1.0]]), [0, 0, 1, 1]))
    assert tie.predict([[0.3]]).tolist() == [0]
    with pytest.raises(ModelError):
        train_lda(Dataset(X, [0, 0, 0, 0]))


@pytest.mark.parametrize("seed", range(3))
def test_scale_and_shift_invariance(seed):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(60, 5))
    y = rng.integers(0, 2, 60)
    Q = rng.normal(size=(40, 5))
    g = train_gnb(Dataset(X, y))
    assert (g.predict(Q) == train_gnb(Dataset(10 * X, y)).predict(10 * Q)).all()
    shift = rng.normal(size=5) * 100
    lda = train_lda(Dataset(X, y))
    assert (lda.predict(Q) == train_lda(Dataset(X + shift, y)).predict(Q + shift)).all()


# KNN

def test_knn_rules():
    X = np.array([[0.0], [1.0], [3.0], [10.0]])
    m = train_knn(Dataset(X, [0, 1, 1, 0]), TrainConfig(k=1))
    assert predict_knn(m, [3.0]) == 1
    m3 = train_knn(Dataset(X, [0, 1, 1, 0]), TrainConfig(k=3))
    assert predict_knn(m3, [1.5]) == 1
    # k=2 split vote: nearest neighbor (label 1 at x=1) decides
    m2 = train_knn(Dataset(X, [0, 1, 1, 0]), TrainConfig(k=2))
    assert predict_knn(m2, [0.6]) == 1
    with pytest.raises(ModelError):
        train_knn(Dataset(X, [0, 1, 1, 0]), TrainConfig(k=5))


def test_knn_distance_tie_prefers_lower_index():
    X = np.array([[-1.0], [1.0]])
    m = train_knn(Dataset(X, [1, 0]), TrainConfig(k=1))
    assert predict_knn(m, [0.0]) == 1


def test_knn_one_neighbor_memorizes():
    rng = np.random.default_rng(0)
    X, y = rng.normal(size=(50, 4)), rng.integers(0, 2, 50)
    m = train_knn(Dataset(X, y), TrainConfig(k=1))
    assert (m.predict(X) == y).all()


# trees

def test_dtree_simple_split():
    m = train_dtree(Dataset([[1.0], [2.0], [8.0], [9.0]], [0, 0, 1, 1]), TrainConfig(max_depth=3))
    assert m.feature[0] == 0 and m.threshold[0] == 5.0
    assert m.predict([[1.0], [2.0], [8.0], [9.0]]).tolist() == [0, 0, 1, 1]


def test_dtree_pure_is_single_leaf():
    m = train_dtree(Dataset(np.arange(6.0)[:, None], [1] * 6))
    assert m.n_nodes == 1
    assert m.predict([[100.0]]).tolist() == [1]


def test_dtree_xor_depth():
    d = Dataset(XOR_X, XOR_Y)
    assert (train_dtree(d, TrainConfig(max_depth=2)).predict(XOR_X) == XOR_Y).mean() == 1.0
    assert (train_dtree(d, TrainConfig(max_depth=1)).predict(XOR_X) == XOR_Y).mean() == 0.5


def test_dtree_min_leaf():
    m = train_dtree(Dataset([[1.0], [2.0], [3.0], [4.0]], [0, 1, 1, 1]), TrainConfig(min_leaf=2))
    assert m.threshold[0] == 2.5


def test_dtree_accuracy_monotone_in_depth():
    rng = np.random.default_rng(4)
    X, y = rng.normal(size=(120, 4)), rng.integers(0, 2, 120)
    accs = [(train_dtree(Dataset(X, y), TrainConfig(max_depth=d)).predict(X) == y).mean()
            for d in range(1, 9)]
    assert all(a <= b for a, b in zip(accs, accs[1:]))


def test_forest_deterministic():
    X, y = two_blobs(1, n=80)
    cfg = TrainConfig(n_trees=5, seed=9)
    a, b = train_rforest(Dataset(X, y), cfg), train_rforest(Dataset(X, y), cfg)
    Q = np.random.default_rng(2).normal(size=(30, 10))
    np.testing.assert_array_equal(a.predict_proba(Q), b.predict_proba(Q))


def test_forest_split_vote_goes_to_zero():
    X = np.array([[0.0], [1.0]])
    forest = train_rforest(Dataset(X, [0, 1]), TrainConfig(n_trees=2, seed=0))
    trees = forest.trees
    votes = forest.votes(np.array([[0.0], [1.0]]))
    assert forest.predict(X).tolist() == [int(v > 0.5) for v in votes]
    assert len(trees) == 2


# SVM

def test_svm_1d():
    m = train_svm(Dataset([[-2.0], [2.0]], [0, 1]), TrainConfig(learning_rate=0.1, epochs=100,
                                                                l2=0.01))
    assert m.weights[0] > 0
    assert m.predict([[-2.0], [2.0]]).tolist() == [0, 1]


def test_hinge_flat_region():
    w = np.array([2.0, -1.0])
    X = np.array([[3.0, 0.0]])
    _, gw, gb = svm_objective_and_subgrad(w, 0.0, X, np.array([1.0]), 0.5)
    np.testing.assert_array_equal(gw, 0.5 * w)
    assert gb == 0.0


def test_svm_zero_score_maps_to_one():
    m = train_svm(Dataset([[0.0], [0.0]], [0, 1]), TrainConfig(epochs=1))
    assert m.predict([[0.0]]).tolist() == [1]


# MLP

def test_mlp_zero_params():
    rng = np.random.default_rng(0)
    data = Dataset(rng.normal(size=(7, 3)), rng.integers(0, 2, 7))
    loss, _ = mlp_loss_and_grad(MLPParams.zeros(3, 4), data)
    assert loss == pytest.approx(math.log(2))


def _mlp_numeric(params, data, name):
    def f(x):
        p = params.copy()
        if name == "b2":
            p = dataclasses.replace(p, b2=float(x[0]))
        else:
            getattr(p, name)[...] = x
        return mlp_loss_and_grad(p, data)[0]
    value = np.array([params.b2]) if name == "b2" else getattr(params, name).copy()
    return central_difference(f, value)


@pytest.mark.parametrize("seed", range(5))
def test_mlp_gradient_check(seed):
    rng = np.random.default_rng(seed)
    data = Dataset(rng.normal(size=(10, 6)), rng.integers(0, 2, 10))
    params = MLPParams(rng.normal(size=(6, 4)), rng.normal(size=4), rng.normal(size=4),
                       float(rng.normal()))
    _, g = mlp_loss_and_grad(params, data)
    for name in ("W1", "b1", "W2", "b2"):
        analytic = np.array([g.b2]) if name == "b2" else getattr(g, name)
        assert relative_error(analytic, _mlp_numeric(params, data, name)) < 1e-4, name


def test_mlp_dead_unit_has_zero_gradient():
    rng = np.random.default_rng(1)
    X = np.abs(rng.normal(size=(8, 3)))
    params = MLPParams(rng.normal(size=(3, 2)), np.zeros(2), rng.normal(size=2), 0.0)
    params.W1[:, 1] = -1.0  # every pre-activation of unit 1 is negative
    _, g = mlp_loss_and_grad(params, Dataset(X, rng.integers(0, 2, 8)))
    np.testing.assert_array_equal(g.W1[:, 1], 0.0)
    assert g.b1[1] == 0.0


def test_mlp_xor():
    cfg = TrainConfig(hidden_size=8, learning_rate=0.5, epochs=2000, batch_size=4, seed=0)
    m = train_mlp(Dataset(XOR_X, XOR_Y), cfg)
    assert (m.predict(XOR_X) == XOR_Y).all()


def test_mlp_zero_learning_rate():
    init = MLPParams.zeros(2, 3)
    m = train_mlp(Dataset(XOR_X, XOR_Y), TrainConfig(learning_rate=0.0, epochs=3, hidden_size=3),
                  init=init)
    np.testing.assert_array_equal(m.params.W1, 0)
    np.testing.assert_array_equal(m.predict_proba(XOR_X), 0.5)


# shared contract

@pytest.mark.parametrize("kind", KINDS)
def test_contract(kind):
    X, y = two_blobs(3, n=60, dim=4)
    cfg = TrainConfig.for_kind(kind, seed=1, **({"n_trees": 5} if kind == "rforest" else {}))
    m = train(kind, Dataset(X, y), cfg)
    assert m.predict(np.zeros((0, 4))).tolist() == []
    with pytest.raises(ModelError):
        m.predict(np.zeros((2, 5)))
    preds = m.predict(X)
    assert len(preds) == len(X) and set(preds.tolist()) <= {0, 1}
    if m.has_proba:
        p = m.predict_proba(X)
        assert ((p >= 0) & (p <= 1)).all()
        if kind not in ("lda", "rforest"):
            np.testing.assert_array_equal(preds, (p >= 0.5).astype(int))
    again = train(kind, Dataset(X, y), cfg)
    np.testing.assert_array_equal(again.predict(X), preds)
    restored = loads_model(dumps_model(m))
    np.testing.assert_array_equal(restored.predict(X), preds)
    if m.has_proba:
        np.testing.assert_array_equal(restored.predict_proba(X), m.predict_proba(X))


def test_model_file_header():
    m = LogisticRegression(np.array([0.1, 1 / 3]), -2.5, 2)
    text = dumps_model(m)
    assert text.splitlines()[:3] == ["headtrend-model 1", "kind logreg", "feature_dim 2"]
    assert "0.33333333333333331" in text
    with pytest.raises(ModelError):
        loads_model("something else\n")


def test_unknown_hyperparameter():
    with pytest.raises(ModelError):
        TrainConfig.for_kind("logreg", momentum=0.9)
