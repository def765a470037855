"""Skip-gram word embeddings trained with negative sampling."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from numba import njit

from headtrend.vectorize import EmbeddingMatrix, VectorizeError, Vocabulary


@dataclass(frozen=True)
class SgnsParams:
    dimension: int = 50
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    learning_rate: float = 0.025
    min_learning_rate: float = 1e-4
    exponent: float = 0.75
    seed: int = 0

    def __post_init__(self):
        for name in ("dimension", "window", "negatives", "epochs"):
            if getattr(self, name) < 1:
                raise VectorizeError(f"{name} must be positive")
        if self.learning_rate < 0 or self.min_learning_rate < 0:
            raise VectorizeError("learning rates must be non-negative")
        if not 0.0 < self.exponent <= 1.0:
            raise VectorizeError("unigram smoothing exponent must lie in (0, 1]")


def _log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def _sigmoid(x):
    return np.exp(_log_sigmoid(x))


def sgns_loss_and_grad(center_vec, context_vec, negative_vecs):
    """Negative log-likelihood of one (center, context) pair against k negatives.

    loss = -log s(u_ctx . v) - sum_k log s(-u_k . v)

    Returns ``(loss, grad_center, grad_context, grad_negatives)`` where
    ``grad_negatives`` has one row per negative vector.
    """
    v = np.asarray(center_vec, dtype=float)
    u = np.asarray(context_vec, dtype=float)
    neg = np.atleast_2d(np.asarray(negative_vecs, dtype=float))
    pos_score = u @ v
    neg_scores = neg @ v
    loss = -_log_sigmoid(pos_score) - _log_sigmoid(-neg_scores).sum()
    g_pos = _sigmoid(pos_score) - 1.0
    g_neg = _sigmoid(neg_scores)
    grad_center = g_pos * u + g_neg @ neg
    grad_context = g_pos * v
    grad_negatives = g_neg[:, None] * v[None, :]
    return float(loss), grad_center, grad_context, grad_negatives


@njit(cache=True)
def _sigmoid_scalar(x):
    if x >= 0:
        return 1.0 / (1.0 + np.exp(-x))
    e = np.exp(x)
    return e / (1.0 + e)


@njit(cache=True)
def _sgd_pairs(w_in, w_out, centers, contexts, negs, lrs):
    """Sequential SGD over the pair stream; equals one gradient step of
    ``sgns_loss_and_grad`` per pair. Negatives equal to the context are skipped."""
    d = w_in.shape[1]
    grad_v = np.empty(d)
    for p in range(centers.shape[0]):
        c = centers[p]
        lr = lrs[p]
        for j in range(d):
            grad_v[j] = 0.0
        for s in range(negs.shape[1] + 1):
            if s == 0:
                o = contexts[p]
                label = 1.0
            else:
                o = negs[p, s - 1]
                if o == contexts[p]:
                    continue
                label = 0.0
            score = 0.0
            for j in range(d):
                score += w_in[c, j] * w_out[o, j]
            g = _sigmoid_scalar(score) - label
            for j in range(d):
                grad_v[j] += g * w_out[o, j]
                w_out[o, j] -= lr * g * w_in[c, j]
        for j in range(d):
            w_in[c, j] -= lr * grad_v[j]


def _encode(docs: Sequence[Sequence[str]], vocab: Vocabulary):
    ids, doc_ids = [], []
    for k, doc in enumerate(docs):
        row = [vocab.index[t] for t in doc if t in vocab.index]
        ids.extend(row)
        doc_ids.extend([k] * len(row))
    return np.asarray(ids, dtype=np.int64), np.asarray(doc_ids, dtype=np.int64)


def skipgram_pairs(doc_ids: np.ndarray, rng: np.random.Generator, window: int):
    """(center position, context position) pairs within a per-center window
    radius drawn uniformly from 1..window; windows never cross documents."""
    n = doc_ids.shape[0]
    radius = rng.integers(1, window + 1, size=n)
    centers, contexts = [], []
    pos = np.arange(n)
    for off in range(1, window + 1):
        for sign in (-1, 1):
            other = pos + sign * off
            ok = (other >= 0) & (other < n) & (radius >= off)
            c, o = pos[ok], other[ok]
            same_doc = doc_ids[c] == doc_ids[o]
            centers.append(c[same_doc])
            contexts.append(o[same_doc])
    centers = np.concatenate(centers)
    contexts = np.concatenate(contexts)
    order = np.lexsort((contexts, centers))
    return centers[order], contexts[order]


def noise_distribution(vocab: Vocabulary, exponent: float) -> np.ndarray:
    weights = np.asarray(vocab.corpus_count, dtype=float) ** exponent
    return weights / weights.sum()


def train_word2vec(
    train_docs: Sequence[Sequence[str]], vocab: Vocabulary, params: SgnsParams = SgnsParams()
) -> EmbeddingMatrix:
    """Skip-gram with negative sampling, deterministic for a given ``params.seed``.

    Learning rate decays linearly over all pairs of all epochs from
    ``learning_rate`` to ``min(min_learning_rate, learning_rate)``.
    """
    V, d, k = len(vocab), params.dimension, params.negatives
    if V < k + 1:
        raise VectorizeError(
            f"too few terms for negative sampling: {V} terms, {k} negatives per pair"
        )
    rng = np.random.default_rng(params.seed)
    w_in = rng.uniform(-0.5 / d, 0.5 / d, size=(V, d))
    w_out = np.zeros((V, d))
    ids, doc_ids = _encode(train_docs, vocab)
    cdf = np.cumsum(noise_distribution(vocab, params.exponent))
    cdf[-1] = 1.0

    epochs = []
    for _ in range(params.epochs):
        c_pos, o_pos = skipgram_pairs(doc_ids, rng, params.window)
        negs = np.searchsorted(cdf, rng.random((c_pos.shape[0], k)), side="right")
        epochs.append((ids[c_pos], ids[o_pos], np.minimum(negs, V - 1).astype(np.int64)))
    total = sum(e[0].shape[0] for e in epochs)
    end_lr = min(params.min_learning_rate, params.learning_rate)
    done = 0
    for centers, contexts, negs in epochs:
        m = centers.shape[0]
        progress = (done + np.arange(m)) / max(total, 1)
        lrs = params.learning_rate + (end_lr - params.learning_rate) * progress
        _sgd_pairs(w_in, w_out, centers, contexts, negs, lrs)
        done += m
    return EmbeddingMatrix(vocab, w_in, w_out)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(a @ b / (na * nb))
