"""Vocabularies and day-level feature vectors.

Every vectorizer maps a token list to a dense float vector of fixed length.
Vocabulary statistics (document frequencies, corpus counts) are computed
from training documents only; test documents are only ever looked up.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping, Sequence, Union

import numpy as np

MAX_NGRAM = 5
BASE_VECTORIZERS = ("bow", "tfidf_paper", "tfidf_standard", "w2v_sum", "w2v_mean")


class VectorizeError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]
    corpus_count: tuple[int, ...]
    n_docs: int
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if len(set(self.terms)) != len(self.terms):
            raise VectorizeError("duplicate vocabulary terms")
        if not len(self.terms) == len(self.doc_freq) == len(self.corpus_count):
            raise VectorizeError("vocabulary field lengths differ")
        for t, df, cc in zip(self.terms, self.doc_freq, self.corpus_count):
            if df < 1 or cc < df:
                raise VectorizeError(f"inconsistent counts for {t!r}: df={df}, count={cc}")
        object.__setattr__(self, "index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.index


def build_vocabulary(
    train_docs: Sequence[Sequence[str]], min_df: int = 1, max_size: int | None = None
) -> Vocabulary:
    """Terms with ``doc_freq >= min_df`` ordered by descending corpus count
    (ties lexicographic), truncated to ``max_size``."""
    if not train_docs:
        raise VectorizeError("cannot build a vocabulary from zero documents")
    counts: Counter[str] = Counter()
    dfs: Counter[str] = Counter()
    for doc in train_docs:
        counts.update(doc)
        dfs.update(set(doc))
    kept = sorted((t for t in counts if dfs[t] >= min_df), key=lambda t: (-counts[t], t))
    if max_size is not None:
        kept = kept[:max_size]
    if not kept:
        raise VectorizeError(f"empty vocabulary after pruning (min_df={min_df})")
    return Vocabulary(
        tuple(kept), tuple(dfs[t] for t in kept), tuple(counts[t] for t in kept), len(train_docs)
    )


@dataclass(frozen=True)
class NgramConfig:
    n: int = 1
    combine_with_unigrams: bool = False

    def __post_init__(self):
        if not 1 <= self.n <= MAX_NGRAM:
            raise VectorizeError(f"n-gram order must be in 1..{MAX_NGRAM}, got {self.n}")


def extract_ngrams(tokens: Sequence[str], config: NgramConfig) -> list[str]:
    """Contiguous n-grams joined with ``_``, optionally preceded by the unigrams."""
    n = config.n
    if n == 1:
        return list(tokens)
    grams = ["_".join(tokens[i:i + n]) for i in range(len(tokens) - n + 1)]
    return list(tokens) + grams if config.combine_with_unigrams else grams


def bow_vector(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    vec = np.zeros(len(vocab))
    index = vocab.index
    for tok in tokens:
        i = index.get(tok)
        if i is not None:
            vec[i] += 1
    return vec


def tfidf_paper_vector(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Day count of each term over its total training-corpus count, clamped to 1.

    Test days can mention a term more often than the whole training corpus
    did, hence the clamp.
    """
    counts = bow_vector(tokens, vocab)
    return np.minimum(counts / np.asarray(vocab.corpus_count, dtype=float), 1.0)


def tfidf_standard_vector(tokens: Sequence[str], vocab: Vocabulary) -> np.ndarray:
    """Smoothed TF-IDF, ``tf * (ln((1+N)/(1+df)) + 1)``, L2-normalized."""
    tf = bow_vector(tokens, vocab)
    df = np.asarray(vocab.doc_freq, dtype=float)
    vec = tf * (np.log((1.0 + vocab.n_docs) / (1.0 + df)) + 1.0)
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


@dataclass(frozen=True)
class EmbeddingMatrix:
    vocab: Vocabulary
    input_vectors: np.ndarray
    output_vectors: np.ndarray

    def __post_init__(self):
        if self.input_vectors.shape != self.output_vectors.shape:
            raise VectorizeError("input/output embedding shapes differ")
        if self.input_vectors.shape[0] != len(self.vocab):
            raise VectorizeError("embedding rows must match vocabulary size")
        if not (np.isfinite(self.input_vectors).all() and np.isfinite(self.output_vectors).all()):
            raise VectorizeError("non-finite embedding entries")

    @property
    def dimension(self) -> int:
        return self.input_vectors.shape[1]

    def vector(self, term: str) -> np.ndarray:
        return self.input_vectors[self.vocab.index[term]]

    def save_text(self, path: Union[str, Path]) -> None:
        """``term v1 ... vd`` per line, 6 significant digits."""
        with open(path, "w", encoding="utf-8") as fh:
            for term, row in zip(self.vocab.terms, self.input_vectors):
                fh.write(term + " " + " ".join(f"{v:.6g}" for v in row) + "\n")


def aggregate_embeddings(tokens: Sequence[str], emb: EmbeddingMatrix, mode: str = "sum") -> np.ndarray:
    if mode not in ("sum", "mean"):
        raise VectorizeError(f"unknown aggregation {mode!r}")
    rows = [emb.vocab.index[t] for t in tokens if t in emb.vocab.index]
    if not rows:
        return np.zeros(emb.dimension)
    total = emb.input_vectors[rows].sum(axis=0)
    return total / len(rows) if mode == "mean" else total


@dataclass(frozen=True)
class SentimentLexicon:
    entries: Mapping[str, tuple[float, float]]

    def __post_init__(self):
        for word, (pol, subj) in self.entries.items():
            if word != word.lower():
                raise VectorizeError(f"lexicon key {word!r} is not lowercase")
            if not (-1.0 <= pol <= 1.0 and 0.0 <= subj <= 1.0):
                raise VectorizeError(f"lexicon values out of range for {word!r}")

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "SentimentLexicon":
        entries = {}
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"word", "polarity", "subjectivity"} <= set(
                reader.fieldnames
            ):
                raise VectorizeError(f"{path}: header must be word,polarity,subjectivity")
            for row in reader:
                entries[row["word"].strip()] = (float(row["polarity"]), float(row["subjectivity"]))
        return cls(entries)

    @classmethod
    def default(cls) -> "SentimentLexicon":
        with resources.as_file(resources.files("headtrend.resources") / "lexicon.csv") as p:
            return cls.from_csv(p)


def sentiment_features(tokens: Sequence[str], lexicon: SentimentLexicon) -> np.ndarray:
    """[mean polarity, mean subjectivity] over lexicon hits; [0, 0] without hits."""
    hits = [lexicon.entries[t] for t in tokens if t in lexicon.entries]
    if not hits:
        return np.zeros(2)
    return np.asarray(hits, dtype=float).mean(axis=0)


@dataclass(frozen=True)
class FeatureConfig:
    """One embedding cell of an experiment grid."""

    base: str = "bow"
    ngram: NgramConfig = NgramConfig()
    sentiment: bool = False
    min_df: int = 1
    max_size: int | None = None

    def __post_init__(self):
        if self.base not in BASE_VECTORIZERS:
            raise VectorizeError(f"unknown base vectorizer {self.base!r}")


class FeaturePipeline:
    """Fits vocabulary/embeddings on training token streams, then vectorizes days."""

    def __init__(self, config: FeatureConfig, sgns_params=None, lexicon: SentimentLexicon | None = None):
        self.config = config
        self.sgns_params = sgns_params
        self.lexicon = lexicon
        self.vocab: Vocabulary | None = None
        self.embedding: EmbeddingMatrix | None = None
        self.dim: int | None = None
        if config.sentiment and lexicon is None:
            self.lexicon = SentimentLexicon.default()

    def _grams(self, tokens):
        return extract_ngrams(tokens, self.config.ngram)

    def fit(self, train_days: Sequence[Sequence[str]]) -> "FeaturePipeline":
        from headtrend.word2vec import SgnsParams, train_word2vec

        docs = [self._grams(t) for t in train_days]
        self.vocab = build_vocabulary(docs, self.config.min_df, self.config.max_size)
        if self.config.base.startswith("w2v"):
            self.embedding = train_word2vec(docs, self.vocab, self.sgns_params or SgnsParams())
        self.dim = None
        return self

    def base_vector(self, tokens: Sequence[str]) -> np.ndarray:
        if self.vocab is None:
            raise VectorizeError("pipeline not fitted")
        grams = self._grams(tokens)
        base = self.config.base
        if base == "bow":
            return bow_vector(grams, self.vocab)
        if base == "tfidf_paper":
            return tfidf_paper_vector(grams, self.vocab)
        if base == "tfidf_standard":
            return tfidf_standard_vector(grams, self.vocab)
        return aggregate_embeddings(grams, self.embedding, "sum" if base == "w2v_sum" else "mean")

    def transform(self, days: Sequence[Sequence[str]]) -> np.ndarray:
        if not days:
            return np.zeros((0, self.dim or 0))
        return np.vstack([assemble_features(t, self) for t in days])


def assemble_features(day_tokens: Sequence[str], pipeline: FeaturePipeline) -> np.ndarray:
    """Base vector, followed by [polarity, subjectivity] when the sentiment channel is on."""
    vec = pipeline.base_vector(day_tokens)
    if pipeline.config.sentiment:
        vec = np.concatenate([vec, sentiment_features(day_tokens, pipeline.lexicon)])
    if pipeline.dim is None:
        pipeline.dim = vec.shape[0]
    elif vec.shape[0] != pipeline.dim:
        raise VectorizeError(f"feature dimension changed from {pipeline.dim} to {vec.shape[0]}")
    return vec
