"""Scoring, (embedding x model) experiment grids and walk-forward backtests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
import zlib
from dataclasses import asdict, dataclass, field, replace
from datetime import date
from typing import Any, Sequence

import numpy as np

from headtrend.corpus import LabeledCorpus, WindowSplit, chronological_split, sliding_windows
from headtrend.models import DISPLAY_NAMES, HYPERPARAMETERS, KINDS, Dataset, TrainConfig, train
from headtrend.preprocess import PreprocessConfig, preprocess_day
from headtrend.vectorize import FeatureConfig, FeaturePipeline, SentimentLexicon
from headtrend.word2vec import SgnsParams

logger = logging.getLogger(__name__)

CSV_COLUMNS = ["embedding", "model", "accuracy", "tp", "fp", "tn", "fn", "n_test", "baseline",
               "config_digest"]
BASELINE_NAME = "majority_baseline"


class EvalError(ValueError):
    pass


def _check_pair(preds, labels):
    preds = np.asarray(preds, dtype=int).ravel()
    labels = np.asarray(labels, dtype=int).ravel()
    if preds.size == 0 or labels.size == 0:
        raise EvalError("predictions and labels must be non-empty")
    if preds.size != labels.size:
        raise EvalError(f"length mismatch: {preds.size} predictions, {labels.size} labels")
    if not (np.isin(preds, (0, 1)).all() and np.isin(labels, (0, 1)).all()):
        raise EvalError("predictions and labels must be 0 or 1")
    return preds, labels


def accuracy(preds, labels) -> float:
    preds, labels = _check_pair(preds, labels)
    return float(np.mean(preds == labels))


def confusion_matrix(preds, labels) -> tuple[int, int, int, int]:
    """``(tp, fp, tn, fn)`` with class 1 as the positive class."""
    p, y = _check_pair(preds, labels)
    tp = int(np.sum((p == 1) & (y == 1)))
    fp = int(np.sum((p == 1) & (y == 0)))
    tn = int(np.sum((p == 0) & (y == 0)))
    fn = int(np.sum((p == 0) & (y == 1)))
    return tp, fp, tn, fn


def majority_class(train_labels) -> int:
    y = np.asarray(train_labels, dtype=int)
    if y.size == 0:
        raise EvalError("empty training labels")
    return int(2 * y.sum() >= y.size)


def majority_baseline(train_labels, test_labels) -> float:
    """Test accuracy of always predicting the training majority (ties predict 1)."""
    test = np.asarray(test_labels, dtype=int)
    if test.size == 0:
        raise EvalError("empty test labels")
    return accuracy(np.full(test.size, majority_class(train_labels)), test)


@dataclass(frozen=True)
class EvalResult:
    accuracy: float
    tp: int
    fp: int
    tn: int
    fn: int
    n_test: int
    majority_baseline_accuracy: float

    @classmethod
    def from_counts(cls, tp, fp, tn, fn, baseline: float) -> "EvalResult":
        n = tp + fp + tn + fn
        if n == 0:
            raise EvalError("no test predictions")
        return cls((tp + tn) / n, tp, fp, tn, fn, n, baseline)

    @classmethod
    def from_predictions(cls, preds, labels, baseline: float) -> "EvalResult":
        return cls.from_counts(*confusion_matrix(preds, labels), baseline)

    @property
    def correct(self) -> int:
        return self.tp + self.tn


@dataclass(frozen=True)
class ReportRow:
    embedding: str
    model: str
    config_digest: str
    result: EvalResult | None = None
    error: str | None = None
    predictions: tuple[int, ...] = field(default=(), compare=False, repr=False)

    @property
    def ok(self) -> bool:
        return self.result is not None


@dataclass(frozen=True)
class GridConfig:
    """Everything one experiment needs besides the data."""

    embeddings: tuple[tuple[str, FeatureConfig], ...]
    models: tuple[str, ...]
    seed: int
    hyperparameters: dict[str, TrainConfig] = field(default_factory=dict)
    preprocess: PreprocessConfig = PreprocessConfig()
    sgns: SgnsParams = SgnsParams()
    lexicon: SentimentLexicon | None = field(default=None, compare=False)
    split: dict[str, Any] = field(default_factory=lambda: {"type": "chronological",
                                                            "fraction": 0.8})

    def __post_init__(self):
        if not self.embeddings or not self.models:
            raise EvalError("grid needs at least one embedding and one model")
        names = [n for n, _ in self.embeddings]
        if len(set(names)) != len(names):
            raise EvalError("embedding names must be unique")
        unknown = set(self.models) - set(KINDS)
        if unknown:
            raise EvalError(f"unknown models: {sorted(unknown)}")
        hp = {k: self.hyperparameters.get(k) or TrainConfig.for_kind(k) for k in self.models}
        object.__setattr__(self, "hyperparameters", hp)

    def train_config(self, kind: str, embedding: str) -> TrainConfig:
        return self.hyperparameters[kind].with_seed(derive_seed(self.seed, embedding, kind))

    def sgns_for(self, embedding: str) -> SgnsParams:
        return replace(self.sgns, seed=derive_seed(self.seed, embedding, "word2vec"))

    def digest(self, embedding: str, kind: str) -> str:
        cfg = dict(self.embeddings)[embedding]
        payload = {
            "seed": self.seed,
            "split": self.split,
            "preprocess": _preprocess_description(self.preprocess),
            "embedding": {"name": embedding, **asdict(cfg)},
            "word2vec": asdict(self.sgns) if cfg.base.startswith("w2v") else None,
            "model": kind,
            "hyperparameters": hyperparameter_dict(kind, self.hyperparameters[kind]),
            "lexicon": _lexicon_digest(self.lexicon) if cfg.sentiment else None,
        }
        blob = json.dumps(payload, sort_keys=True, default=str).encode()
        return hashlib.sha256(blob).hexdigest()[:12]


def derive_seed(master: int, *names: str) -> int:
    """Stable per-cell seed from the master seed and cell names."""
    keys = [zlib.crc32(n.encode()) for n in names]
    return int(np.random.SeedSequence([master, *keys]).generate_state(1)[0])


def hyperparameter_dict(kind: str, cfg: TrainConfig) -> dict:
    return {name: getattr(cfg, name) for name in HYPERPARAMETERS[kind]}


def _preprocess_description(cfg: PreprocessConfig) -> dict:
    words = lambda s: hashlib.sha256("\n".join(sorted(s)).encode()).hexdigest()[:12]  # noqa: E731
    return {"remove_stopwords": cfg.remove_stopwords, "stopwords": words(cfg.stopword_list),
            "ner_mode": cfg.ner_mode.value, "gazetteer": words(cfg.gazetteer),
            "lowercase": cfg.lowercase}


def _lexicon_digest(lex: SentimentLexicon | None) -> str:
    if lex is None:
        return "default"
    body = "\n".join(f"{w},{p!r},{s!r}" for w, (p, s) in sorted(lex.entries.items()))
    return hashlib.sha256(body.encode()).hexdigest()[:12]


def _period(corpus: LabeledCorpus) -> str:
    return f"{corpus.days[0].date}..{corpus.days[-1].date} ({len(corpus)} days)"


@dataclass(frozen=True)
class ExperimentReport:
    rows: tuple[ReportRow, ...]
    baseline: ReportRow
    split_description: str
    seed: int
    hyperparameters: dict[str, TrainConfig]
    notes: tuple[str, ...] = ()
    window_accuracies: tuple[tuple[str, str, tuple[float | None, ...]], ...] = ()

    def row(self, embedding: str, model: str) -> ReportRow:
        for r in (self.baseline, *self.rows):
            if r.embedding == embedding and r.model == model:
                return r
        raise KeyError((embedding, model))

    def to_text(self, timestamp: str | None = None) -> str:
        out = []
        if timestamp is not None:
            out.append(f"# generated {timestamp}")
        out.append("Per algorithm validation accuracy")
        out.append(f"split: {self.split_description}")
        out.append(f"seed: {self.seed}")
        out.extend(f"note: {n}" for n in self.notes)
        out.append("")
        ew = max([len("Embedding")] + [len(r.embedding) for r in self.rows]) + 2
        header = (f"{'Embedding':<{ew}}{'Algorithm':<30} {'Accuracy':>8} {'TP':>5} {'FP':>5} "
                  f"{'TN':>5} {'FN':>5} {'N':>5}  Digest")
        out.append(header)
        out.append("-" * len(header))
        for r in (self.baseline, *self.rows):
            name = "Majority baseline" if r.model == BASELINE_NAME else DISPLAY_NAMES.get(r.model, r.model)
            if r.ok:
                res = r.result
                out.append(f"{r.embedding:<{ew}}{name:<30} {res.accuracy:>8.4f} {res.tp:>5} "
                           f"{res.fp:>5} {res.tn:>5} {res.fn:>5} {res.n_test:>5}  {r.config_digest}")
            else:
                out.append(f"{r.embedding:<{ew}}{name:<30} {'ERROR':>8}  {r.error}")
        if self.window_accuracies:
            n_win = len(self.window_accuracies[0][2])
            out.append("")
            out.append("per-window accuracy:")
            out.append(f"{'Embedding':<{ew}}{'Model':<18}"
                       + " ".join(f"{'w' + str(i + 1):>7}" for i in range(n_win)))
            for emb, model, accs in self.window_accuracies:
                cells = " ".join(f"{'ERROR' if a is None else format(a, '.4f'):>7}" for a in accs)
                out.append(f"{emb:<{ew}}{model:<18}{cells}")
        out.append("")
        out.append("hyperparameters:")
        for kind in sorted(self.hyperparameters):
            hp = hyperparameter_dict(kind, self.hyperparameters[kind])
            out.append(f"  {kind}: " + (" ".join(f"{k}={v}" for k, v in sorted(hp.items()))
                                        or "(none)"))
        return "\n".join(out) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in (self.baseline, *self.rows):
            if r.ok:
                res = r.result
                w.writerow([r.embedding, r.model, f"{res.accuracy:.6f}", res.tp, res.fp, res.tn,
                            res.fn, res.n_test, f"{res.majority_baseline_accuracy:.6f}",
                            r.config_digest])
            else:
                w.writerow([r.embedding, r.model, "ERROR", "", "", "", "", "", "",
                            r.config_digest])
        return buf.getvalue()


def tokenize_corpus(corpus: LabeledCorpus, cfg: PreprocessConfig) -> list[list[str]]:
    return [preprocess_day(day, cfg) for day in corpus.days]


def fit_pipeline(grid: GridConfig, embedding: str, train_tokens) -> FeaturePipeline:
    cfg = dict(grid.embeddings)[embedding]
    return FeaturePipeline(cfg, grid.sgns_for(embedding), grid.lexicon).fit(train_tokens)


def evaluate_split(
    train_tokens: Sequence[Sequence[str]],
    train_labels: Sequence[int],
    test_tokens: Sequence[Sequence[str]],
    test_labels: Sequence[int],
    grid: GridConfig,
    split_description: str,
    notes: Sequence[str] = (),
) -> ExperimentReport:
    """Fit every grid cell on the training side only and score it on the test side."""
    y_train = np.asarray(train_labels, dtype=int)
    y_test = np.asarray(test_labels, dtype=int)
    base_class = majority_class(y_train)
    base_preds = np.full(y_test.size, base_class)
    base_acc = accuracy(base_preds, y_test)
    baseline = ReportRow("-", BASELINE_NAME, "-",
                         EvalResult.from_predictions(base_preds, y_test, base_acc),
                         predictions=tuple(int(p) for p in base_preds))
    rows = []
    for emb_name, _ in sorted(grid.embeddings):
        try:
            pipe = fit_pipeline(grid, emb_name, train_tokens)
            X_train = pipe.transform(train_tokens)
            X_test = pipe.transform(test_tokens)
            emb_error = None
        except Exception as exc:  # a failing embedding must not abort the grid
            logger.warning("embedding %s failed: %s", emb_name, exc)
            emb_error = f"{type(exc).__name__}: {exc}"
        for kind in sorted(grid.models):
            digest = grid.digest(emb_name, kind)
            if emb_error is not None:
                rows.append(ReportRow(emb_name, kind, digest, error=emb_error))
                continue
            try:
                model = train(kind, Dataset(X_train, y_train), grid.train_config(kind, emb_name))
                preds = model.predict(X_test)
                result = EvalResult.from_predictions(preds, y_test, base_acc)
                rows.append(ReportRow(emb_name, kind, digest, result,
                                      predictions=tuple(int(p) for p in preds)))
            except Exception as exc:
                logger.warning("cell %s/%s failed: %s", emb_name, kind, exc)
                rows.append(ReportRow(emb_name, kind, digest, error=f"{type(exc).__name__}: {exc}"))
    return ExperimentReport(tuple(rows), baseline, split_description, grid.seed,
                            dict(grid.hyperparameters), tuple(notes))


def resolve_chronological(corpus: LabeledCorpus, split: dict[str, Any]):
    if "boundary" in split and split["boundary"] is not None:
        boundary = split["boundary"]
        if isinstance(boundary, str):
            boundary = date.fromisoformat(boundary)
        return chronological_split(corpus, boundary)
    return chronological_split(corpus, float(split.get("fraction", 0.8)))


def run_experiment(corpus: LabeledCorpus, grid: GridConfig) -> ExperimentReport:
    """Chronological train/test experiment over every (embedding, model) cell."""
    train_c, test_c = resolve_chronological(corpus, grid.split)
    tokens = tokenize_corpus(corpus, grid.preprocess)
    n = len(train_c)
    desc = f"chronological, train {_period(train_c)}, test {_period(test_c)}"
    return evaluate_split(tokens[:n], train_c.labels, tokens[n:], test_c.labels, grid, desc)


@dataclass(frozen=True)
class BacktestResult:
    windows: tuple[WindowSplit, ...]
    reports: tuple[ExperimentReport, ...]
    aggregate: ExperimentReport


def _pool(rows: Sequence[ReportRow], baseline_acc: float) -> ReportRow:
    first = rows[0]
    failed = [i + 1 for i, r in enumerate(rows) if not r.ok]
    if failed:
        return ReportRow(first.embedding, first.model, first.config_digest,
                         error=f"failed in window(s) {', '.join(map(str, failed))}")
    counts = np.sum([[r.result.tp, r.result.fp, r.result.tn, r.result.fn] for r in rows], axis=0)
    preds = tuple(p for r in rows for p in r.predictions)
    return ReportRow(first.embedding, first.model, first.config_digest,
                     EvalResult.from_counts(*map(int, counts), baseline_acc), predictions=preds)


def walk_forward_backtest(
    corpus: LabeledCorpus,
    grid: GridConfig,
    train_months: int = 9,
    test_months: int = 3,
    step_months: int = 3,
) -> BacktestResult:
    """Run the grid on every sliding window and pool test days across windows.

    Aggregate accuracy is total correct over total test days. Windows whose
    test span is under two months are flagged but still evaluated.
    """
    windows = sliding_windows(corpus, train_months, test_months, step_months)
    tokens = tokenize_corpus(corpus, grid.preprocess)
    labels = np.asarray(corpus.labels)
    reports = []
    short = []
    for i, w in enumerate(windows, start=1):
        notes = []
        if w.short_test:
            notes.append("test span shorter than 2 months; few data points")
            short.append(i)
        desc = (f"walk-forward window {i}/{len(windows)}, train {w.train_start}..{w.train_end} "
                f"({len(w.train_days)} days), test {w.test_start}..{w.test_end} "
                f"({len(w.test_days)} days)")
        reports.append(evaluate_split(
            [tokens[j] for j in w.train_days], labels[list(w.train_days)],
            [tokens[j] for j in w.test_days], labels[list(w.test_days)], grid, desc, notes))

    base = _pool([r.baseline for r in reports], 0.0)
    base_acc = base.result.accuracy
    base = replace(base, result=replace(base.result, majority_baseline_accuracy=base_acc))
    rows = tuple(
        _pool([rep.rows[k] for rep in reports], base_acc) for k in range(len(reports[0].rows))
    )
    notes = [f"pooled over {len(windows)} windows ({train_months}+{test_months} months, "
             f"step {step_months})"]
    if short:
        notes.append(f"short test span (<2 months) in window(s) {', '.join(map(str, short))}")
    desc = (f"walk-forward aggregate, {len(windows)} windows, test "
            f"{windows[0].test_start}..{windows[-1].test_end} "
            f"({sum(len(w.test_days) for w in windows)} days)")
    per_window = tuple(
        (r.embedding, r.model,
         tuple(rep.row(r.embedding, r.model).result.accuracy
               if rep.row(r.embedding, r.model).ok else None for rep in reports))
        for r in (reports[0].baseline, *reports[0].rows)
    )
    aggregate = ExperimentReport(rows, base, desc, grid.seed, dict(grid.hyperparameters),
                                 tuple(notes), per_window)
    return BacktestResult(tuple(windows), tuple(reports), aggregate)
