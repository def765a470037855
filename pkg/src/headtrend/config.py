"""Run configuration: JSON loading, schema validation and default expansion."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from datetime import date
from importlib import resources
from pathlib import Path
from typing import Any, Union

import jsonschema

from headtrend.corpus import LabeledCorpus, load_corpus
from headtrend.eval import GridConfig, hyperparameter_dict
from headtrend.models import KINDS, TrainConfig
from headtrend.preprocess import (
    DEFAULT_GAZETTEER, DEFAULT_STOPWORDS, PreprocessConfig, load_wordlist,
)
from headtrend.vectorize import BASE_VECTORIZERS, FeatureConfig, NgramConfig, SentimentLexicon
from headtrend.word2vec import SgnsParams


class ConfigError(ValueError):
    pass


def _resource_json(name: str) -> dict:
    return json.loads((resources.files("headtrend.resources") / name).read_text(encoding="utf-8"))


SCHEMA = _resource_json("config.schema.json")
DEFAULTS = _resource_json("defaults.json")


def load_config(path: Union[str, Path]) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return raw


def _locator(path) -> str:
    out = "$"
    for part in path:
        out += f"[{part}]" if isinstance(part, int) else f".{part}"
    return out


def validate_config(raw: dict, base_dir: Union[str, Path] = ".") -> list[str]:
    """Every schema violation and cross-check failure as ``locator: message``."""
    problems = []
    validator = jsonschema.Draft202012Validator(SCHEMA)
    for err in sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path))):
        problems.append(f"{_locator(err.absolute_path)}: {err.message}")
    if problems:
        return problems

    base = Path(base_dir)
    files = [("data", "headlines"), ("data", "prices"), ("resources", "stopwords"),
             ("resources", "gazetteer"), ("resources", "lexicon")]
    for section, key in files:
        value = raw.get(section, {}).get(key)
        if value is not None and not (base / value).is_file():
            problems.append(f"$.{section}.{key}: file not found: {value}")
    names = [e if isinstance(e, str) else e["name"] for e in raw.get("embeddings", [])]
    seen = set()
    for i, n in enumerate(names):
        if n in seen:
            problems.append(f"$.embeddings[{i}]: duplicate embedding name {n!r}")
        seen.add(n)
    for i, e in enumerate(raw.get("embeddings", [])):
        if isinstance(e, dict) and "base" not in e and e["name"] not in BASE_VECTORIZERS:
            problems.append(f"$.embeddings[{i}].base: required when name is not a base vectorizer")
    split = raw.get("split", {})
    if split.get("type") == "chronological" and "boundary" in split and "fraction" in split:
        problems.append("$.split: give either boundary or fraction, not both")
    if "boundary" in split:
        try:
            date.fromisoformat(split["boundary"])
        except ValueError:
            problems.append(f"$.split.boundary: not a calendar date: {split['boundary']!r}")
    return problems


def _abs(base: Path, value: str | None) -> str | None:
    return None if value is None else str((base / value).resolve())


def resolve_config(raw: dict, base_dir: Union[str, Path] = ".") -> dict:
    """Materialize every default so the result fully determines a run."""
    problems = validate_config(raw, base_dir)
    if problems:
        raise ConfigError("; ".join(problems))
    base = Path(base_dir)
    raw = copy.deepcopy(raw)
    data = raw["data"]
    res = raw.get("resources", {})
    vocab = {**DEFAULTS["vocabulary"], **raw.get("vocabulary", {})}

    embeddings = []
    for e in raw.get("embeddings", list(BASE_VECTORIZERS)):
        e = {"name": e} if isinstance(e, str) else dict(e)
        embeddings.append({
            "name": e["name"],
            "base": e.get("base", e["name"]),
            "ngram": e.get("ngram", 1),
            "combine_with_unigrams": e.get("combine_with_unigrams", False),
            "sentiment": e.get("sentiment", False),
            "min_df": e.get("min_df", vocab["min_df"]),
            "max_size": e.get("max_size", vocab["max_size"]),
        })
    models = list(raw.get("models", KINDS))
    overrides = raw.get("hyperparameters", {})
    hyper = {
        kind: hyperparameter_dict(kind, TrainConfig.for_kind(kind, **overrides.get(kind, {})))
        for kind in models
    }
    split = raw.get("split", {"type": "chronological", "fraction": 0.8})
    if split["type"] == "walk_forward":
        split = {"type": "walk_forward", **DEFAULTS["walk_forward"], **split}
    elif "boundary" not in split:
        split = {"type": "chronological", "fraction": split.get("fraction", 0.8)}

    return {
        "seed": raw["seed"],
        "data": {
            "headlines": _abs(base, data["headlines"]),
            "prices": _abs(base, data.get("prices")),
            "price_column": data.get("price_column", "Close"),
        },
        "resources": {k: _abs(base, res.get(k)) for k in ("stopwords", "gazetteer", "lexicon")},
        "preprocess": {**DEFAULTS["preprocess"], **raw.get("preprocess", {})},
        "vocabulary": vocab,
        "word2vec": {**DEFAULTS["word2vec"], **raw.get("word2vec", {})},
        "embeddings": embeddings,
        "models": models,
        "hyperparameters": hyper,
        "split": split,
        "output_dir": _abs(base, raw.get("output_dir", "headtrend-out")),
    }


@dataclass(frozen=True)
class RunConfig:
    resolved: dict[str, Any]

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "RunConfig":
        path = Path(path)
        return cls(resolve_config(load_config(path), path.parent))

    @property
    def seed(self) -> int:
        return self.resolved["seed"]

    @property
    def split(self) -> dict[str, Any]:
        return self.resolved["split"]

    @property
    def output_dir(self) -> Path:
        return Path(self.resolved["output_dir"])

    def to_json(self) -> str:
        return json.dumps(self.resolved, indent=2, sort_keys=True) + "\n"

    def preprocess_config(self) -> PreprocessConfig:
        p = self.resolved["preprocess"]
        r = self.resolved["resources"]
        return PreprocessConfig(
            remove_stopwords=p["remove_stopwords"],
            stopword_list=load_wordlist(r["stopwords"]) if r["stopwords"] else DEFAULT_STOPWORDS,
            ner_mode=p["ner_mode"],
            gazetteer=load_wordlist(r["gazetteer"]) if r["gazetteer"] else DEFAULT_GAZETTEER,
            lowercase=p["lowercase"],
        )

    def grid(self) -> GridConfig:
        cfg = self.resolved
        embeddings = tuple(
            (e["name"], FeatureConfig(base=e["base"],
                                      ngram=NgramConfig(e["ngram"], e["combine_with_unigrams"]),
                                      sentiment=e["sentiment"], min_df=e["min_df"],
                                      max_size=e["max_size"]))
            for e in cfg["embeddings"]
        )
        lex_path = cfg["resources"]["lexicon"]
        return GridConfig(
            embeddings=embeddings,
            models=tuple(cfg["models"]),
            seed=cfg["seed"],
            hyperparameters={k: TrainConfig(**v) for k, v in cfg["hyperparameters"].items()},
            preprocess=self.preprocess_config(),
            sgns=SgnsParams(**cfg["word2vec"]),
            lexicon=SentimentLexicon.from_csv(lex_path) if lex_path else None,
            split=cfg["split"],
        )

    def corpus(self) -> LabeledCorpus:
        d = self.resolved["data"]
        return load_corpus(d["headlines"], d["prices"], adjusted=d["price_column"] == "Adj Close")
