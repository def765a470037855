"""Headline cleaning: byte-string artifacts, tokenization, stop words, entities."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Sequence, Union

if TYPE_CHECKING:
    from headtrend.corpus import HeadlineRecord

_ALNUM = re.compile(r"[A-Za-z0-9]+")
_ESCAPE = re.compile(r"\\([\\'\"])")


def load_wordlist(path: Union[str, Path]) -> frozenset[str]:
    """One word per line; blank lines and ``#`` comments skipped."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if line:
                words.add(line.lower())
    return frozenset(words)


def _resource_wordlist(name: str) -> frozenset[str]:
    with resources.as_file(resources.files("headtrend.resources") / name) as p:
        return load_wordlist(p)


DEFAULT_STOPWORDS = _resource_wordlist("stopwords.txt")
DEFAULT_GAZETTEER = _resource_wordlist("gazetteer.txt")


class NerMode(str, Enum):
    OFF = "off"
    REMOVE = "remove"
    KEEP_ONLY = "keep_only"


@dataclass(frozen=True)
class PreprocessConfig:
    remove_stopwords: bool = True
    stopword_list: frozenset[str] = DEFAULT_STOPWORDS
    ner_mode: NerMode = NerMode.OFF
    gazetteer: frozenset[str] = DEFAULT_GAZETTEER
    lowercase: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ner_mode", NerMode(self.ner_mode))
        for name in ("stopword_list", "gazetteer"):
            words = getattr(self, name)
            if any(w != w.lower() for w in words):
                raise ValueError(f"{name} entries must be lowercase")
            object.__setattr__(self, name, frozenset(words))


def strip_bytestring_artifacts(text: str) -> str:
    """Undo the ``b'...'`` / ``b"..."`` wrapping left by serialized byte strings."""
    if len(text) >= 3 and text[0] == "b" and text[1] in "'\"" and text[-1] == text[1]:
        return _ESCAPE.sub(r"\1", text[2:-1])
    return text


def _split(text: str, lowercase: bool) -> list[tuple[str, str]]:
    return [(m, m.lower() if lowercase else m) for m in _ALNUM.findall(text)]


def tokenize(text: str, config: PreprocessConfig | None = None) -> list[str]:
    """Split on every run of non-alphanumeric characters."""
    lowercase = True if config is None else config.lowercase
    return [tok for _, tok in _split(text, lowercase)]


def remove_stopwords(tokens: Sequence[str], stopword_list: Iterable[str]) -> list[str]:
    stop = stopword_list if isinstance(stopword_list, (set, frozenset)) else set(stopword_list)
    return [t for t in tokens if t not in stop]


def is_entity(original: str, position: int, gazetteer: frozenset[str]) -> bool:
    # sentence-initial capitals are ignored so every headline's first word isn't flagged
    return original.lower() in gazetteer or (position > 0 and original[:1].isupper())


def filter_named_entities(
    tokens_with_case: Sequence[tuple[str, str]], config: PreprocessConfig
) -> list[str]:
    """Drop (``remove``) or retain only (``keep_only``) named-entity tokens.

    ``tokens_with_case`` pairs each token with its original spelling, in
    headline order, so position 0 is the sentence-initial word.
    """
    if config.ner_mode is NerMode.OFF:
        raise ValueError("filter_named_entities called with ner_mode=off")
    keep_entities = config.ner_mode is NerMode.KEEP_ONLY
    return [
        tok
        for pos, (orig, tok) in enumerate(tokens_with_case)
        if is_entity(orig, pos, config.gazetteer) == keep_entities
    ]


def preprocess_headline(text: str, config: PreprocessConfig) -> list[str]:
    pairs = _split(strip_bytestring_artifacts(text), config.lowercase)
    if config.ner_mode is NerMode.OFF:
        tokens = [tok for _, tok in pairs]
    else:
        tokens = filter_named_entities(pairs, config)
    if config.remove_stopwords:
        tokens = remove_stopwords(tokens, config.stopword_list)
    return tokens


def preprocess_day(record: "HeadlineRecord", config: PreprocessConfig) -> list[str]:
    """All 25 headlines of a day as a single token stream, in headline order."""
    out: list[str] = []
    for text in record.headlines:
        out.extend(preprocess_headline(text, config))
    return out
