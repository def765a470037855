"""Plain-text model files.

Layout::

    headtrend-model 1
    kind <kind>
    feature_dim <D>
    array <name> <length>
    <values, 17 significant digits, space separated>
    ...
"""

from __future__ import annotations

from pathlib import Path
from typing import Union

import numpy as np

from headtrend.models.base import Model, ModelError

FORMAT_VERSION = 1
MAGIC = "headtrend-model"


def dumps_model(model: Model) -> str:
    lines = [f"{MAGIC} {FORMAT_VERSION}", f"kind {model.kind}", f"feature_dim {model.feature_dim}"]
    for name, arr in model.state().items():
        arr = np.asarray(arr, dtype=float).ravel()
        lines.append(f"array {name} {arr.size}")
        lines.append(" ".join(f"{v:.17g}" for v in arr))
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> Model:
    from headtrend.models import MODEL_CLASSES

    lines = text.splitlines()
    head = lines[0].split() if lines else []
    if len(head) != 2 or head[0] != MAGIC:
        raise ModelError("not a headtrend model file")
    if int(head[1]) != FORMAT_VERSION:
        raise ModelError(f"unsupported model format version {head[1]}")
    kind = lines[1].split()[1]
    dim = int(lines[2].split()[1])
    state = {}
    i = 3
    while i < len(lines):
        _, name, size = lines[i].split()
        values = lines[i + 1].split() if int(size) else []
        if len(values) != int(size):
            raise ModelError(f"array {name}: expected {size} values, got {len(values)}")
        state[name] = np.array([float(v) for v in values])
        i += 2
    if kind not in MODEL_CLASSES:
        raise ModelError(f"unknown model kind {kind!r}")
    return MODEL_CLASSES[kind].from_state(dim, state)


def save_model(model: Model, path: Union[str, Path]) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


def load_model(path: Union[str, Path]) -> Model:
    return loads_model(Path(path).read_text(encoding="utf-8"))
