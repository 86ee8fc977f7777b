"""JSON checkpoints: a manifest of named parameter arrays plus the seed.

Values are serialized as plain JSON floats, which round-trip float64
exactly, so save followed by load reproduces a model bit for bit.
"""

from __future__ import annotations

import json

import numpy as np

from ..errors import ParseError
from .tensor import Tensor


def save_checkpoint(params: dict[str, Tensor], path, seed: int | None = None, extra: dict | None = None) -> None:
    doc = {
        "seed": seed,
        "params": [
            {"name": name, "shape": list(p.data.shape), "values": p.data.reshape(-1).tolist()}
            for name, p in params.items()
        ],
    }
    if extra:
        doc["extra"] = extra
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_checkpoint(path) -> tuple[dict[str, np.ndarray], int | None]:
    with open(path, "r") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid checkpoint JSON: {exc}") from None
    if not isinstance(doc, dict) or "params" not in doc:
        raise ParseError("checkpoint is missing the params list")
    arrays: dict[str, np.ndarray] = {}
    for entry in doc["params"]:
        try:
            name = entry["name"]
            shape = tuple(entry["shape"])
            values = np.asarray(entry["values"], dtype=np.float64).reshape(shape)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed checkpoint entry: {exc}") from None
        arrays[name] = values
    return arrays, doc.get("seed")


def apply_checkpoint(params: dict[str, Tensor], arrays: dict[str, np.ndarray]) -> None:
    missing = sorted(set(params) - set(arrays))
    if missing:
        raise ParseError(f"checkpoint is missing parameter {missing[0]!r}")
    extra = sorted(set(arrays) - set(params))
    if extra:
        raise ParseError(f"checkpoint has unknown parameter {extra[0]!r}")
    for name, p in params.items():
        if arrays[name].shape != p.data.shape:
            raise ParseError(
                f"checkpoint parameter {name!r} has shape {arrays[name].shape}, "
                f"model expects {p.data.shape}"
            )
        p.data = arrays[name].copy()
