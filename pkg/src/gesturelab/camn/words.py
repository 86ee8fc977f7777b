"""Word-vector tables for the text encoder.

The on-disk format is the usual text layout for pretrained embeddings:
one `word v1 v2 ... vD` line per entry, optionally preceded by a
`count dim` header line. Lookup tables map frame-level words to row
indices; unknown words share a single index whose vector is zero.
"""

from __future__ import annotations

import numpy as np

from ..errors import ParseError

UNKNOWN = "<UNK>"


def load_word_table(path, dim: int) -> tuple[np.ndarray, dict[str, int]]:
    """Read a text embedding file into (table, vocab) with an all-zero
    unknown row appended. Rows whose width disagrees with dim raise."""
    with open(path, "r", encoding="utf8") as fh:
        lines = fh.read().splitlines()
    vectors: list[np.ndarray] = []
    vocab: dict[str, int] = {}
    for ln, line in enumerate(lines, start=1):
        parts = line.split()
        if not parts:
            continue
        if ln == 1 and len(parts) == 2:
            continue  # header: count dim
        word, values = parts[0], parts[1:]
        if len(values) != dim:
            raise ParseError(
                f"word {word!r} has {len(values)} values, expected {dim}",
                line=ln, path=str(path),
            )
        try:
            row = np.array([float(v) for v in values], dtype=np.float64)
        except ValueError as exc:
            raise ParseError(str(exc), line=ln, path=str(path)) from None
        if word in vocab:
            raise ParseError(f"duplicate word {word!r}", line=ln, path=str(path))
        vocab[word] = len(vectors)
        vectors.append(row)
    if not vectors:
        raise ParseError("no word vectors found", path=str(path))
    vocab[UNKNOWN] = len(vectors)
    vectors.append(np.zeros(dim))
    return np.vstack(vectors), vocab


def random_word_table(words: list[str], dim: int, seed: int = 0) -> tuple[np.ndarray, dict[str, int]]:
    """Seeded stand-in table covering the given words plus <UNK>."""
    ordered = sorted(set(words))
    rng = np.random.default_rng(seed)
    table = rng.uniform(-0.5, 0.5, size=(len(ordered) + 1, dim))
    table[-1] = 0.0
    vocab = {w: i for i, w in enumerate(ordered)}
    vocab[UNKNOWN] = len(ordered)
    return table, vocab


def words_to_ids(words: list[str], vocab: dict[str, int]) -> np.ndarray:
    unk = vocab[UNKNOWN]
    return np.array([vocab.get(w, unk) for w in words], dtype=np.int64)
