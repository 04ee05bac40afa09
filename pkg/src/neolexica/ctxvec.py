"""Decontextualized embeddings from per-context vector dumps.

An external encoder produces one vector per (word, context) pair; this
module z-scores every dimension over all loaded vectors to neutralize the
high-variance "rogue" dimensions that dominate similarity, then averages
each word's vectors into a single decontextualized embedding.

CTX wire format, binary: magic ``CTX1``, u32 LE count and dim, then per
record a u16 LE word byte length, the UTF-8 word bytes, a u32 LE context
id, and dim float32 LE components. Text variant: header ``count dim``,
then ``word context_id v1 ... vd`` lines.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingSpace

__all__ = [
    "ContextVectorSet",
    "ZScoreStats",
    "load_context_vectors",
    "write_context_vectors_binary",
    "write_context_vectors_text",
    "concat_context_sets",
    "zscore_vectors",
    "build_decontextualized_space",
]

_CTX_MAGIC = b"CTX1"


class ContextVectorSet:
    """Per-context vectors for a set of words.

    ``words[i]``, ``context_ids[i]`` and ``vectors[i]`` describe record
    ``i``; (word, context id) pairs are unique. ``zscored`` marks a set
    produced by :func:`zscore_vectors`.
    """

    def __init__(
        self,
        words: Sequence[str],
        context_ids: Sequence[int] | np.ndarray,
        vectors: np.ndarray,
        zscored: bool = False,
    ):
        vectors = np.asarray(vectors)
        if vectors.ndim != 2 or vectors.shape[0] != len(words):
            raise ValueError("vectors must be a [record x dim] matrix")
        context_ids = np.asarray(context_ids, dtype=np.int64)
        if context_ids.shape[0] != len(words):
            raise ValueError("context_ids and words must have equal length")
        keys = list(zip(words, context_ids.tolist()))
        if len(set(keys)) != len(keys):
            raise ValueError("duplicate (word, context_id) record")
        if vectors.dtype not in (np.float32, np.float64):
            vectors = vectors.astype(np.float64)
        self.words: tuple[str, ...] = tuple(words)
        self.context_ids = context_ids
        self.vectors = vectors
        self.zscored = zscored

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def distinct_words(self) -> list[str]:
        return sorted(set(self.words))


@dataclass(frozen=True)
class ZScoreStats:
    """Per-dimension mean and population standard deviation of one set."""

    mean: np.ndarray
    std: np.ndarray


def load_context_vectors(path: str | Path) -> ContextVectorSet:
    """Load a CTX file, binary or text, validating dims and uniqueness."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == _CTX_MAGIC:
        return _load_binary(path)
    return _load_text(path)


def _load_binary(path: str | Path) -> ContextVectorSet:
    with open(path, "rb") as fh:
        fh.read(4)
        count, dim = struct.unpack("<II", fh.read(8))
        words: list[str] = []
        context_ids = np.zeros(count, dtype=np.int64)
        vectors = np.zeros((count, dim), dtype=np.float32)
        for i in range(count):
            head = fh.read(2)
            if len(head) != 2:
                raise ValueError(f"{path}: truncated at record {i}")
            (wlen,) = struct.unpack("<H", head)
            words.append(fh.read(wlen).decode("utf-8"))
            (context_ids[i],) = struct.unpack("<I", fh.read(4))
            buf = fh.read(4 * dim)
            if len(buf) != 4 * dim:
                raise ValueError(f"{path}: record {i} has a short vector")
            vectors[i] = np.frombuffer(buf, dtype="<f4")
    try:
        return ContextVectorSet(words, context_ids, vectors)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def _load_text(path: str | Path) -> ContextVectorSet:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: bad CTX text header")
        count, dim = int(header[0]), int(header[1])
        words: list[str] = []
        context_ids = np.zeros(count, dtype=np.int64)
        vectors = np.zeros((count, dim), dtype=np.float32)
        for i in range(count):
            parts = fh.readline().rstrip("\n").split(" ")
            if len(parts) != dim + 2:
                raise ValueError(f"{path}: record {i} has wrong arity (dim mismatch)")
            words.append(parts[0])
            context_ids[i] = int(parts[1])
            vectors[i] = [np.float32(x) for x in parts[2:]]
    try:
        return ContextVectorSet(words, context_ids, vectors)
    except ValueError as exc:
        raise ValueError(f"{path}: {exc}") from None


def write_context_vectors_binary(ctx: ContextVectorSet, path: str | Path) -> None:
    v32 = ctx.vectors.astype(np.float32)
    with open(path, "wb") as fh:
        fh.write(_CTX_MAGIC)
        fh.write(struct.pack("<II", len(ctx), ctx.dim))
        for i, word in enumerate(ctx.words):
            raw = word.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<I", int(ctx.context_ids[i])))
            fh.write(v32[i].astype("<f4").tobytes())


def write_context_vectors_text(ctx: ContextVectorSet, path: str | Path) -> None:
    v32 = ctx.vectors.astype(np.float32)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(ctx)} {ctx.dim}\n")
        for i, word in enumerate(ctx.words):
            comps = " ".join(repr(float(x)) for x in v32[i])
            fh.write(f"{word} {int(ctx.context_ids[i])} {comps}\n")


def concat_context_sets(*sets: ContextVectorSet) -> ContextVectorSet:
    """Union of several sets, e.g. historical-vocabulary plus neologism dumps.

    Z-score statistics are computed over all obtained vectors of one
    analysis by default, so callers concatenate before z-scoring.
    """
    if not sets:
        raise ValueError("nothing to concatenate")
    dims = {s.dim for s in sets}
    if len(dims) != 1:
        raise ValueError(f"dimension mismatch across sets: {sorted(dims)}")
    words = [w for s in sets for w in s.words]
    ids = np.concatenate([s.context_ids for s in sets])
    vectors = np.vstack([s.vectors.astype(np.float64) for s in sets])
    return ContextVectorSet(words, ids, vectors)


def zscore_vectors(ctx: ContextVectorSet) -> tuple[ContextVectorSet, ZScoreStats]:
    """Standardize every dimension over all records of a set.

    Uses the population (1/N) standard deviation. Dimensions with zero
    variance map to zero rather than dividing by zero. Requires at least
    two records.
    """
    if len(ctx) < 2:
        raise ValueError("z-scoring requires at least 2 records")
    x = ctx.vectors.astype(np.float64)
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    safe = np.where(std == 0.0, 1.0, std)
    z = (x - mean) / safe
    z[:, std == 0.0] = 0.0
    out = ContextVectorSet(ctx.words, ctx.context_ids, z, zscored=True)
    return out, ZScoreStats(mean, std)


def build_decontextualized_space(
    ctx: ContextVectorSet,
    provenance: str,
    expected_words: Sequence[str] | None = None,
) -> tuple[EmbeddingSpace, list[str]]:
    """Average each word's records into one vector per word.

    Records are summed in context-id order so the result is independent
    of record order in the file. Returns the space plus the words from
    ``expected_words`` that had no records (absent from the space, e.g.
    tokenization mismatches upstream).
    """
    if not ctx.zscored:
        warnings.warn("building a decontextualized space from non-z-scored vectors", stacklevel=2)
    by_word: dict[str, list[int]] = {}
    for i, word in enumerate(ctx.words):
        by_word.setdefault(word, []).append(i)
    words = sorted(by_word)
    matrix = np.zeros((len(words), ctx.dim), dtype=np.float64)
    order_key = ctx.context_ids
    for row, word in enumerate(words):
        rows = sorted(by_word[word], key=lambda i: (order_key[i], i))
        matrix[row] = ctx.vectors[rows].mean(axis=0)
    missing = sorted(set(expected_words or ()) - set(words))
    return EmbeddingSpace(words, matrix, provenance), missing
