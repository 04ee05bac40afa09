"""Embedding spaces, similarity queries, and orthogonal alignment.

An :class:`EmbeddingSpace` maps words to dense vectors and answers cosine
and neighborhood queries against its whole vocabulary by exact scan. Two
spaces trained on different time periods are aligned with an orthogonal
Procrustes transform over their shared vocabulary, so vectors from one can
be projected into the axes of the other.

Vectors are unit-normalized for alignment and similarity queries; raw
vectors are what the file formats carry.
"""

from __future__ import annotations

import struct
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "PROVENANCES",
    "EmbeddingSpace",
    "AlignmentTransform",
    "NeighborhoodSet",
    "cosine",
    "neighborhood",
    "procrustes_align",
    "project",
    "project_space",
    "write_embeddings_text",
    "read_embeddings_text",
    "write_embeddings_binary",
    "read_embeddings_binary",
    "write_transform",
    "read_transform",
]

PROVENANCES = (
    "sgns-historical",
    "sgns-modern",
    "sgns-modern-projected",
    "decontextualized-historical",
    "decontextualized-modern",
)

_EMB_MAGIC = b"EMB1"


class EmbeddingSpace:
    """Word-to-vector map with similarity and neighborhood queries.

    ``matrix`` rows follow ``words`` order. Vectors are validated to be
    finite and of a common dimension at construction.
    """

    def __init__(self, words: Sequence[str], matrix: np.ndarray, provenance: str):
        if provenance not in PROVENANCES:
            raise ValueError(f"unknown provenance {provenance!r}")
        matrix = np.asarray(matrix)
        if matrix.ndim != 2 or matrix.shape[0] != len(words):
            raise ValueError("matrix must be [word x dim]")
        if not np.isfinite(matrix).all():
            raise ValueError("embedding matrix contains NaN or Inf")
        if len(set(words)) != len(words):
            raise ValueError("duplicate words in embedding space")
        if matrix.dtype not in (np.float32, np.float64):
            matrix = matrix.astype(np.float64)
        self.words: tuple[str, ...] = tuple(words)
        self.matrix = matrix
        self.provenance = provenance
        self._index = {w: i for i, w in enumerate(self.words)}
        self._unit: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.matrix.shape[1]

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def vector(self, word: str) -> np.ndarray:
        try:
            return self.matrix[self._index[word]]
        except KeyError:
            raise KeyError(f"word not in embedding space: {word!r}") from None

    def unit_matrix(self) -> np.ndarray:
        """Row-normalized float64 copy, cached; zero rows stay zero."""
        if self._unit is None:
            m = self.matrix.astype(np.float64)
            norms = np.linalg.norm(m, axis=1, keepdims=True)
            norms[norms == 0.0] = 1.0
            self._unit = m / norms
        return self._unit


@dataclass(frozen=True)
class AlignmentTransform:
    """Orthogonal map between two embedding spaces (applied as ``v @ matrix``)."""

    matrix: np.ndarray
    anchor_count: int
    residual: float

    def __post_init__(self) -> None:
        m = self.matrix
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("transform matrix must be square")
        defect = np.abs(m.T @ m - np.eye(m.shape[0])).max()
        if defect > 1e-6:
            raise ValueError(f"transform is not orthogonal (defect {defect:.2e})")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class NeighborhoodSet:
    """Historical-vocabulary words within cosine ``tau`` of a query vector.

    ``members`` is lexicographically sorted; the query word itself is
    excluded.
    """

    query_word: str
    tau: float
    members: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, word: str) -> bool:
        return word in self.members


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding.

    Undefined (raises ValueError) for a zero vector.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def neighborhood(
    space: EmbeddingSpace,
    query_vector: np.ndarray,
    query_word: str,
    tau: float,
    closed: bool = True,
    exclude: Iterable[str] = (),
) -> NeighborhoodSet:
    """Exact-scan neighborhood of ``query_vector`` over a space.

    Membership uses ``cosine >= tau`` by default (``closed``); pass
    ``closed=False`` for a strict threshold. ``exclude`` removes further
    words (e.g. other candidate neologisms) beyond the query word itself.
    """
    if not (-1.0 < tau < 1.0):
        raise ValueError("tau must be in (-1, 1)")
    if len(space) == 0:
        raise ValueError("neighborhood query over an empty space")
    sims = _scan_cosines(space, query_vector)
    mask = sims >= tau if closed else sims > tau
    skip = set(exclude)
    skip.add(query_word)
    members = tuple(sorted(w for w, hit in zip(space.words, mask) if hit and w not in skip))
    return NeighborhoodSet(query_word, tau, members)


def _scan_cosines(space: EmbeddingSpace, query_vector: np.ndarray) -> np.ndarray:
    q = np.asarray(query_vector, dtype=np.float64)
    nq = np.linalg.norm(q)
    if nq == 0.0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return np.clip(space.unit_matrix() @ (q / nq), -1.0, 1.0)


def procrustes_align(
    source: EmbeddingSpace, target: EmbeddingSpace, center: bool = False
) -> AlignmentTransform:
    """Orthogonal matrix minimizing ``||A @ M - B||_F`` over shared anchors.

    ``A`` holds the source's unit vectors for the shared vocabulary and
    ``B`` the target's; the solution is ``U @ Vt`` from the SVD of
    ``A.T @ B``. Anchors are weighted uniformly and, unless ``center``,
    not mean-centered. Warns when there are fewer anchors than dimensions.
    """
    if source.dim != target.dim:
        raise ValueError(f"dimension mismatch: {source.dim} != {target.dim}")
    anchors = sorted(set(source.words) & set(target.words))
    if not anchors:
        raise ValueError("no shared vocabulary to anchor the alignment")
    if len(anchors) < source.dim:
        warnings.warn(
            f"only {len(anchors)} anchors for dimension {source.dim}; "
            "alignment may be underdetermined",
            stacklevel=2,
        )
    src_rows = [source._index[w] for w in anchors]
    tgt_rows = [target._index[w] for w in anchors]
    A = source.unit_matrix()[src_rows]
    B = target.unit_matrix()[tgt_rows]
    if center:
        A = A - A.mean(axis=0)
        B = B - B.mean(axis=0)
    u, _, vt = np.linalg.svd(A.T @ B)
    m = u @ vt
    residual = float(np.linalg.norm(A @ m - B))
    return AlignmentTransform(m, len(anchors), residual)


def project(space: EmbeddingSpace, transform: AlignmentTransform, word: str) -> np.ndarray:
    """Apply ``transform`` to a word's vector.

    Orthogonal maps commute with normalization, so similarity queries see
    the same result whether raw or unit vectors are projected; the raw
    vector is projected so an identity transform is a true no-op.
    """
    if space.dim != transform.dim:
        raise ValueError("space and transform dimensions differ")
    return space.vector(word).astype(np.float64) @ transform.matrix


def project_space(
    space: EmbeddingSpace,
    transform: AlignmentTransform,
    words: Sequence[str] | None = None,
) -> EmbeddingSpace:
    """Project some or all of a space's words; provenance becomes projected."""
    if words is None:
        words = space.words
    missing = [w for w in words if w not in space]
    if missing:
        raise KeyError(f"words not in embedding space: {missing[:5]!r}")
    rows = [space._index[w] for w in words]
    projected = space.matrix[rows].astype(np.float64) @ transform.matrix
    return EmbeddingSpace(list(words), projected, "sgns-modern-projected")


# -- file formats -----------------------------------------------------------

def _fmt_float(x: float) -> str:
    # shortest decimal that round-trips the float32 value exactly
    return repr(float(np.float32(x)))


def write_embeddings_text(space: EmbeddingSpace, path: str | Path) -> None:
    """Text format: first line ``count dim``, then ``word v1 ... vd`` lines."""
    m32 = space.matrix.astype(np.float32)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{len(space)} {space.dim}\n")
        for i, word in enumerate(space.words):
            fh.write(word + " " + " ".join(_fmt_float(v) for v in m32[i]) + "\n")


def read_embeddings_text(path: str | Path, provenance: str) -> EmbeddingSpace:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError(f"{path}: bad embedding header")
        count, dim = int(header[0]), int(header[1])
        words, rows = [], np.zeros((count, dim), dtype=np.float32)
        for i in range(count):
            parts = fh.readline().rstrip("\n").split(" ")
            if len(parts) != dim + 1:
                raise ValueError(f"{path}: record {i} has wrong arity")
            words.append(parts[0])
            rows[i] = [np.float32(x) for x in parts[1:]]
    return EmbeddingSpace(words, rows, provenance)


def write_embeddings_binary(space: EmbeddingSpace, path: str | Path) -> None:
    """EMB1 format: magic, u32 LE count and dim, then length-prefixed records.

    Each record is a u16 LE word byte length, the UTF-8 word bytes, and
    ``dim`` float32 LE components. Round-trips bit-exactly.
    """
    m32 = space.matrix.astype(np.float32)
    with open(path, "wb") as fh:
        fh.write(_EMB_MAGIC)
        fh.write(struct.pack("<II", len(space), space.dim))
        for i, word in enumerate(space.words):
            raw = word.encode("utf-8")
            fh.write(struct.pack("<H", len(raw)))
            fh.write(raw)
            fh.write(m32[i].astype("<f4").tobytes())


def read_embeddings_binary(path: str | Path, provenance: str) -> EmbeddingSpace:
    with open(path, "rb") as fh:
        if fh.read(4) != _EMB_MAGIC:
            raise ValueError(f"{path}: not an EMB1 file")
        count, dim = struct.unpack("<II", fh.read(8))
        words, rows = [], np.zeros((count, dim), dtype=np.float32)
        for i in range(count):
            (wlen,) = struct.unpack("<H", fh.read(2))
            words.append(fh.read(wlen).decode("utf-8"))
            rows[i] = np.frombuffer(fh.read(4 * dim), dtype="<f4")
    return EmbeddingSpace(words, rows, provenance)


def write_transform(transform: AlignmentTransform, path: str | Path) -> None:
    """Text matrix, row-major; first line ``dim residual anchor_count``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{transform.dim} {transform.residual!r} {transform.anchor_count}\n")
        for row in transform.matrix:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def read_transform(path: str | Path) -> AlignmentTransform:
    with open(path, encoding="utf-8") as fh:
        dim_s, residual_s, anchors_s = fh.readline().split()
        dim = int(dim_s)
        rows = [[float(x) for x in fh.readline().split()] for _ in range(dim)]
    return AlignmentTransform(np.array(rows, dtype=np.float64), int(anchors_s), float(residual_s))
