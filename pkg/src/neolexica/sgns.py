"""Skip-gram negative-sampling embedding trainer.

Pure-numpy minibatch SGD: pairs are generated from dynamic windows inside
each document, negatives drawn from the unigram distribution raised to
0.75, and updates applied per batch from a shared snapshot of the
weights. A word touched many times within one batch receives the average
of its gradient contributions, not the sum; summing stale-snapshot
gradients for high-frequency words overshoots and diverges, while the
average keeps every step at learning-rate scale. The learning rate decays
linearly over the planned number of positions.

Single-worker training is bitwise deterministic under a fixed seed. With
``workers > 1``, chunks of the pair stream are processed concurrently and
weight updates may interleave without synchronization; per-chunk RNGs are
derived the same way in both modes, so the multi-worker setting changes
only the racing of updates, not the sampled pairs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .corpus import Corpus, Vocabulary, build_vocabulary
from .embeddings import EmbeddingSpace

__all__ = ["SGNSHyperparams", "train_sgns"]

_CHUNK_POSITIONS = 32_768
_MAX_BATCH_PAIRS = 16_384
_MIN_BATCH_PAIRS = 256


def _batch_size(estimated_total_pairs: int, target_steps: int) -> int:
    """Pairs per update batch.

    With per-row gradient averaging, a word's number of effective steps is
    roughly the number of batches that touch it, so the batch is sized to
    hit ``target_steps`` update steps over the whole run, floored for
    vectorization efficiency and capped for throughput on large corpora.
    Averaged updates break the early all-vectors-aligned symmetry more
    slowly than per-pair SGD; corpora with large vocabularies relative to
    their size need more steps (and a larger step size) to differentiate.
    """
    raw = estimated_total_pairs // target_steps
    return max(_MIN_BATCH_PAIRS, min(_MAX_BATCH_PAIRS, raw))


@dataclass(frozen=True)
class SGNSHyperparams:
    """Training knobs; window and dimension follow the measurement setup.

    ``target_steps`` sizes the update batches (see :func:`_batch_size`);
    raise it together with ``initial_step`` for corpora whose vocabulary
    is large relative to their token count.
    """

    window: int = 5
    dim: int = 300
    negatives: int = 5
    epochs: int = 5
    initial_step: float = 0.025
    subsample: float = 1e-5
    target_steps: int = 400

    def __post_init__(self) -> None:
        if self.window < 1 or self.dim < 1 or self.negatives < 0 or self.epochs < 1:
            raise ValueError("window, dim, epochs must be >= 1 and negatives >= 0")
        if self.initial_step <= 0:
            raise ValueError("initial_step must be positive")
        if self.subsample < 0:
            raise ValueError("subsample must be >= 0")
        if self.target_steps < 1:
            raise ValueError("target_steps must be >= 1")


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30.0, 30.0)))


def _scatter_mean(weights: np.ndarray, idx: np.ndarray, grads: np.ndarray) -> None:
    # sort + reduceat folds duplicate rows into their mean before one
    # fancy-index add; faster than np.add.at and deterministic
    order = np.argsort(idx, kind="stable")
    idx = idx[order]
    grads = grads[order]
    first = np.empty(idx.shape[0], dtype=bool)
    first[0] = True
    np.not_equal(idx[1:], idx[:-1], out=first[1:])
    starts = np.flatnonzero(first)
    counts = np.diff(np.append(starts, idx.shape[0])).astype(np.float32)
    weights[idx[starts]] += np.add.reduceat(grads, starts, axis=0) / counts[:, None]


def _pairs_for_chunk(
    start: int,
    stop: int,
    ids: np.ndarray,
    doc: np.ndarray,
    b: np.ndarray,
    window: int,
) -> tuple[np.ndarray, np.ndarray]:
    length = ids.shape[0]
    centers_parts, contexts_parts = [], []
    i = np.arange(start, stop, dtype=np.int64)
    for d in range(1, window + 1):
        reach = b[start:stop] >= d
        for offset in (d, -d):
            j = i + offset
            ok = reach & (j >= 0) & (j < length)
            ci, cj = i[ok], j[ok]
            same = doc[ci] == doc[cj]
            centers_parts.append(ids[ci[same]])
            contexts_parts.append(ids[cj[same]])
    return np.concatenate(centers_parts), np.concatenate(contexts_parts)


def _train_chunk(
    win: np.ndarray,
    wout: np.ndarray,
    centers: np.ndarray,
    contexts: np.ndarray,
    noise_cdf: np.ndarray,
    negatives: int,
    lr: float,
    seed: int,
    batch_pairs: int,
) -> None:
    rng = np.random.default_rng(seed)
    lr32 = np.float32(lr)
    for s in range(0, centers.shape[0], batch_pairs):
        c = centers[s : s + batch_pairs]
        o = contexts[s : s + batch_pairs]
        vc = win[c]
        uo = wout[o]
        g_pos = (1.0 - _sigmoid(np.einsum("bd,bd->b", vc, uo))) * lr32
        grad_c = g_pos[:, None] * uo
        grad_o = g_pos[:, None] * vc
        if negatives > 0:
            negs = np.searchsorted(
                noise_cdf, rng.random((c.shape[0], negatives)), side="right"
            ).astype(np.int64)
            un = wout[negs]
            g_neg = -_sigmoid(np.einsum("bkd,bd->bk", un, vc)) * lr32
            grad_c += np.einsum("bk,bkd->bd", g_neg, un)
            grad_n = (g_neg[..., None] * vc[:, None, :]).reshape(-1, win.shape[1])
            _scatter_mean(wout, negs.reshape(-1), grad_n)
        _scatter_mean(win, c, grad_c)
        _scatter_mean(wout, o, grad_o)


def train_sgns(
    corpus: Corpus,
    split: str,
    hyper: SGNSHyperparams = SGNSHyperparams(),
    seed: int = 0,
    vocab: Vocabulary | None = None,
    size_cap: int = 100_000,
    workers: int = 1,
) -> EmbeddingSpace:
    """Train skip-gram embeddings on one corpus split.

    Every vocabulary word receives a finite vector (words the sampler
    never visits keep their random initialization). Raises ValueError for
    a degenerate corpus in which no document contributes a context pair.
    """
    if workers < 1:
        raise ValueError("workers must be >= 1")
    table = corpus.frequency_table(split)
    if vocab is None:
        vocab = build_vocabulary(table, size_cap)
    word_to_id = {w: i for i, w in enumerate(vocab.entries)}
    V = len(vocab.entries)

    doc_ids: list[np.ndarray] = []
    for document in corpus.split_documents(split):
        row = [word_to_id[t] for t in document.tokens if t in word_to_id]
        if len(row) >= 2:
            doc_ids.append(np.asarray(row, dtype=np.int64))
    if not doc_ids:
        raise ValueError("degenerate corpus: no document yields a context window")
    ids_all = np.concatenate(doc_ids)
    doc_all = np.repeat(np.arange(len(doc_ids)), [len(d) for d in doc_ids])

    counts = np.array([vocab.totals[i] for i in range(V)], dtype=np.float64)
    noise = counts**0.75
    noise_cdf = np.cumsum(noise / noise.sum())
    noise_cdf[-1] = 1.0

    keep_prob = None
    if hyper.subsample > 0:
        freq = counts / counts.sum()
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = hyper.subsample / freq
            keep_prob = np.minimum(1.0, np.sqrt(ratio) + ratio)
        keep_prob[~np.isfinite(keep_prob)] = 1.0

    rng = np.random.default_rng(seed)
    win = ((rng.random((V, hyper.dim), dtype=np.float32) - 0.5) / hyper.dim).astype(np.float32)
    wout = np.zeros((V, hyper.dim), dtype=np.float32)

    # E[window draw] = (window+1)/2, two directions per center
    estimated_pairs = ids_all.shape[0] * (hyper.window + 1) * hyper.epochs
    batch_pairs = _batch_size(estimated_pairs, hyper.target_steps)

    for epoch in range(hyper.epochs):
        if keep_prob is not None:
            keep = rng.random(ids_all.shape[0]) < keep_prob[ids_all]
            ids, doc = ids_all[keep], doc_all[keep]
        else:
            ids, doc = ids_all, doc_all
        if ids.shape[0] < 2:
            continue
        b = rng.integers(1, hyper.window + 1, ids.shape[0])
        chunk_bounds = list(range(0, ids.shape[0], _CHUNK_POSITIONS))
        chunk_seeds = rng.integers(0, 2**63 - 1, len(chunk_bounds))

        jobs = []
        for k, start in enumerate(chunk_bounds):
            stop = min(start + _CHUNK_POSITIONS, ids.shape[0])
            centers, contexts = _pairs_for_chunk(start, stop, ids, doc, b, hyper.window)
            if centers.shape[0] == 0:
                continue
            progress = (epoch + start / ids.shape[0]) / hyper.epochs
            lr = max(hyper.initial_step * (1.0 - progress), hyper.initial_step * 1e-4)
            jobs.append((centers, contexts, lr, int(chunk_seeds[k])))

        if workers == 1:
            for centers, contexts, lr, chunk_seed in jobs:
                _train_chunk(
                    win, wout, centers, contexts, noise_cdf,
                    hyper.negatives, lr, chunk_seed, batch_pairs,
                )
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                futures = [
                    pool.submit(
                        _train_chunk,
                        win, wout, centers, contexts, noise_cdf,
                        hyper.negatives, lr, chunk_seed, batch_pairs,
                    )
                    for centers, contexts, lr, chunk_seed in jobs
                ]
                for f in futures:
                    f.result()

    provenance = "sgns-historical" if split == "historical" else "sgns-modern"
    return EmbeddingSpace(vocab.entries, win, provenance)
