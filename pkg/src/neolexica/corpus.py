"""Corpus ingestion, time binning, frequency tables, and vocabularies.

The corpus wire format is one document per line with three tab-separated
fields ``id``, ``timestamp``, ``text``; the timestamp is an ISO-8601 date
or a bare year, and the text may itself contain tabs (only the first two
tabs delimit). Documents are tokenized, filtered, binned into timesteps,
and split into Historical and Modern halves at a configurable cutoff year.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .tokenizer import DEFAULT_RULES, TokenizerRules, tokenize_with_stats

__all__ = [
    "TimeBinning",
    "RawDocument",
    "Document",
    "FrequencyTable",
    "Vocabulary",
    "Corpus",
    "CorpusFormatError",
    "ingest_corpus",
    "build_frequency_table",
    "build_vocabulary",
    "sample_contexts",
]

SPLITS = ("historical", "modern", "full")


class CorpusFormatError(ValueError):
    """Malformed corpus record, reported with its line number."""


@dataclass(frozen=True)
class TimeBinning:
    """Mapping between calendar years and 1-based timestep indices.

    ``granularity`` is ``"year"`` or ``"decade"``; ``historical_cutoff``
    is the last year included in the Historical split. Timestep ``t`` runs
    1..num_bins over the whole span, e.g. ``t = year - first_year + 1``
    at year granularity.
    """

    granularity: str
    first_year: int
    last_year: int
    historical_cutoff: int

    def __post_init__(self) -> None:
        if self.granularity not in ("year", "decade"):
            raise ValueError(f"unknown granularity: {self.granularity!r}")
        if not (self.first_year <= self.historical_cutoff < self.last_year):
            raise ValueError(
                "require first_year <= historical_cutoff < last_year, got "
                f"{self.first_year} / {self.historical_cutoff} / {self.last_year}"
            )

    def _base(self, year: int) -> int:
        return year if self.granularity == "year" else year // 10

    @property
    def num_bins(self) -> int:
        return self._base(self.last_year) - self._base(self.first_year) + 1

    def bin_index(self, year: int) -> int:
        """1-based timestep for ``year``; raises if the year is out of span."""
        if not (self.first_year <= year <= self.last_year):
            raise ValueError(f"year {year} outside span [{self.first_year}, {self.last_year}]")
        return self._base(year) - self._base(self.first_year) + 1

    def split_of(self, year: int) -> str:
        return "historical" if year <= self.historical_cutoff else "modern"

    def bins_for_split(self, split: str) -> tuple[int, int]:
        """Inclusive (first, last) global timestep covered by ``split``."""
        cut = self.bin_index(self.historical_cutoff)
        if split == "historical":
            return 1, cut
        if split == "modern":
            return cut + 1, self.num_bins
        if split == "full":
            return 1, self.num_bins
        raise ValueError(f"unknown split: {split!r}")


@dataclass(frozen=True)
class RawDocument:
    """One record of the corpus wire format."""

    id: str
    year: int
    text: str


@dataclass(frozen=True)
class Document:
    """A retained document after tokenization and binning."""

    id: str
    year: int
    bin: int
    tokens: tuple[str, ...]
    text: str


class FrequencyTable:
    """Per-word, per-timestep usage counts for one split.

    Counts are a ``[word x timestep]`` int64 matrix; column ``j`` is the
    j-th timestep of the split (global timestep ``first_bin + j``).
    """

    def __init__(self, words: Sequence[str], counts: np.ndarray, first_bin: int = 1):
        counts = np.asarray(counts, dtype=np.int64)
        if counts.ndim != 2 or counts.shape[0] != len(words):
            raise ValueError("counts must be a [word x timestep] matrix")
        if (counts < 0).any():
            raise ValueError("counts must be nonnegative")
        if len(set(words)) != len(words):
            raise ValueError("duplicate words in frequency table")
        self.words: tuple[str, ...] = tuple(words)
        self.counts = counts
        self.first_bin = int(first_bin)
        self._index = {w: i for i, w in enumerate(self.words)}

    @property
    def num_timesteps(self) -> int:
        return self.counts.shape[1]

    @property
    def totals_per_timestep(self) -> np.ndarray:
        return self.counts.sum(axis=0)

    def __contains__(self, word: str) -> bool:
        return word in self._index

    def __len__(self) -> int:
        return len(self.words)

    def row(self, word: str) -> np.ndarray:
        try:
            return self.counts[self._index[word]]
        except KeyError:
            raise KeyError(f"word not in frequency table: {word!r}") from None

    def total(self, word: str) -> int:
        return int(self.row(word).sum())

    def merge(self, other: "FrequencyTable") -> "FrequencyTable":
        """Associative merge of two partial tables over the same timesteps.

        Sharded counting merged this way must equal single-shard counting
        exactly; words are realigned by name and counts added.
        """
        if other.num_timesteps != self.num_timesteps or other.first_bin != self.first_bin:
            raise ValueError("cannot merge tables over different timesteps")
        words = sorted(set(self.words) | set(other.words))
        counts = np.zeros((len(words), self.num_timesteps), dtype=np.int64)
        index = {w: i for i, w in enumerate(words)}
        for table in (self, other):
            rows = [index[w] for w in table.words]
            counts[rows] += table.counts
        return FrequencyTable(words, counts, self.first_bin)

    def to_tsv(self, path: str | Path) -> None:
        """Write the table as TSV with header ``word\\tt1...tT``, words sorted."""
        T = self.num_timesteps
        order = sorted(range(len(self.words)), key=lambda i: self.words[i])
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("word\t" + "\t".join(f"t{j + 1}" for j in range(T)) + "\n")
            for i in order:
                row = "\t".join(str(int(c)) for c in self.counts[i])
                fh.write(f"{self.words[i]}\t{row}\n")

    @classmethod
    def from_tsv(cls, path: str | Path, first_bin: int = 1) -> "FrequencyTable":
        words: list[str] = []
        rows: list[list[int]] = []
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")
            if not header or header[0] != "word":
                raise CorpusFormatError(f"{path}: not a frequency table (bad header)")
            T = len(header) - 1
            for lineno, line in enumerate(fh, start=2):
                parts = line.rstrip("\n").split("\t")
                if len(parts) != T + 1:
                    raise CorpusFormatError(f"{path}:{lineno}: expected {T + 1} fields")
                words.append(parts[0])
                rows.append([int(x) for x in parts[1:]])
        counts = np.asarray(rows, dtype=np.int64) if rows else np.zeros((0, T), dtype=np.int64)
        return cls(words, counts, first_bin)


class Vocabulary:
    """Frequency-ranked word list capped at ``size_cap`` types.

    Ranks are 1-based; ties in total frequency break lexicographically so
    the ranking is a reproducible total order.
    """

    def __init__(self, entries: Sequence[str], totals: Sequence[int], size_cap: int):
        self.entries: tuple[str, ...] = tuple(entries)
        self.totals: tuple[int, ...] = tuple(int(t) for t in totals)
        self.size_cap = int(size_cap)
        self.rank: dict[str, int] = {w: i + 1 for i, w in enumerate(self.entries)}
        if len(self.rank) != len(self.entries):
            raise ValueError("duplicate words in vocabulary")

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.rank

    @property
    def implied_min_count(self) -> int:
        """Total frequency of the lowest-ranked retained word."""
        return self.totals[-1] if self.totals else 0

    def to_tsv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("word\trank\ttotal\n")
            for i, word in enumerate(self.entries):
                fh.write(f"{word}\t{i + 1}\t{self.totals[i]}\n")

    @classmethod
    def from_tsv(cls, path: str | Path, size_cap: int | None = None) -> "Vocabulary":
        entries: list[str] = []
        totals: list[int] = []
        with open(path, encoding="utf-8") as fh:
            fh.readline()
            for line in fh:
                word, _rank, total = line.rstrip("\n").split("\t")
                entries.append(word)
                totals.append(int(total))
        return cls(entries, totals, size_cap if size_cap is not None else len(entries))


def build_vocabulary(table: FrequencyTable, size_cap: int = 100_000) -> Vocabulary:
    """Rank words by descending total frequency and keep the top ``size_cap``."""
    if size_cap < 1:
        raise ValueError("size_cap must be >= 1")
    if len(table) == 0:
        raise ValueError("cannot build a vocabulary from an empty table")
    totals = table.counts.sum(axis=1)
    order = sorted(range(len(table.words)), key=lambda i: (-totals[i], table.words[i]))
    order = order[:size_cap]
    return Vocabulary(
        [table.words[i] for i in order], [int(totals[i]) for i in order], size_cap
    )


@dataclass
class Corpus:
    """Handle over an ingested corpus: retained documents plus drop statistics."""

    binning: TimeBinning
    documents: list[Document]
    manifest: dict = field(default_factory=dict)

    def frequency_table(self, split: str) -> FrequencyTable:
        return build_frequency_table(self, split)

    def sample_contexts(
        self, word: str, k: int, seed: int, split: str = "full"
    ) -> list[str]:
        return sample_contexts(self, word, k, seed, split)

    def split_documents(self, split: str) -> list[Document]:
        lo, hi = self.binning.bins_for_split(split)
        return [d for d in self.documents if lo <= d.bin <= hi]

    def write_manifest(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(self.manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _parse_year(stamp: str) -> int:
    stamp = stamp.strip()
    if len(stamp) >= 4 and stamp[:4].isdigit() and (len(stamp) == 4 or stamp[4] == "-"):
        return int(stamp[:4])
    raise ValueError(f"timestamp must be a year or ISO-8601 date: {stamp!r}")


def _parse_line(line: str, lineno: int, path: str) -> RawDocument:
    parts = line.rstrip("\n").split("\t", 2)
    if len(parts) != 3:
        raise CorpusFormatError(f"{path}:{lineno}: expected id<TAB>timestamp<TAB>text")
    doc_id, stamp, text = parts
    if not doc_id:
        raise CorpusFormatError(f"{path}:{lineno}: empty document id")
    try:
        year = _parse_year(stamp)
    except ValueError as exc:
        raise CorpusFormatError(f"{path}:{lineno}: {exc}") from None
    return RawDocument(doc_id, year, text)


def ingest_corpus(
    paths: str | Path | Sequence[str | Path],
    binning: TimeBinning,
    rules: TokenizerRules = DEFAULT_RULES,
    strict: bool = False,
) -> Corpus:
    """Read, tokenize, filter, and bin corpus files into a :class:`Corpus`.

    Documents whose every token is removed are dropped and counted in the
    manifest. With ``strict``, a timestamp outside the binning span raises
    :class:`CorpusFormatError` naming the document; otherwise the document
    is dropped under the ``out_of_span`` rule.
    """
    if isinstance(paths, (str, Path)):
        paths = [paths]
    documents: list[Document] = []
    seen_ids: set[str] = set()
    token_drops: Counter = Counter()
    doc_drops: Counter = Counter()
    tokens_per_bin = np.zeros(binning.num_bins, dtype=np.int64)
    docs_per_bin = np.zeros(binning.num_bins, dtype=np.int64)
    total_read = 0
    for path in paths:
        path = str(path)
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if line == "\n" or not line:
                    continue
                raw = _parse_line(line, lineno, path)
                total_read += 1
                if raw.id in seen_ids:
                    raise CorpusFormatError(f"{path}:{lineno}: duplicate document id {raw.id!r}")
                seen_ids.add(raw.id)
                if not (binning.first_year <= raw.year <= binning.last_year):
                    if strict:
                        raise CorpusFormatError(
                            f"{path}:{lineno}: document {raw.id!r} "
                            f"timestamp {raw.year} outside corpus span"
                        )
                    doc_drops["out_of_span"] += 1
                    continue
                tokens, drops = tokenize_with_stats(raw.text, rules)
                token_drops.update(drops)
                if not tokens:
                    rules_hit = set(drops)
                    reason = rules_hit.pop() if len(rules_hit) == 1 else "mixed"
                    doc_drops[f"empty_after_filter:{reason}"] += 1
                    continue
                t = binning.bin_index(raw.year)
                tokens_per_bin[t - 1] += len(tokens)
                docs_per_bin[t - 1] += 1
                documents.append(Document(raw.id, raw.year, t, tuple(tokens), raw.text))
    manifest = {
        "documents_read": total_read,
        "documents_retained": len(documents),
        "documents_dropped_per_rule": dict(sorted(doc_drops.items())),
        "tokens_dropped_per_rule": dict(sorted(token_drops.items())),
        "token_totals_per_bin": {f"t{i + 1}": int(n) for i, n in enumerate(tokens_per_bin)},
        "document_totals_per_bin": {f"t{i + 1}": int(n) for i, n in enumerate(docs_per_bin)},
    }
    return Corpus(binning, documents, manifest)


def build_frequency_table(corpus: Corpus, split: str) -> FrequencyTable:
    """Count token occurrences per word and timestep for ``split``.

    The ``full`` split spans all timesteps of both halves, which the
    popularization-time estimator requires.
    """
    if split not in SPLITS:
        raise ValueError(f"unknown split: {split!r} (expected one of {SPLITS})")
    lo, hi = corpus.binning.bins_for_split(split)
    T = hi - lo + 1
    index: dict[str, int] = {}
    rows: list[np.ndarray] = []
    for doc in corpus.documents:
        if not (lo <= doc.bin <= hi):
            continue
        col = doc.bin - lo
        for token in doc.tokens:
            i = index.get(token)
            if i is None:
                index[token] = len(rows)
                rows.append(np.zeros(T, dtype=np.int64))
                i = len(rows) - 1
            rows[i][col] += 1
    counts = np.vstack(rows) if rows else np.zeros((0, T), dtype=np.int64)
    return FrequencyTable(list(index), counts, first_bin=lo)


def sample_contexts(
    corpus: Corpus, word: str, k: int, seed: int, split: str = "full"
) -> list[str]:
    """Sample up to ``k`` distinct documents containing ``word``, as raw text.

    Sampling is uniform without replacement and deterministic under
    ``seed``; if fewer than ``k`` documents contain the word, all are
    returned. An absent word yields an empty list (callers may warn), the
    analog of vocabulary/tokenizer mismatches leaving a word contextless.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    matches = [d for d in corpus.split_documents(split) if word in d.tokens]
    if k == 0 or not matches:
        return []
    if len(matches) <= k:
        return [d.text for d in matches]
    rng = np.random.default_rng(seed)
    picks = rng.choice(len(matches), size=k, replace=False)
    return [matches[i].text for i in picks]


def shard_documents(corpus: Corpus, n_shards: int) -> Iterable[Corpus]:
    """Split a corpus into contiguous document ranges for parallel counting.

    Tables built per shard and merged must equal the single-shard table
    exactly; the merge is associative.
    """
    if n_shards < 1:
        raise ValueError("n_shards must be >= 1")
    size = (len(corpus.documents) + n_shards - 1) // max(n_shards, 1)
    for start in range(0, max(len(corpus.documents), 1), max(size, 1)):
        yield Corpus(corpus.binning, corpus.documents[start : start + size], {})
