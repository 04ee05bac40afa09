"""Synthetic corpus generator with planted topic trends and neologisms.

Topics are disjoint word inventories whose per-bin token volume follows a
per-topic multiplicative growth factor. Regular sentences draw words
i.i.d. from their topic. Planted neologisms appear only from their
emergence bin: each occurrence is a dedicated sentence whose companion
tokens come either from the target topic (``core`` density class) or from
a mixture of the target topic and all others (``sparse``), which pulls
the word's vector away from the topic cluster and thins its neighborhood.

A ground-truth TSV records every planted word's topic, emergence bin,
density class, and trend class, so detector and metric behavior can be
checked against the construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["PlantedNeologism", "SyntheticScenario", "generate_synthetic"]

_SPARSE_OWN_TOPIC_SHARE = 0.55


@dataclass(frozen=True)
class PlantedNeologism:
    word: str
    topic: int
    emergence_bin: int
    density_class: str = "core"
    weight: float = 2.0

    def __post_init__(self) -> None:
        if self.density_class not in ("core", "sparse"):
            raise ValueError("density_class must be core or sparse")
        if self.weight <= 0:
            raise ValueError("weight must be positive")


@dataclass(frozen=True)
class SyntheticScenario:
    """Layout of a synthetic corpus.

    ``growth_factors[k]`` multiplies topic k's volume per successive bin;
    factor 1.0 is a flat topic. ``historical_cutoff_bin`` is the last bin
    of the Historical split. Word names are fixed-width so control
    matching never fails on length.
    """

    topics: int
    words_per_topic: int
    num_bins: int
    historical_cutoff_bin: int
    growth_factors: tuple[float, ...]
    token_budget: int
    planted: tuple[PlantedNeologism, ...] = ()
    sentence_length: int = 12
    first_year: int = 2001
    seed: int = 0
    base_volumes: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if len(self.growth_factors) != self.topics:
            raise ValueError("need one growth factor per topic")
        if any(f <= 0 for f in self.growth_factors):
            raise ValueError("growth factors must be positive")
        if not (1 <= self.historical_cutoff_bin < self.num_bins):
            raise ValueError("historical_cutoff_bin must be in 1..num_bins-1")
        if self.token_budget < self.topics * self.words_per_topic * self.num_bins:
            raise ValueError(
                "infeasible token budget: need at least "
                f"{self.topics * self.words_per_topic * self.num_bins} tokens"
            )
        for p in self.planted:
            if not (0 <= p.topic < self.topics):
                raise ValueError(f"planted word {p.word!r} targets unknown topic {p.topic}")
            if not (1 <= p.emergence_bin <= self.num_bins):
                raise ValueError(f"planted word {p.word!r} emerges outside the span")

    def topic_words(self, topic: int) -> list[str]:
        return [f"w{topic:02d}x{i:04d}" for i in range(self.words_per_topic)]

    def year_of_bin(self, b: int) -> int:
        return self.first_year + b - 1


def _volumes(scenario: SyntheticScenario) -> np.ndarray:
    base = np.asarray(scenario.base_volumes or [1.0] * scenario.topics, dtype=np.float64)
    factors = np.asarray(scenario.growth_factors, dtype=np.float64)
    bins = np.arange(scenario.num_bins, dtype=np.float64)
    raw = base[:, None] * factors[:, None] ** bins[None, :]
    return raw * (scenario.token_budget / raw.sum())


def generate_synthetic(
    scenario: SyntheticScenario,
    corpus_path: str | Path,
    truth_path: str | Path,
) -> dict:
    """Write the corpus and ground-truth files; returns generation stats."""
    rng = np.random.default_rng(scenario.seed)
    volumes = _volumes(scenario)
    L = scenario.sentence_length
    all_words = [w for t in range(scenario.topics) for w in scenario.topic_words(t)]
    topic_offsets = [t * scenario.words_per_topic for t in range(scenario.topics)]
    planted_by_topic: dict[int, list[PlantedNeologism]] = {}
    for p in scenario.planted:
        planted_by_topic.setdefault(p.topic, []).append(p)

    doc_counter = 0
    tokens_written = 0
    planted_tokens = {p.word: 0 for p in scenario.planted}
    with open(corpus_path, "w", encoding="utf-8", newline="\n") as fh:

        def emit(year: int, words: list[str]) -> None:
            nonlocal doc_counter, tokens_written
            fh.write(f"d{doc_counter:08d}\t{year}\t{' '.join(words)}\n")
            doc_counter += 1
            tokens_written += len(words)

        for b in range(1, scenario.num_bins + 1):
            year = scenario.year_of_bin(b)
            for topic in range(scenario.topics):
                volume = volumes[topic, b - 1]
                per_word_tokens = volume / scenario.words_per_topic
                active = [
                    p for p in planted_by_topic.get(topic, ()) if b >= p.emergence_bin
                ]
                occurrences = [
                    max(1, int(round(p.weight * per_word_tokens))) for p in active
                ]
                # planted sentences are charged against the topic's bin volume
                remaining = volume - L * sum(occurrences)
                n_sentences = int(round(max(remaining, 0.0) / L))
                if not active:
                    n_sentences = max(1, n_sentences)
                offset = topic_offsets[topic]
                if n_sentences:
                    draws = rng.integers(0, scenario.words_per_topic, size=(n_sentences, L))
                    for row in draws:
                        emit(year, [all_words[offset + i] for i in row])
                for p, n_occurrences in zip(active, occurrences):
                    companions = _companion_draws(
                        rng, scenario, topic, p.density_class, n_occurrences, L - 1
                    )
                    positions = rng.integers(0, L, size=n_occurrences)
                    for k in range(n_occurrences):
                        words = [all_words[i] for i in companions[k]]
                        words.insert(int(positions[k]), p.word)
                        emit(year, words)
                        planted_tokens[p.word] += 1

    with open(truth_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("word\ttopic\temergence_bin\tdensity_class\ttrend_class\ttotal_count\n")
        for p in sorted(scenario.planted, key=lambda p: p.word):
            trend = "growing" if scenario.growth_factors[p.topic] > 1.0 else "flat"
            fh.write(
                f"{p.word}\t{p.topic}\t{p.emergence_bin}\t{p.density_class}\t"
                f"{trend}\t{planted_tokens[p.word]}\n"
            )
    return {
        "documents": doc_counter,
        "tokens": tokens_written,
        "planted_tokens": planted_tokens,
    }


def _companion_draws(
    rng: np.random.Generator,
    scenario: SyntheticScenario,
    topic: int,
    density_class: str,
    n: int,
    width: int,
) -> np.ndarray:
    """Companion token indices into the global word list."""
    total_words = scenario.topics * scenario.words_per_topic
    own = rng.integers(0, scenario.words_per_topic, size=(n, width)) + topic * scenario.words_per_topic
    if density_class == "core" or scenario.topics == 1:
        return own
    anywhere = rng.integers(0, total_words, size=(n, width))
    mix = rng.random((n, width)) < _SPARSE_OWN_TOPIC_SHARE
    return np.where(mix, own, anywhere)
