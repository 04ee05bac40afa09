"""Pair neologisms with control words via maximum bipartite matching.

A control word for a neologism must sit in the same frequency-rank
percentile of its vocabulary (within a tolerance), have a similar length,
and be semantically close (cosine above a floor) in the historical space.
Eligible (neologism, control) edges form a bipartite graph; a maximum
matching assigns each control to at most one neologism. Edges are visited
in lexicographic order so the returned matching, among the possibly many
maximum ones, is deterministic.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import Vocabulary
from .embeddings import EmbeddingSpace

__all__ = [
    "MatchConstraints",
    "EligibleEdge",
    "ControlPair",
    "rank_percentile",
    "build_eligibility_graph",
    "match_controls",
    "hopcroft_karp",
    "write_pairs",
    "read_pairs",
    "write_unmatched",
]


@dataclass(frozen=True)
class MatchConstraints:
    """Eligibility thresholds for neologism-control pairing."""

    percentile_tolerance: float = 0.01
    length_tolerance: int = 3
    cosine_floor: float = 0.4

    def __post_init__(self) -> None:
        if self.percentile_tolerance < 0 or self.length_tolerance < 0:
            raise ValueError("tolerances must be nonnegative")
        if not (-1.0 < self.cosine_floor < 1.0):
            raise ValueError("cosine_floor must be in (-1, 1)")


@dataclass(frozen=True)
class EligibleEdge:
    control: str
    cosine: float
    rank_percentile_gap: float
    length_gap: int


@dataclass(frozen=True)
class ControlPair:
    """A matched neologism-control pair with the values that qualified it."""

    neologism: str
    control: str
    cosine: float
    rank_percentile_gap: float
    length_gap: int

    def check(self, constraints: MatchConstraints) -> None:
        ok = (
            self.rank_percentile_gap <= self.percentile_bound(constraints)
            and self.length_gap <= constraints.length_tolerance
            and self.cosine >= constraints.cosine_floor
        )
        if not ok:
            raise ValueError(f"pair ({self.neologism}, {self.control}) violates constraints")

    @staticmethod
    def percentile_bound(constraints: MatchConstraints) -> float:
        # tiny slack so a stored float gap equal to the tolerance re-checks true
        return constraints.percentile_tolerance * (1.0 + 1e-12)


def rank_percentile(word: str, vocab: Vocabulary) -> float:
    """Frequency-rank percentile ``rank / |V|`` in (0, 1]."""
    if word not in vocab:
        raise KeyError(f"word not in vocabulary: {word!r}")
    return vocab.rank[word] / len(vocab)


def build_eligibility_graph(
    neologisms: Sequence[str],
    query_vectors: Mapping[str, np.ndarray],
    historical_space: EmbeddingSpace,
    modern_vocab: Vocabulary,
    historical_vocab: Vocabulary,
    constraints: MatchConstraints = MatchConstraints(),
    excluded_controls: Sequence[str] = (),
) -> tuple[dict[str, list[EligibleEdge]], list[str]]:
    """Compute eligible control edges for each neologism.

    Control candidates are historical-vocabulary words present in the
    historical space, minus the neologisms themselves and
    ``excluded_controls`` (typically the full candidate-neologism list).
    The percentile test compares integer rank cross-products, so a gap
    exactly equal to the tolerance passes regardless of float rounding.
    Returns the adjacency plus the neologisms skipped for lack of a vector
    or a modern rank.
    """
    banned = set(excluded_controls) | set(neologisms)
    controls = [
        w for w in historical_vocab.entries if w in historical_space and w not in banned
    ]
    ctrl_rows = [historical_space._index[w] for w in controls]
    ctrl_units = historical_space.unit_matrix()[ctrl_rows]
    ctrl_ranks = np.array([historical_vocab.rank[w] for w in controls], dtype=np.int64)
    ctrl_lengths = np.array([len(w) for w in controls], dtype=np.int64)
    n_hist = len(historical_vocab)
    n_mod = len(modern_vocab)

    graph: dict[str, list[EligibleEdge]] = {}
    skipped: list[str] = []
    for word in neologisms:
        vector = query_vectors.get(word)
        if vector is None or word not in modern_vocab:
            skipped.append(word)
            continue
        q = np.asarray(vector, dtype=np.float64)
        nq = np.linalg.norm(q)
        if nq == 0.0:
            skipped.append(word)
            continue
        sims = np.clip(ctrl_units @ (q / nq), -1.0, 1.0)
        z_m = modern_vocab.rank[word]
        # |z_m/n_mod - z_h/n_hist| <= tol, via integer cross-multiplication
        rank_ok = (
            np.abs(z_m * n_hist - ctrl_ranks * n_mod)
            <= constraints.percentile_tolerance * n_mod * n_hist
        )
        length_ok = np.abs(len(word) - ctrl_lengths) <= constraints.length_tolerance
        cos_ok = sims >= constraints.cosine_floor
        hits = np.flatnonzero(rank_ok & length_ok & cos_ok)
        edges = [
            EligibleEdge(
                controls[i],
                float(sims[i]),
                # single division keeps boundary gaps exact (100/10000 == 0.01)
                abs(int(z_m * n_hist - ctrl_ranks[i] * n_mod)) / (n_mod * n_hist),
                abs(len(word) - int(ctrl_lengths[i])),
            )
            for i in hits
        ]
        edges.sort(key=lambda e: e.control)
        graph[word] = edges
    return graph, skipped


def hopcroft_karp(adjacency: Mapping[str, Sequence[str]]) -> dict[str, str]:
    """Maximum-cardinality matching of a bipartite graph, left -> right.

    Left vertices are processed in sorted order and adjacency lists in
    the given order, which pins a single deterministic matching.
    """
    INF = -1
    left = sorted(adjacency)
    pair_left: dict[str, str] = {}
    pair_right: dict[str, str] = {}
    dist: dict[str, int] = {}

    def bfs() -> bool:
        queue: deque[str] = deque()
        for u in left:
            if u not in pair_left:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        reachable_free = False
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                w = pair_right.get(v)
                if w is None:
                    reachable_free = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return reachable_free

    def dfs(root: str) -> bool:
        # iterative, so augmenting paths longer than the recursion limit work
        stack = [root]
        iters = {root: iter(adjacency[root])}
        trying: dict[str, str] = {}
        while stack:
            u = stack[-1]
            advanced = False
            for v in iters[u]:
                w = pair_right.get(v)
                if w is None:
                    trying[u] = v
                    for x in stack:
                        pair_left[x] = trying[x]
                        pair_right[trying[x]] = x
                    return True
                if dist.get(w) == dist[u] + 1 and w not in iters:
                    trying[u] = v
                    iters[w] = iter(adjacency[w])
                    stack.append(w)
                    advanced = True
                    break
            if not advanced:
                dist[u] = INF
                stack.pop()
        return False

    while bfs():
        for u in left:
            if u not in pair_left:
                dfs(u)
    return pair_left


def match_controls(
    graph: Mapping[str, Sequence[EligibleEdge]],
) -> tuple[list[ControlPair], dict[str, str]]:
    """Run maximum matching over an eligibility graph.

    Returns the matched pairs (sorted by neologism) and a map of
    unmatched neologisms to the reason: ``no-eligible-edge`` when the
    word had no edges at all, ``lost-in-matching`` when every eligible
    control went to another neologism.
    """
    adjacency = {w: [e.control for e in edges] for w, edges in graph.items()}
    matching = hopcroft_karp(adjacency)
    pairs = []
    unmatched: dict[str, str] = {}
    for word in sorted(graph):
        control = matching.get(word)
        if control is None:
            unmatched[word] = "no-eligible-edge" if not graph[word] else "lost-in-matching"
            continue
        edge = next(e for e in graph[word] if e.control == control)
        pairs.append(
            ControlPair(word, control, edge.cosine, edge.rank_percentile_gap, edge.length_gap)
        )
    return pairs, unmatched


def write_pairs(pairs: Sequence[ControlPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("neologism\tcontrol\tcosine\trank_percentile_gap\tlength_gap\n")
        for p in pairs:
            fh.write(
                f"{p.neologism}\t{p.control}\t{p.cosine!r}\t"
                f"{p.rank_percentile_gap!r}\t{p.length_gap}\n"
            )


def read_pairs(path: str | Path) -> list[ControlPair]:
    pairs = []
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            neo, ctrl, cos, gap, lgap = line.rstrip("\n").split("\t")
            pairs.append(ControlPair(neo, ctrl, float(cos), float(gap), int(lgap)))
    return pairs


def write_unmatched(unmatched: Mapping[str, str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("word\treason\n")
        for word in sorted(unmatched):
            fh.write(f"{word}\t{unmatched[word]}\n")
