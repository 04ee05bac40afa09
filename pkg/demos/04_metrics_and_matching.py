"""Neighborhood metrics and control matching on hand-built structures.

Computes the four per-word statistics (density, share series,
monotonicity, slope) over a tau grid for a toy space, then pairs
neologisms with percentile-, length-, and cosine-matched controls via
maximum bipartite matching.
"""

import numpy as np

from neolexica import (
    MatchConstraints,
    build_eligibility_graph,
    build_vocabulary,
    evaluate_word_set,
    match_controls,
)
from neolexica.corpus import FrequencyTable
from neolexica.embeddings import EmbeddingSpace

rng = np.random.default_rng(4)

# two clusters of historical words with different frequency trajectories
cluster_a = [f"grow{i:02d}" for i in range(10)]   # counts rise over time
cluster_b = [f"fade{i:02d}" for i in range(10)]   # counts sink over time
words = cluster_a + cluster_b
dirs = np.vstack(
    [np.array([1.0, 0.0]) + rng.normal(0, 0.15, 2) for _ in cluster_a]
    + [np.array([0.0, 1.0]) + rng.normal(0, 0.15, 2) for _ in cluster_b]
)
space = EmbeddingSpace(words, dirs, "sgns-historical")

T = 6
counts = np.vstack(
    [[40 + 12 * t for t in range(T)] for _ in cluster_a]
    + [[100 - 12 * t for t in range(T)] for _ in cluster_b]
)
table = FrequencyTable(words, counts)
vocab = build_vocabulary(table, len(words))

queries = {"neargrow": np.array([1.0, 0.1]), "nearfade": np.array([0.1, 1.0])}
records = evaluate_word_set(queries, space, table, vocab, (0.4, 0.6), "neologism")
print("word        tau   |N|  density  monotonicity  slope")
for r in records:
    print(
        f"{r.word:10} {r.tau:.2f} {r.neighborhood_size:4d}  {r.density_d:7.3f}"
        f"  {r.monotonicity_m:12.3f}  {r.slope_r:+.5f}"
    )

# control matching: same percentile band, similar length, cosine above floor
modern_vocab = build_vocabulary(
    FrequencyTable(["neargrow", "nearfade"], np.array([[300], [290]])), 2
)
graph, skipped = build_eligibility_graph(
    list(queries),
    queries,
    space,
    modern_vocab,
    vocab,
    MatchConstraints(percentile_tolerance=0.6, length_tolerance=3, cosine_floor=0.4),
)
pairs, unmatched = match_controls(graph)
print("\nmatched pairs:")
for p in pairs:
    print(
        f"  {p.neologism} -> {p.control}  cosine={p.cosine:.2f} "
        f"rank_gap={p.rank_percentile_gap:.2f} len_gap={p.length_gap}"
    )
if unmatched:
    print("unmatched:", unmatched)
