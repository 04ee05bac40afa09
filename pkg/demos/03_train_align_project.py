"""Train two skip-gram spaces, align them, and project a new word.

Two small corpora share vocabulary except for one word ("newbie") that
only exists in the modern period. After orthogonal Procrustes alignment
over the shared words, the modern vector of "newbie" is projected into
the historical axes and its neighborhood inspected there.
"""

import numpy as np

from neolexica import (
    SGNSHyperparams,
    TimeBinning,
    cosine,
    neighborhood,
    procrustes_align,
    project,
    train_sgns,
)
from neolexica.corpus import Corpus, Document


def build_corpus(seed=0):
    rng = np.random.default_rng(seed)
    animals = [f"animal{i:02d}" for i in range(25)]
    tools = [f"tool{i:02d}" for i in range(25)]
    binning = TimeBinning("year", 2000, 2010, 2005)
    docs = []
    for s in range(12_000):
        year = 2000 + s % 11
        topic = animals if s % 2 == 0 else tools
        words = [topic[i] for i in rng.integers(0, 25, 10)]
        if year > 2005 and s % 40 == 0:  # "newbie" appears among animals, modern only
            words[rng.integers(0, 10)] = "newbie"
        docs.append(Document(f"d{s}", year, binning.bin_index(year), tuple(words), ""))
    return Corpus(binning, docs, {})


corpus = build_corpus()
hyper = SGNSHyperparams(window=4, dim=24, negatives=5, epochs=3, initial_step=0.1, subsample=0.0)
historical = train_sgns(corpus, "historical", hyper, seed=1)
modern = train_sgns(corpus, "modern", hyper, seed=2)
print(f"historical space: {len(historical)} words; modern: {len(modern)} words")
assert "newbie" not in historical and "newbie" in modern

transform = procrustes_align(modern, historical)
print(f"aligned on {transform.anchor_count} anchors, residual {transform.residual:.3f}")

query = project(modern, transform, "newbie")
hood = neighborhood(historical, query, "newbie", tau=0.4)
kinds = {w.rstrip("0123456789") for w in hood.members}
print(f"|N_0.4(newbie)| = {len(hood)} historical neighbors, kinds: {sorted(kinds)}")
an = np.mean([cosine(query, historical.vector(w)) for w in historical.words if w.startswith("animal")])
to = np.mean([cosine(query, historical.vector(w)) for w in historical.words if w.startswith("tool")])
print(f"mean cosine to animal words {an:.2f} vs tool words {to:.2f}")
