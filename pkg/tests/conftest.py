import numpy as np
import pytest

from neolexica.corpus import Corpus, Document, TimeBinning


def make_corpus(docs, binning=None):
    """Build a Corpus from (id, year, text) triples using the default rules."""
    from neolexica.tokenizer import tokenize_text

    if binning is None:
        years = [y for _, y, _ in docs]
        binning = TimeBinning("year", min(years), max(years) + 1, min(years))
    documents = []
    for doc_id, year, text in docs:
        tokens = tuple(tokenize_text(text))
        if tokens:
            documents.append(Document(doc_id, year, binning.bin_index(year), tokens, text))
    return Corpus(binning, documents, {})


def topic_corpus(
    n_topics,
    words_per_topic,
    n_sentences,
    sentence_length=10,
    seed=0,
    year=2001,
    binning=None,
):
    """Sentences drawn i.i.d. within round-robin topics; disjoint vocabularies."""
    rng = np.random.default_rng(seed)
    topics = [
        [f"t{t}w{i:03d}" for i in range(words_per_topic)] for t in range(n_topics)
    ]
    docs = []
    draws = rng.integers(0, words_per_topic, (n_sentences, sentence_length))
    for s in range(n_sentences):
        words = [topics[s % n_topics][i] for i in draws[s]]
        docs.append((f"d{s:06d}", year, " ".join(words)))
    return make_corpus(docs, binning), topics


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_runtest_logreport(report):
    # one visible pass/fail line per acceptance criterion
    if report.when == "call" and "test_acceptance" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        outcome = "PASS" if report.passed else "FAIL"
        print(f"\nACCEPTANCE {name}: {outcome}", flush=True)
