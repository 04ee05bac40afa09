import numpy as np
import pytest

from neolexica.corpus import TimeBinning, build_frequency_table, ingest_corpus
from neolexica.detect import DetectorConfig, detect_candidates, estimate_popularization_time
from neolexica.synth import PlantedNeologism, SyntheticScenario, generate_synthetic


def scenario(**overrides):
    base = dict(
        topics=3,
        words_per_topic=30,
        num_bins=8,
        historical_cutoff_bin=4,
        growth_factors=(1.3, 1.0, 1.0),
        token_budget=60_000,
        planted=(PlantedNeologism("neo000x", 0, 5),),
        sentence_length=10,
        first_year=2001,
        seed=7,
    )
    base.update(overrides)
    return SyntheticScenario(**base)


def binning_for(sc):
    return TimeBinning(
        "year",
        sc.first_year,
        sc.first_year + sc.num_bins - 1,
        sc.first_year + sc.historical_cutoff_bin - 1,
    )


def test_generated_corpus_parses_and_respects_budget(tmp_path):
    sc = scenario()
    stats = generate_synthetic(sc, tmp_path / "c.tsv", tmp_path / "t.tsv")
    assert stats["tokens"] == pytest.approx(sc.token_budget, rel=0.1)
    corpus = ingest_corpus(tmp_path / "c.tsv", binning_for(sc))
    assert len(corpus.documents) == stats["documents"]
    # the tokenizer keeps every generated token
    assert sum(len(d.tokens) for d in corpus.documents) == stats["tokens"]


def test_planted_absent_before_emergence(tmp_path):
    sc = scenario()
    generate_synthetic(sc, tmp_path / "c.tsv", tmp_path / "t.tsv")
    corpus = ingest_corpus(tmp_path / "c.tsv", binning_for(sc))
    table = build_frequency_table(corpus, "full")
    row = table.row("neo000x")
    assert (row[:4] == 0).all()
    assert (row[4:] > 0).all()


def test_detector_recovers_planted_bin(tmp_path):
    sc = scenario()
    generate_synthetic(sc, tmp_path / "c.tsv", tmp_path / "t.tsv")
    corpus = ingest_corpus(tmp_path / "c.tsv", binning_for(sc))
    table = build_frequency_table(corpus, "full")
    assert estimate_popularization_time(table.row("neo000x"), 1 / 300) == 5
    cfg = DetectorConfig(alpha=1 / 300, cutoff_timestep=5, min_total_count=50)
    assert [r.word for r in detect_candidates(table, cfg)] == ["neo000x"]


def test_flat_trends_give_flat_shares(tmp_path):
    sc = scenario(growth_factors=(1.0, 1.0, 1.0), planted=())
    generate_synthetic(sc, tmp_path / "c.tsv", tmp_path / "t.tsv")
    corpus = ingest_corpus(tmp_path / "c.tsv", binning_for(sc))
    table = build_frequency_table(corpus, "full")
    totals = table.totals_per_timestep
    topic0 = [w for w in table.words if w.startswith("w00")]
    shares = np.array([sum(table.row(w)[t] for w in topic0) / totals[t] for t in range(8)])
    assert shares.std() < 0.02


def test_growing_topic_share_increases(tmp_path):
    sc = scenario(planted=())
    generate_synthetic(sc, tmp_path / "c.tsv", tmp_path / "t.tsv")
    corpus = ingest_corpus(tmp_path / "c.tsv", binning_for(sc))
    table = build_frequency_table(corpus, "full")
    totals = table.totals_per_timestep
    topic0 = [w for w in table.words if w.startswith("w00")]
    shares = [sum(table.row(w)[t] for w in topic0) / totals[t] for t in range(8)]
    assert shares[-1] > shares[0]
    assert all(b >= a - 0.02 for a, b in zip(shares, shares[1:]))


def test_truth_file_contents(tmp_path):
    sc = scenario(
        planted=(
            PlantedNeologism("neo000x", 0, 5, "core"),
            PlantedNeologism("neo001x", 1, 6, "sparse"),
        )
    )
    generate_synthetic(sc, tmp_path / "c.tsv", tmp_path / "t.tsv")
    lines = (tmp_path / "t.tsv").read_text().splitlines()
    assert lines[0] == "word\ttopic\temergence_bin\tdensity_class\ttrend_class\ttotal_count"
    rows = {line.split("\t")[0]: line.split("\t") for line in lines[1:]}
    assert rows["neo000x"][1:5] == ["0", "5", "core", "growing"]
    assert rows["neo001x"][1:5] == ["1", "6", "sparse", "flat"]


def test_scenario_validation():
    with pytest.raises(ValueError, match="growth factor"):
        scenario(growth_factors=(1.0, 1.0))
    with pytest.raises(ValueError, match="infeasible"):
        scenario(token_budget=10)
    with pytest.raises(ValueError, match="topic"):
        scenario(planted=(PlantedNeologism("x", 9, 5),))
    with pytest.raises(ValueError):
        PlantedNeologism("x", 0, 5, density_class="funky")


def test_determinism(tmp_path):
    sc = scenario()
    generate_synthetic(sc, tmp_path / "c1.tsv", tmp_path / "t1.tsv")
    generate_synthetic(sc, tmp_path / "c2.tsv", tmp_path / "t2.tsv")
    assert (tmp_path / "c1.tsv").read_bytes() == (tmp_path / "c2.tsv").read_bytes()
