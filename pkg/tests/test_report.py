import json
import math

import numpy as np
import pytest

from neolexica.matching import ControlPair
from neolexica.metrics import MetricsRecord
from neolexica.report import (
    emit_plots,
    emit_report,
    formation_tally,
    report_payload,
    stars_for_p,
    summarize,
)


def record(word, group, tau, d=1.0, m=0.5, r=0.1, m_flag="", r_flag=""):
    return MetricsRecord(word, group, tau, 3, d, (), m, m_flag, r, r_flag)


def paired_fixture(n=12, delta=0.0, tau=0.4, seed=0):
    rng = np.random.default_rng(seed)
    records, pairs = [], []
    for i in range(n):
        neo, ctrl = f"neo{i:02d}", f"ctl{i:02d}"
        base = rng.standard_normal()
        records.append(record(neo, "neologism", tau, d=1.0 + 0.1 * i, r=base + delta))
        records.append(record(ctrl, "control", tau, d=1.0, r=base + rng.normal(0, 0.05)))
        pairs.append(ControlPair(neo, ctrl, 0.5, 0.001, 1))
    return records, pairs


def test_stars_thresholds():
    assert stars_for_p(0.0005) == "***"
    assert stars_for_p(0.005) == "**"
    assert stars_for_p(0.03) == "*"
    assert stars_for_p(0.2) == "none"
    # boundaries are strict
    assert stars_for_p(0.05) == "none"
    assert stars_for_p(0.01) == "*"
    assert stars_for_p(0.001) == "**"


def test_summarize_planted_effect():
    records, pairs = paired_fixture(n=20, delta=0.8)
    summaries, tests = summarize(records, pairs, [0.4])
    r_test = next(t for t in tests if t.metric == "r")
    assert r_test.p_value is not None and r_test.p_value < 0.05
    neo = next(s for s in summaries if s.metric == "r" and s.group == "neologism")
    ctl = next(s for s in summaries if s.metric == "r" and s.group == "control")
    assert neo.mean - ctl.mean > 0
    assert neo.n == ctl.n == 20


def test_summarize_degenerate_cell():
    records, pairs = [], []
    for i in range(4):
        records.append(record(f"neo{i}", "neologism", 0.4, d=2.0, m=0.1, r=0.2))
        records.append(record(f"ctl{i}", "control", 0.4, d=2.0, m=0.1, r=0.2))
        pairs.append(ControlPair(f"neo{i}", f"ctl{i}", 0.5, 0.0, 0))
    _, tests = summarize(records, pairs, [0.4])
    for t in tests:
        assert t.p_value is None
        assert t.stars == "none"


def test_summarize_excludes_undefined_and_counts():
    records = [
        record("neo00", "neologism", 0.4, m=float("nan"), m_flag="undefined"),
        record("neo01", "neologism", 0.4, m=0.6),
        record("ctl00", "control", 0.4, m=0.2),
        record("ctl01", "control", 0.4, m=0.3),
    ]
    pairs = [
        ControlPair("neo00", "ctl00", 0.5, 0.0, 0),
        ControlPair("neo01", "ctl01", 0.5, 0.0, 0),
    ]
    summaries, tests = summarize(records, pairs, [0.4])
    m_neo = next(s for s in summaries if s.metric == "m" and s.group == "neologism")
    assert m_neo.n == 1 and m_neo.mean == 0.6
    m_test = next(t for t in tests if t.metric == "m")
    assert m_test.n_pairs == 1  # the undefined pair is dropped


def test_summarize_untestable_cell():
    records = [record("neo00", "neologism", 0.4)]
    summaries, tests = summarize(records, [], [0.4])
    ctl = next(s for s in summaries if s.group == "control" and s.metric == "d")
    assert ctl.n == 0 and ctl.mean is None
    assert all(t.p_value is None and t.n_pairs == 0 for t in tests)


def test_standard_error_scaling(rng):
    # duplicating a group 4x with iid noise of fixed variance halves the SE
    base = rng.standard_normal(50)
    small = [record(f"n{i:03d}", "neologism", 0.4, r=float(v)) for i, v in enumerate(base)]
    big_values = rng.standard_normal(200)
    big = [record(f"n{i:03d}", "neologism", 0.4, r=float(v)) for i, v in enumerate(big_values)]
    s_small, _ = summarize(small, [], [0.4])
    s_big, _ = summarize(big, [], [0.4])
    se_small = next(s for s in s_small if s.metric == "r" and s.group == "neologism").standard_error
    se_big = next(s for s in s_big if s.metric == "r" and s.group == "neologism").standard_error
    assert se_big == pytest.approx(se_small / 2, rel=0.15)


def test_emit_report_roundtrip_and_determinism(tmp_path):
    records, pairs = paired_fixture(n=8, delta=0.3)
    summaries, tests = summarize(records, pairs, [0.4])
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    emit_report(summaries, tests, out1, records=records, config_digest="abc", grid=[0.4])
    emit_report(summaries, tests, out2, records=records, config_digest="abc", grid=[0.4])
    b1 = (out1 / "report.json").read_bytes()
    assert b1 == (out2 / "report.json").read_bytes()
    assert (out1 / "per_word.tsv").read_bytes() == (out2 / "per_word.tsv").read_bytes()

    payload = json.loads(b1)
    assert payload["config_digest"] == "abc"
    assert payload["grid"] == [0.4]
    assert payload == report_payload(summaries, tests, "abc", [0.4])
    cell = payload["metrics"][0]
    assert set(cell) == {"metric", "tau", "groups", "test"}
    assert set(cell["groups"]["neologism"]) == {"mean", "se", "n"}
    assert set(cell["test"]) == {"statistic", "p", "n_pairs", "stars"}


def test_emit_report_empty_error(tmp_path):
    with pytest.raises(ValueError):
        emit_report([], [], tmp_path)


def test_emit_plots_structure_and_determinism(tmp_path):
    records, pairs = paired_fixture(n=15, delta=0.9)
    summaries, tests = summarize(records, pairs, [0.4])
    out1, out2 = tmp_path / "p1", tmp_path / "p2"
    paths1 = emit_plots(summaries, tests, out1)
    emit_plots(summaries, tests, out2)
    assert [p.name for p in paths1] == ["plot_d.svg", "plot_m.svg", "plot_r.svg"]
    for p in paths1:
        assert p.read_bytes() == (out2 / p.name).read_bytes()
    svg = (out1 / "plot_r.svg").read_text()
    assert svg.startswith("<svg ")
    assert svg.count("<rect") >= 3  # background + one bar per group (+legend)
    assert "cosine threshold tau" in svg
    r_test = next(t for t in tests if t.metric == "r")
    if r_test.stars != "none":
        assert f">{r_test.stars}<" in svg
    assert svg.count('stroke="#333333"') >= 6  # error whiskers


def test_emit_plots_single_cell(tmp_path):
    records = [
        record("neo00", "neologism", 0.4, d=2.0),
        record("ctl00", "control", 0.4, d=1.0),
    ]
    summaries, tests = summarize(records, [], [0.4])
    paths = emit_plots(summaries, tests, tmp_path)
    svg = (tmp_path / "plot_d.svg").read_text()
    assert svg.count('fill="#4c72b0"') >= 1 and svg.count('fill="#c44e52"') >= 1


def test_emit_plots_golden_digests(tmp_path):
    """Byte-level golden for a fixed fixture, pinned after visual inspection."""
    import hashlib

    records, pairs = [], []
    for i in range(10):
        neo, ctl = f"neo{i:02d}", f"ctl{i:02d}"
        for tau in (0.3, 0.4, 0.5):
            records.append(
                MetricsRecord(neo, "neologism", tau, 3, 1.2 - tau, (), 0.6, "", 0.02 + 0.001 * i, "")
            )
            records.append(
                MetricsRecord(ctl, "control", tau, 5, 1.8 - tau, (), -0.4, "", -0.015 - 0.001 * i, "")
            )
        pairs.append(ControlPair(neo, ctl, 0.5, 0.001, 1))
    summaries, tests = summarize(records, pairs, [0.3, 0.4, 0.5])
    emit_plots(summaries, tests, tmp_path)
    golden = {
        "plot_d.svg": "18b31060affe4803558799299267bf1c723186871447b231c4e190cc6cfc32c0",
        "plot_m.svg": "5b9f6c266b0d73eec802e2593d627fdfb289dacc27fa4091f36f35028659237f",
        "plot_r.svg": "80331670343d74aea2e1099874088c5678d96e71c5db93de52bf5edf4a53227f",
    }
    for name, expected in golden.items():
        got = hashlib.sha256((tmp_path / name).read_bytes()).hexdigest()
        assert got == expected, name


def test_formation_tally_multilabel(tmp_path):
    path = tmp_path / "ann.tsv"
    path.write_text("bodycam\tcompound,abbreviation\n")
    tally = formation_tally(path)
    assert tally.total_words == 1
    assert tally.percentages["compound"] == 100.0
    assert tally.percentages["abbreviation"] == 100.0
    assert tally.percentages["blend"] == 0.0


def test_formation_tally_empty(tmp_path):
    path = tmp_path / "empty.tsv"
    path.write_text("")
    tally = formation_tally(path)
    assert tally.total_words == 0
    assert tally.percentages == {}


def test_formation_tally_unknown_category(tmp_path):
    path = tmp_path / "bad.tsv"
    path.write_text("okword\tcompound\nbadword\tmystery\n")
    with pytest.raises(ValueError, match=r"bad.tsv:2.*mystery"):
        formation_tally(path)


def test_formation_tally_hand_count(tmp_path):
    rows = []
    expected = {"compound": 0, "blend": 0, "spelling": 0}
    for i in range(20):
        cats = []
        if i % 2 == 0:
            cats.append("compound")
            expected["compound"] += 1
        if i % 4 == 0:
            cats.append("blend")
            expected["blend"] += 1
        if not cats:
            cats.append("spelling")
            expected["spelling"] += 1
        rows.append(f"w{i:02d}\t{','.join(cats)}")
    path = tmp_path / "ann.tsv"
    path.write_text("\n".join(rows) + "\n")
    tally = formation_tally(path)
    assert tally.total_words == 20
    for cat, n in expected.items():
        assert tally.percentages[cat] == pytest.approx(100.0 * n / 20)
    # multi-label: percentages may sum past 100
    assert sum(tally.percentages.values()) > 100.0
