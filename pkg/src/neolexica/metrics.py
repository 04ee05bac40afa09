"""Neighborhood statistics over a tau grid.

For a word's neighborhood in the historical space, four statistics are
computed per cosine threshold tau: the density ``ln(|N| + 1)``, the share
series (fraction of each timestep's vocabulary tokens contributed by the
neighborhood), the monotonicity of that series (Spearman correlation with
the timesteps), and its least-squares growth slope normalized by the
density. Empty neighborhoods get density 0 but undefined monotonicity and
slope; they are flagged and excluded from aggregation rather than zeroed,
which would bias group means toward the null.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .corpus import FrequencyTable, Vocabulary
from .embeddings import EmbeddingSpace, NeighborhoodSet, _scan_cosines
from .stats import spearman_rho

__all__ = [
    "DEFAULT_TAU_GRID",
    "TauGrid",
    "MetricsRecord",
    "density",
    "share_series",
    "monotonicity",
    "slope",
    "evaluate_word_set",
    "write_metrics_tsv",
    "read_metrics_tsv",
]

DEFAULT_TAU_GRID = (0.30, 0.35, 0.40, 0.45, 0.50, 0.55, 0.60)

FLAG_OK = ""
FLAG_CONSTANT = "constant"
FLAG_UNDEFINED = "undefined"


@dataclass(frozen=True)
class TauGrid:
    """Strictly ascending cosine thresholds in (0, 1)."""

    thresholds: tuple[float, ...] = DEFAULT_TAU_GRID

    def __post_init__(self) -> None:
        t = self.thresholds
        if not t:
            raise ValueError("tau grid must be non-empty")
        if any(not (0.0 < x < 1.0) for x in t):
            raise ValueError("tau values must lie in (0, 1)")
        if any(t[i] >= t[i + 1] for i in range(len(t) - 1)):
            raise ValueError("tau grid must be strictly ascending")

    def __iter__(self):
        return iter(self.thresholds)


@dataclass(frozen=True)
class MetricsRecord:
    """One word's statistics at one tau."""

    word: str
    group: str
    tau: float
    neighborhood_size: int
    density_d: float
    share_series_p: tuple[float, ...]
    monotonicity_m: float
    m_flag: str
    slope_r: float
    r_flag: str


def density(neighborhood_size: int) -> float:
    """Natural log of (size + 1); 0 for an empty neighborhood."""
    if neighborhood_size < 0:
        raise ValueError("neighborhood size must be >= 0")
    return math.log(neighborhood_size + 1)


def share_series(
    neighborhood: NeighborhoodSet | Sequence[str],
    table: FrequencyTable,
    vocab: Vocabulary,
) -> np.ndarray:
    """Fraction of each timestep's vocabulary tokens used on the neighborhood.

    ``p[t] = sum_{u in N} c_t(u) / sum_{u in V} c_t(u)``. Timesteps whose
    denominator is zero are NaN (flagged-undefined downstream).
    """
    members = neighborhood.members if isinstance(neighborhood, NeighborhoodSet) else tuple(neighborhood)
    denominator = _vocab_totals(table, vocab).astype(np.float64)
    numerator = np.zeros(table.num_timesteps, dtype=np.int64)
    for word in members:
        numerator += table.row(word)
    with np.errstate(invalid="ignore", divide="ignore"):
        p = numerator / denominator
    p[denominator == 0] = np.nan
    return p


def _vocab_totals(table: FrequencyTable, vocab: Vocabulary) -> np.ndarray:
    totals = np.zeros(table.num_timesteps, dtype=np.int64)
    for word in vocab.entries:
        totals += table.row(word)
    return totals


def monotonicity(p: np.ndarray) -> tuple[float, str]:
    """Spearman correlation of the share series with its timesteps.

    NaN entries are excluded. Returns (value, flag): a constant series is
    (0.0, "constant") by convention; fewer than two defined timesteps is
    (nan, "undefined").
    """
    p = np.asarray(p, dtype=np.float64)
    defined = np.flatnonzero(~np.isnan(p))
    if defined.size < 2:
        return float("nan"), FLAG_UNDEFINED
    values = p[defined]
    if (values == values[0]).all():
        return 0.0, FLAG_CONSTANT
    t = defined + 1.0
    return spearman_rho(t, values), FLAG_OK


def slope(p: np.ndarray, density_d: float) -> tuple[float, str]:
    """Least-squares slope of the share series over time, divided by density.

    Undefined (nan, "undefined") for an empty neighborhood (density 0) or
    fewer than two defined timesteps.
    """
    p = np.asarray(p, dtype=np.float64)
    defined = np.flatnonzero(~np.isnan(p))
    if density_d <= 0.0 or defined.size < 2:
        return float("nan"), FLAG_UNDEFINED
    t = defined + 1.0
    values = p[defined]
    t_centered = t - t.mean()
    raw = float(t_centered @ (values - values.mean())) / float(t_centered @ t_centered)
    return raw / density_d, FLAG_OK


def evaluate_word_set(
    query_vectors: Mapping[str, np.ndarray],
    space: EmbeddingSpace,
    table: FrequencyTable,
    vocab: Vocabulary,
    grid: TauGrid | Sequence[float] = TauGrid(),
    group: str = "neologism",
    closed: bool = True,
    exclude: Sequence[str] = (),
) -> list[MetricsRecord]:
    """All four statistics for every (word, tau) over the historical space.

    The cosine scan against the space runs once per word and is
    thresholded per tau, which returns exactly the per-tau exact-scan
    neighborhoods. Output is sorted by (word, tau).
    """
    taus = tuple(grid)
    denominator = _vocab_totals(table, vocab).astype(np.float64)
    space_rows = np.array([table._index[w] for w in space.words], dtype=np.int64)
    counts = table.counts[space_rows]
    skip_always = set(exclude)
    records: list[MetricsRecord] = []
    for word in sorted(query_vectors):
        sims = _scan_cosines(space, query_vectors[word])
        keep = np.array([w != word and w not in skip_always for w in space.words])
        for tau in taus:
            mask = (sims >= tau if closed else sims > tau) & keep
            size = int(mask.sum())
            d = density(size)
            numerator = counts[mask].sum(axis=0)
            with np.errstate(invalid="ignore", divide="ignore"):
                p = numerator / denominator
            p[denominator == 0] = np.nan
            m, m_flag = monotonicity(p)
            r, r_flag = slope(p, d)
            records.append(
                MetricsRecord(
                    word, group, float(tau), size, d,
                    tuple(float(x) for x in p), m, m_flag, r, r_flag,
                )
            )
    return records


def _fmt(x: float) -> str:
    return "nan" if math.isnan(x) else repr(float(x))


def write_metrics_tsv(records: Sequence[MetricsRecord], path: str | Path) -> None:
    """Per-word metrics TSV: word, group, tau, size, d, m, r, flags."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("word\tgroup\ttau\tneighborhood_size\td\tm\tr\tflags\n")
        for rec in records:
            flags = ";".join(
                f"{name}={flag}"
                for name, flag in (("m", rec.m_flag), ("r", rec.r_flag))
                if flag
            )
            fh.write(
                f"{rec.word}\t{rec.group}\t{rec.tau!r}\t{rec.neighborhood_size}\t"
                f"{_fmt(rec.density_d)}\t{_fmt(rec.monotonicity_m)}\t"
                f"{_fmt(rec.slope_r)}\t{flags or '-'}\n"
            )


def read_metrics_tsv(path: str | Path) -> list[MetricsRecord]:
    """Read back a metrics TSV (share series are not persisted)."""
    records = []
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            word, group, tau, size, d, m, r, flags = line.rstrip("\n").split("\t")
            m_flag = r_flag = FLAG_OK
            if flags != "-":
                for item in flags.split(";"):
                    name, value = item.split("=")
                    if name == "m":
                        m_flag = value
                    elif name == "r":
                        r_flag = value
            records.append(
                MetricsRecord(
                    word, group, float(tau), int(size), float(d), (),
                    float(m), m_flag, float(r), r_flag,
                )
            )
    return records
