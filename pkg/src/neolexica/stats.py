"""Rank statistics: Spearman correlation and the Wilcoxon signed-rank test.

The Wilcoxon test discards zero differences, ranks absolute differences
with average ranks for ties, and reports W+ (the positive-rank sum). For
25 or fewer nonzero differences the two-sided p-value is exact, computed
by dynamic programming over the distribution of W+ under sign flips
(doubled ranks keep everything in integers, ties included). Larger
samples use the normal approximation with tie correction and continuity
correction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = ["rankdata_average", "spearman_rho", "wilcoxon_signed_rank", "WilcoxonResult"]

EXACT_LIMIT = 25


def rankdata_average(values: Sequence[float] | np.ndarray) -> np.ndarray:
    """1-based ranks with ties assigned the average of their positions."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.shape[0], dtype=np.float64)
    sorted_values = values[order]
    i = 0
    while i < len(sorted_values):
        j = i
        while j + 1 < len(sorted_values) and sorted_values[j + 1] == sorted_values[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman_rho(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> float:
    """Pearson correlation of average-ranked values, in [-1, 1].

    Returns 0.0 when either input is constant (the correlation is then
    undefined; callers that need to distinguish should test for constant
    input themselves).
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("spearman_rho needs two equal-length vectors of length >= 2")
    if (x == x[0]).all() or (y == y[0]).all():
        return 0.0
    rx = rankdata_average(x)
    ry = rankdata_average(y)
    rx -= rx.mean()
    ry -= ry.mean()
    denom = math.sqrt(float(rx @ rx) * float(ry @ ry))
    return float(np.clip(float(rx @ ry) / denom, -1.0, 1.0))


@dataclass(frozen=True)
class WilcoxonResult:
    statistic: float  # W+, the positive-rank sum
    p_value: float
    n: int  # nonzero differences used
    exact: bool


def _exact_two_sided_p(double_ranks: list[int], double_w: int) -> float:
    # distribution of 2*W+ over all sign assignments, by convolution
    total = sum(double_ranks)
    counts = np.zeros(total + 1, dtype=object)
    counts[0] = 1
    for r in double_ranks:
        shifted = np.zeros_like(counts)
        shifted[r:] = counts[: total + 1 - r]
        counts = counts + shifted
    n_assignments = 1 << len(double_ranks)
    count_le = int(sum(counts[: double_w + 1]))
    count_ge = int(sum(counts[double_w:]))
    p = 2.0 * min(count_le, count_ge) / n_assignments
    return min(p, 1.0)


def wilcoxon_signed_rank(
    pair_values: Sequence[tuple[float, float]],
) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test over paired values.

    ``pair_values`` holds (first, second) pairs; differences are
    ``first - second``. Raises ValueError when every difference is zero
    (the test is degenerate).
    """
    diffs = np.asarray([a - b for a, b in pair_values], dtype=np.float64)
    diffs = diffs[diffs != 0.0]
    n = diffs.shape[0]
    if n == 0:
        raise ValueError("degenerate test: all differences are zero")
    ranks = rankdata_average(np.abs(diffs))
    w_plus = float(ranks[diffs > 0].sum())
    if n <= EXACT_LIMIT:
        double_ranks = [int(round(2 * r)) for r in ranks]
        p = _exact_two_sided_p(double_ranks, int(round(2 * w_plus)))
        return WilcoxonResult(w_plus, p, n, exact=True)
    mean = n * (n + 1) / 4.0
    # tie correction per tied group of absolute differences
    _, tie_counts = np.unique(np.abs(diffs), return_counts=True)
    tie_term = float((tie_counts.astype(np.float64) ** 3 - tie_counts).sum()) / 48.0
    variance = n * (n + 1) * (2 * n + 1) / 24.0 - tie_term
    if variance <= 0:
        raise ValueError("degenerate test: zero variance")
    delta = w_plus - mean
    z = (delta - 0.5 * np.sign(delta)) / math.sqrt(variance)
    p = min(1.0, math.erfc(abs(z) / math.sqrt(2.0)))
    return WilcoxonResult(w_plus, p, n, exact=False)
