"""Group aggregation, significance testing, and report emission.

For every (metric, tau) cell the neologism and control groups are
summarized by mean, standard error, and defined-value count, and compared
with a paired two-sided Wilcoxon signed-rank test over the matched pairs
in which both members have a defined value. Significance stars follow the
usual strict thresholds: *** for p < 0.001, ** for p < 0.01, * for
p < 0.05, none otherwise.

Reports are a machine-readable JSON summary plus a per-word TSV, and bar
charts are emitted as self-contained SVG markup with error whiskers and
star annotations; no plotting library or renderer is involved, so output
bytes are a pure function of the inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .matching import ControlPair
from .metrics import FLAG_UNDEFINED, MetricsRecord
from .stats import WilcoxonResult, spearman_rho, wilcoxon_signed_rank

__all__ = [
    "FORMATION_CATEGORIES",
    "GroupSummary",
    "TestResult",
    "spearman_rho",
    "wilcoxon_signed_rank",
    "summarize",
    "stars_for_p",
    "emit_report",
    "emit_plots",
    "formation_tally",
    "FormationTally",
]

METRIC_NAMES = ("d", "m", "r")
GROUPS = ("neologism", "control")

FORMATION_CATEGORIES = (
    "abbreviation",
    "blend",
    "borrowing",
    "compound",
    "pos-conversion",
    "derivation",
    "sense",
    "spelling",
)


@dataclass(frozen=True)
class GroupSummary:
    metric: str
    tau: float
    group: str
    mean: float | None
    standard_error: float | None
    n: int


@dataclass(frozen=True)
class TestResult:
    """Paired test outcome for one cell; statistic/p are None when untestable."""

    metric: str
    tau: float
    statistic: float | None
    p_value: float | None
    n_pairs: int
    stars: str


def stars_for_p(p: float) -> str:
    """Strict thresholds: boundary values fall to the weaker annotation."""
    if p < 0.001:
        return "***"
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return "none"


def _metric_value(record: MetricsRecord, metric: str) -> float | None:
    """Defined value of one metric, or None. Constant-flagged values count
    as defined (zero by convention); only undefined ones are excluded."""
    if metric == "d":
        return record.density_d
    if metric == "m":
        return None if record.m_flag == FLAG_UNDEFINED else record.monotonicity_m
    if metric == "r":
        return None if record.r_flag == FLAG_UNDEFINED else record.slope_r
    raise ValueError(f"unknown metric {metric!r}")


def summarize(
    records: Sequence[MetricsRecord],
    pairs: Sequence[ControlPair],
    taus: Sequence[float] | None = None,
) -> tuple[list[GroupSummary], list[TestResult]]:
    """Aggregate per-word records into group summaries and paired tests.

    ``taus`` defaults to the thresholds present in the records. Cells
    with no testable pairs (none defined on both sides, or all
    differences zero) are reported untestable with no p-value.
    """
    if taus is None:
        taus = sorted({r.tau for r in records})
    by_key: dict[tuple[str, float, str], MetricsRecord] = {}
    for r in records:
        by_key[(r.word, r.tau, r.group)] = r
    summaries: list[GroupSummary] = []
    tests: list[TestResult] = []
    for metric in METRIC_NAMES:
        for tau in taus:
            for group in GROUPS:
                values = [
                    v
                    for r in records
                    if r.tau == tau and r.group == group
                    if (v := _metric_value(r, metric)) is not None
                ]
                if values:
                    arr = np.asarray(values, dtype=np.float64)
                    se = (
                        float(arr.std(ddof=1) / math.sqrt(len(arr)))
                        if len(arr) > 1
                        else None
                    )
                    summaries.append(
                        GroupSummary(metric, tau, group, float(arr.mean()), se, len(arr))
                    )
                else:
                    summaries.append(GroupSummary(metric, tau, group, None, None, 0))
            paired = []
            for pair in pairs:
                neo = by_key.get((pair.neologism, tau, "neologism"))
                ctrl = by_key.get((pair.control, tau, "control"))
                if neo is None or ctrl is None:
                    continue
                a = _metric_value(neo, metric)
                b = _metric_value(ctrl, metric)
                if a is not None and b is not None:
                    paired.append((a, b))
            tests.append(_run_test(metric, tau, paired))
    return summaries, tests


def _run_test(metric: str, tau: float, paired: list[tuple[float, float]]) -> TestResult:
    if not paired:
        return TestResult(metric, tau, None, None, 0, "none")
    try:
        res: WilcoxonResult = wilcoxon_signed_rank(paired)
    except ValueError:
        # all differences zero: degenerate cell
        return TestResult(metric, tau, None, None, len(paired), "none")
    return TestResult(metric, tau, res.statistic, res.p_value, len(paired), stars_for_p(res.p_value))


# -- emission ----------------------------------------------------------------

def _round_trip(x: float | None) -> float | None:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return None
    return float(x)


def report_payload(
    summaries: Sequence[GroupSummary],
    tests: Sequence[TestResult],
    config_digest: str = "",
    grid: Sequence[float] | None = None,
) -> dict:
    by_cell: dict[tuple[str, float], dict] = {}
    for s in summaries:
        cell = by_cell.setdefault(
            (s.metric, s.tau), {"metric": s.metric, "tau": s.tau, "groups": {}, "test": None}
        )
        cell["groups"][s.group] = {
            "mean": _round_trip(s.mean),
            "se": _round_trip(s.standard_error),
            "n": s.n,
        }
    for t in tests:
        cell = by_cell.setdefault(
            (t.metric, t.tau), {"metric": t.metric, "tau": t.tau, "groups": {}, "test": None}
        )
        cell["test"] = {
            "statistic": _round_trip(t.statistic),
            "p": _round_trip(t.p_value),
            "n_pairs": t.n_pairs,
            "stars": t.stars,
        }
    ordered = [by_cell[k] for k in sorted(by_cell, key=lambda k: (METRIC_NAMES.index(k[0]), k[1]))]
    if grid is None:
        grid = sorted({t.tau for t in tests})
    return {"config_digest": config_digest, "grid": [float(t) for t in grid], "metrics": ordered}


def emit_report(
    summaries: Sequence[GroupSummary],
    tests: Sequence[TestResult],
    out_dir: str | Path,
    records: Sequence[MetricsRecord] | None = None,
    config_digest: str = "",
    grid: Sequence[float] | None = None,
) -> list[Path]:
    """Write report.json and, when records are given, the per-word TSV.

    Output is byte-deterministic for fixed inputs.
    """
    if not summaries:
        raise ValueError("nothing to report: no summaries")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = report_payload(summaries, tests, config_digest, grid)
    report_path = out_dir / "report.json"
    with open(report_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    written = [report_path]
    if records is not None:
        from .metrics import write_metrics_tsv

        per_word = out_dir / "per_word.tsv"
        write_metrics_tsv(records, per_word)
        written.append(per_word)
    return written


_SVG_COLORS = {"neologism": "#4c72b0", "control": "#c44e52"}
_METRIC_TITLES = {
    "d": "neighborhood density log(|N|+1)",
    "m": "neighborhood growth monotonicity",
    "r": "neighborhood growth slope",
}


def _fmt_tick(x: float) -> str:
    return f"{x:.4g}"


def emit_plots(
    summaries: Sequence[GroupSummary],
    tests: Sequence[TestResult],
    out_dir: str | Path,
) -> list[Path]:
    """One grouped bar chart per metric, as a self-contained SVG file.

    Paired bars per tau with standard-error whiskers and significance
    stars above each pair.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    test_by_cell = {(t.metric, t.tau): t for t in tests}
    written = []
    for metric in METRIC_NAMES:
        cells = sorted({s.tau for s in summaries if s.metric == metric})
        if not cells:
            continue
        path = out_dir / f"plot_{metric}.svg"
        svg = _render_chart(metric, cells, summaries, test_by_cell)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(svg)
        written.append(path)
    return written


def _render_chart(
    metric: str,
    taus: Sequence[float],
    summaries: Sequence[GroupSummary],
    test_by_cell: Mapping[tuple[str, float], TestResult],
) -> str:
    width, height = 640, 380
    left, right, top, bottom = 70, 20, 48, 56
    plot_w, plot_h = width - left - right, height - top - bottom
    by = {(s.tau, s.group): s for s in summaries if s.metric == metric}

    lo, hi = 0.0, 0.0
    for s in by.values():
        if s.mean is None:
            continue
        se = s.standard_error or 0.0
        lo = min(lo, s.mean - se)
        hi = max(hi, s.mean + se)
    if hi == lo:
        hi = lo + 1.0
    span = hi - lo
    hi += 0.12 * span
    lo -= 0.04 * span if lo < 0 else 0.0

    def sy(v: float) -> float:
        return top + plot_h * (hi - v) / (hi - lo)

    group_w = plot_w / len(taus)
    bar_w = min(36.0, group_w * 0.3)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left + plot_w / 2:.1f}" y="20" text-anchor="middle" font-size="14">'
        f"{_METRIC_TITLES[metric]}</text>",
    ]
    # y axis with 5 ticks
    for i in range(6):
        v = lo + (hi - lo) * i / 5
        y = sy(v)
        parts.append(
            f'<line x1="{left}" y1="{y:.1f}" x2="{left + plot_w}" y2="{y:.1f}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        parts.append(
            f'<text x="{left - 6}" y="{y + 4:.1f}" text-anchor="end">{_fmt_tick(v)}</text>'
        )
    if lo < 0 < hi:
        y0 = sy(0.0)
        parts.append(
            f'<line x1="{left}" y1="{y0:.1f}" x2="{left + plot_w}" y2="{y0:.1f}" '
            f'stroke="#888888" stroke-width="1"/>'
        )
    for k, tau in enumerate(taus):
        cx = left + group_w * (k + 0.5)
        pair_top = None
        for j, group in enumerate(GROUPS):
            s = by.get((tau, group))
            if s is None or s.mean is None:
                continue
            x = cx + (j - 1) * bar_w + (bar_w * 0.1 if j == 1 else -bar_w * 0.1)
            y_zero, y_val = sy(max(lo, 0.0)), sy(s.mean)
            y, h = (y_val, y_zero - y_val) if s.mean >= 0 else (y_zero, y_val - y_zero)
            parts.append(
                f'<rect x="{x:.1f}" y="{y:.1f}" width="{bar_w:.1f}" height="{max(h, 0.0):.1f}" '
                f'fill="{_SVG_COLORS[group]}"/>'
            )
            if s.standard_error is not None:
                e_lo, e_hi = sy(s.mean - s.standard_error), sy(s.mean + s.standard_error)
                mid = x + bar_w / 2
                parts.append(
                    f'<line x1="{mid:.1f}" y1="{e_lo:.1f}" x2="{mid:.1f}" y2="{e_hi:.1f}" '
                    f'stroke="#333333" stroke-width="1.5"/>'
                )
                for ee in (e_lo, e_hi):
                    parts.append(
                        f'<line x1="{mid - 5:.1f}" y1="{ee:.1f}" x2="{mid + 5:.1f}" y2="{ee:.1f}" '
                        f'stroke="#333333" stroke-width="1.5"/>'
                    )
                pair_top = min(pair_top or 1e9, e_hi, sy(s.mean))
            else:
                pair_top = min(pair_top or 1e9, sy(s.mean))
        test = test_by_cell.get((metric, tau))
        if test is not None and test.stars != "none" and pair_top is not None:
            parts.append(
                f'<text x="{cx:.1f}" y="{pair_top - 6:.1f}" text-anchor="middle">{test.stars}</text>'
            )
        parts.append(
            f'<text x="{cx:.1f}" y="{top + plot_h + 18}" text-anchor="middle">{_fmt_tick(tau)}</text>'
        )
    parts.append(
        f'<text x="{left + plot_w / 2:.1f}" y="{height - 14}" text-anchor="middle">'
        "cosine threshold tau</text>"
    )
    legend_x = left + 8
    for j, group in enumerate(GROUPS):
        ly = top + 6 + 16 * j
        parts.append(
            f'<rect x="{legend_x}" y="{ly}" width="12" height="12" fill="{_SVG_COLORS[group]}"/>'
        )
        parts.append(f'<text x="{legend_x + 17}" y="{ly + 10}">{group}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


# -- formation mechanism tally ------------------------------------------------

@dataclass(frozen=True)
class FormationTally:
    """Multi-label category percentages; columns may sum past 100."""

    total_words: int
    counts: dict[str, int]
    percentages: dict[str, float]


def formation_tally(path: str | Path) -> FormationTally:
    """Tally a formation-mechanism annotation file.

    TSV lines ``word<TAB>category,category,...`` with categories from the
    fixed taxonomy; an unknown label is an error naming the line.
    """
    counts = {c: 0 for c in FORMATION_CATEGORIES}
    total = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, cats = line.split("\t")
            except ValueError:
                raise ValueError(f"{path}:{lineno}: expected word<TAB>categories") from None
            labels = [c.strip() for c in cats.split(",") if c.strip()]
            for label in labels:
                if label not in counts:
                    raise ValueError(f"{path}:{lineno}: unknown category {label!r}")
            total += 1
            for label in set(labels):
                counts[label] += 1
    if total == 0:
        return FormationTally(0, {}, {})
    percentages = {c: 100.0 * n / total for c, n in counts.items()}
    return FormationTally(total, counts, percentages)
