"""Candidate neologism detection from frequency tables.

A word's popularization timestep is the first timestep at which its
cumulative count exceeds a fraction ``alpha`` of its total count. Words
popularized at or after a cutoff timestep, with enough total usage, become
candidates; automatic filters then discard proper-noun-like words (by
dominant POS tag) and sparse, sharply peaked count profiles typical of
templatic or auto-generated text. Manual vetting is replaced by allow and
deny list files.

Every filter writes a per-record verdict instead of removing records, so
filters commute and the final report can show why each word survived or
fell.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import FrequencyTable

__all__ = [
    "DetectorConfig",
    "CandidateRecord",
    "estimate_popularization_time",
    "detect_candidates",
    "filter_by_pos",
    "filter_peaked",
    "apply_word_lists",
    "load_tag_histograms",
    "load_word_list",
    "write_candidate_report",
    "surviving",
]

logger = logging.getLogger(__name__)

DEFAULT_DISCARD_TAGS = frozenset({"NNP", "NNPS", "FW", "CD", "NFP"})

FILTER_NAMES = ("pos", "peaked", "wordlist")


@dataclass(frozen=True)
class DetectorConfig:
    """Knobs for candidate selection and the automatic filters.

    ``alpha`` is the cumulative-usage fraction of the popularization-time
    estimator (operating value 1/300). ``cutoff_timestep`` is the first
    timestep counted as Modern emergence. A word is discarded as peaked
    when its maximum single-timestep share reaches ``peak_share_threshold``
    and at least ``peak_zero_fraction`` of the timesteps after the peak
    have zero count.
    """

    alpha: float = 1.0 / 300.0
    cutoff_timestep: int = 1
    min_total_count: int = 500
    pos_discard_tags: frozenset[str] = DEFAULT_DISCARD_TAGS
    peak_share_threshold: float = 0.9
    peak_zero_fraction: float = 0.5

    def __post_init__(self) -> None:
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must be in (0, 1)")
        if self.min_total_count < 0:
            raise ValueError("min_total_count must be >= 0")
        for name in ("peak_share_threshold", "peak_zero_fraction"):
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ValueError(f"{name} must be in (0, 1]")


@dataclass(frozen=True)
class CandidateRecord:
    """A candidate word with its popularization timestep and filter verdicts."""

    word: str
    t_star: int
    total_count: int
    verdicts: dict[str, bool] = field(default_factory=dict)
    verified: bool = False

    @property
    def passed_all(self) -> bool:
        return all(self.verdicts.values())

    @property
    def status(self) -> str:
        failing = sorted(name for name, ok in self.verdicts.items() if not ok)
        if failing:
            return "discarded(" + ",".join(failing) + ")"
        return "verified" if self.verified else "candidate"


def estimate_popularization_time(counts: Sequence[int] | np.ndarray, alpha: float) -> int:
    """First timestep where cumulative usage strictly exceeds ``alpha`` x total.

    Always exists for a nonzero count vector since the full sum strictly
    exceeds ``alpha * total`` for ``alpha < 1``. Returns a 1-based index.
    """
    if not (0.0 < alpha < 1.0):
        raise ValueError("alpha must be in (0, 1)")
    counts = np.asarray(counts, dtype=np.int64)
    total = counts.sum()
    if total <= 0:
        raise ValueError("popularization time is undefined for an all-zero count vector")
    cumulative = np.cumsum(counts)
    exceeded = cumulative > alpha * total
    if not exceeded.any():
        # float rounding can push alpha*total up to total for alpha within
        # one ulp of 1; the mathematical answer is then the last timestep
        return int(counts.size)
    return int(np.argmax(exceeded)) + 1


def detect_candidates(table: FrequencyTable, cfg: DetectorConfig) -> list[CandidateRecord]:
    """Select words popularized at or after the cutoff with enough total usage.

    ``table`` must span the full corpus (both splits), since the estimator
    integrates over the entire timeline.
    """
    T = table.num_timesteps
    if not (1 <= cfg.cutoff_timestep <= T):
        raise ValueError(f"cutoff_timestep must be in 1..{T}, got {cfg.cutoff_timestep}")
    totals = table.counts.sum(axis=1)
    records = []
    for i, word in enumerate(table.words):
        total = int(totals[i])
        if total == 0 or total < cfg.min_total_count:
            continue
        t_star = estimate_popularization_time(table.counts[i], cfg.alpha)
        if t_star >= cfg.cutoff_timestep:
            records.append(CandidateRecord(word, t_star, total))
    records.sort(key=lambda r: r.word)
    return records


def _with_verdict(record: CandidateRecord, name: str, ok: bool) -> CandidateRecord:
    verdicts = dict(record.verdicts)
    verdicts[name] = ok
    return replace(record, verdicts=verdicts)


def filter_by_pos(
    candidates: Iterable[CandidateRecord],
    histograms: dict[str, dict[str, int]],
    discard_tags: frozenset[str] | set[str] = DEFAULT_DISCARD_TAGS,
    on_missing: str = "keep",
) -> list[CandidateRecord]:
    """Mark candidates whose dominant POS tag is in ``discard_tags``.

    A tie for the most frequent tag that involves a discard tag discards
    (conservative). Candidates without a histogram pass through with a
    warning by default; ``on_missing`` may be ``"keep"``, ``"discard"`` or
    ``"error"``.
    """
    if on_missing not in ("keep", "discard", "error"):
        raise ValueError("on_missing must be keep, discard, or error")
    out = []
    for record in candidates:
        hist = histograms.get(record.word)
        if not hist:
            if on_missing == "error":
                raise KeyError(f"no tag histogram for candidate {record.word!r}")
            warnings.warn(f"no tag histogram for candidate {record.word!r}", stacklevel=2)
            out.append(_with_verdict(record, "pos", on_missing == "keep"))
            continue
        top = max(hist.values())
        dominant = {tag for tag, n in hist.items() if n == top}
        out.append(_with_verdict(record, "pos", not (dominant & set(discard_tags))))
    return out


def filter_peaked(
    candidates: Iterable[CandidateRecord],
    table: FrequencyTable,
    cfg: DetectorConfig,
) -> list[CandidateRecord]:
    """Mark candidates with a sparse, sharply peaked count profile.

    The peak is the first maximal timestep. A peak in the final timestep
    has no after-peak evidence and is kept: a word exploding in the last
    bin is indistinguishable from a genuine late arrival.
    """
    out = []
    for record in candidates:
        counts = table.row(record.word)
        total = counts.sum()
        peak = int(np.argmax(counts))
        share = counts[peak] / total
        after = counts[peak + 1 :]
        zero_fraction = float((after == 0).mean()) if after.size else 0.0
        peaked = share >= cfg.peak_share_threshold and zero_fraction >= cfg.peak_zero_fraction
        out.append(_with_verdict(record, "peaked", not peaked))
    return out


def apply_word_lists(
    candidates: Iterable[CandidateRecord],
    allow: Sequence[str] = (),
    deny: Sequence[str] = (),
) -> list[CandidateRecord]:
    """Apply manual allow/deny lists and promote survivors to verified.

    Deny-listed words fail the ``wordlist`` verdict; a non-empty allow
    list restricts survivors to its members. A word on both lists is a
    configuration error. Records passing every enabled filter gain
    ``verified`` status.
    """
    allow_set, deny_set = set(allow), set(deny)
    both = sorted(allow_set & deny_set)
    if both:
        raise ValueError(f"words on both allow and deny lists: {', '.join(both)}")
    out = []
    for record in candidates:
        ok = record.word not in deny_set and (not allow_set or record.word in allow_set)
        record = _with_verdict(record, "wordlist", ok)
        out.append(replace(record, verified=record.passed_all))
    return out


def surviving(candidates: Iterable[CandidateRecord]) -> list[CandidateRecord]:
    """Records that passed every filter applied so far."""
    return [r for r in candidates if r.passed_all]


def load_tag_histograms(path: str | Path) -> dict[str, dict[str, int]]:
    """Parse a tag-histogram TSV: ``word<TAB>tag:count,tag:count,...``."""
    histograms: dict[str, dict[str, int]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line:
                continue
            try:
                word, spec = line.split("\t")
                hist = {}
                for pair in spec.split(","):
                    tag, count = pair.split(":")
                    hist[tag] = int(count)
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed tag histogram line") from None
            if not hist:
                raise ValueError(f"{path}:{lineno}: empty tag histogram")
            histograms[word] = hist
    return histograms


def load_word_list(path: str | Path) -> list[str]:
    """Read a word list file: one word per line, ``#`` starts a comment."""
    words = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = line.split("#", 1)[0].strip()
            if word:
                words.append(word)
    return words


def write_candidate_report(
    candidates: Iterable[CandidateRecord], path: str | Path
) -> None:
    """Write the candidate report TSV: word, t*, total, verdicts, status."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("word\tt_star\ttotal_count\tverdicts\tstatus\n")
        for r in sorted(candidates, key=lambda r: r.word):
            verdicts = ",".join(
                f"{name}:{'pass' if ok else 'fail'}" for name, ok in sorted(r.verdicts.items())
            )
            fh.write(f"{r.word}\t{r.t_star}\t{r.total_count}\t{verdicts or '-'}\t{r.status}\n")


def read_candidate_report(path: str | Path) -> list[CandidateRecord]:
    """Inverse of :func:`write_candidate_report`."""
    records = []
    with open(path, encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            word, t_star, total, verdicts_s, status = line.rstrip("\n").split("\t")
            verdicts = {}
            if verdicts_s != "-":
                for pair in verdicts_s.split(","):
                    name, v = pair.split(":")
                    verdicts[name] = v == "pass"
            records.append(
                CandidateRecord(
                    word, int(t_star), int(total), verdicts, verified=status == "verified"
                )
            )
    return records
