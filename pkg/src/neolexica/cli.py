"""Configuration-driven pipeline front end.

``neolexica <subcommand> --config <path> [--out <dir>] [--seed <u64>]``
chains the stages: ingest, detect, train, align, contexts, ctx-avg,
match, analyze, report, synth. Configuration is a flat INI file; every
stage writes only into the output directory and records the SHA-256
digests of its inputs and outputs in a manifest, so a stale or modified
upstream artifact is detected instead of silently reused. No environment
variable affects results.

Exit codes: 0 success, 1 usage error, 2 data or configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import __version__
from .corpus import (
    Corpus,
    CorpusFormatError,
    Document,
    FrequencyTable,
    TimeBinning,
    build_vocabulary,
    ingest_corpus,
    sample_contexts,
)
from .ctxvec import (
    build_decontextualized_space,
    concat_context_sets,
    load_context_vectors,
    zscore_vectors,
)
from .detect import (
    DetectorConfig,
    apply_word_lists,
    detect_candidates,
    filter_by_pos,
    filter_peaked,
    load_tag_histograms,
    load_word_list,
    read_candidate_report,
    write_candidate_report,
)
from .embeddings import (
    procrustes_align,
    project,
    read_embeddings_binary,
    read_transform,
    write_embeddings_binary,
    write_transform,
)
from .matching import (
    MatchConstraints,
    build_eligibility_graph,
    match_controls,
    read_pairs,
    write_pairs,
    write_unmatched,
)
from .metrics import TauGrid, evaluate_word_set, read_metrics_tsv, write_metrics_tsv
from .report import emit_plots, emit_report, summarize
from .sgns import SGNSHyperparams, train_sgns
from .synth import PlantedNeologism, SyntheticScenario, generate_synthetic
from .tokenizer import TokenizerRules

__all__ = ["PipelineError", "PipelineConfig", "run_command", "main"]

STAGES = (
    "ingest",
    "detect",
    "train",
    "align",
    "contexts",
    "ctx-avg",
    "match",
    "analyze",
    "report",
    "synth",
)

# artifact file name -> producing stage
ARTIFACTS = {
    "docs.tsv": "ingest",
    "freq_full.tsv": "ingest",
    "freq_historical.tsv": "ingest",
    "freq_modern.tsv": "ingest",
    "candidates.tsv": "detect",
    "emb_historical.bin": "train",
    "emb_modern.bin": "train",
    "transform.txt": "align",
    "contexts_historical.tsv": "contexts",
    "contexts_neologisms.tsv": "contexts",
    "emb_ctx_historical.bin": "ctx-avg",
    "emb_ctx_modern.bin": "ctx-avg",
    "pairs.tsv": "match",
    "unmatched.tsv": "match",
    "metrics.tsv": "analyze",
    "report.json": "report",
    "synth_corpus.tsv": "synth",
    "synth_truth.tsv": "synth",
}


class PipelineError(Exception):
    """Configuration or data error; maps to exit code 2."""


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def _stable_seed(base: int, label: str) -> int:
    digest = hashlib.sha256(f"{base}:{label}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


class _Section:
    def __init__(self, parser: configparser.ConfigParser, name: str, out_dir: Path):
        self._parser = parser
        self._name = name
        self._out = out_dir

    def _raw(self, key: str, default):
        if not self._parser.has_option(self._name, key):
            if default is _REQUIRED:
                raise PipelineError(f"config is missing required key [{self._name}] {key}")
            return default
        return self._parser.get(self._name, key)

    def text(self, key: str, default=None) -> str | None:
        value = self._raw(key, default)
        return value if value is None else str(value)

    def path(self, key: str, default=None) -> Path | None:
        value = self._raw(key, default)
        if value is None:
            return None
        return Path(str(value).replace("{out}", str(self._out)))

    def integer(self, key: str, default=None) -> int | None:
        value = self._raw(key, default)
        if value is None or isinstance(value, int):
            return value
        try:
            return int(str(value))
        except ValueError:
            raise PipelineError(f"config key [{self._name}] {key} must be an integer") from None

    def real(self, key: str, default=None) -> float | None:
        value = self._raw(key, default)
        if value is None or isinstance(value, float):
            return value
        text = str(value)
        try:
            if "/" in text:
                num, den = text.split("/")
                return float(num) / float(den)
            return float(text)
        except (ValueError, ZeroDivisionError):
            raise PipelineError(f"config key [{self._name}] {key} must be a number") from None

    def flag(self, key: str, default: bool = False) -> bool:
        value = self._raw(key, default)
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise PipelineError(f"config key [{self._name}] {key} must be a boolean")

    def reals(self, key: str, default=None) -> tuple[float, ...] | None:
        value = self._raw(key, default)
        if value is None or isinstance(value, tuple):
            return value
        try:
            return tuple(float(x) for x in str(value).replace(",", " ").split())
        except ValueError:
            raise PipelineError(f"config key [{self._name}] {key} must list numbers") from None

    def words(self, key: str, default=None) -> tuple[str, ...] | None:
        value = self._raw(key, default)
        if value is None or isinstance(value, tuple):
            return value
        return tuple(str(value).replace(",", " ").split())


_REQUIRED = object()


@dataclass
class PipelineConfig:
    """Resolved configuration plus the output directory and seed."""

    parser: configparser.ConfigParser
    config_path: Path
    out_dir: Path
    seed: int

    @classmethod
    def load(
        cls, config_path: str | Path, out: str | Path | None = None, seed: int | None = None
    ) -> "PipelineConfig":
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with open(config_path, encoding="utf-8") as fh:
                parser.read_file(fh, source=str(config_path))
        except OSError as exc:
            raise PipelineError(f"cannot read config: {exc}") from None
        except configparser.Error as exc:
            raise PipelineError(f"config parse error: {exc}") from None
        out_dir = Path(out) if out is not None else None
        if out_dir is None:
            raw = parser.get("pipeline", "out_dir", fallback="out")
            out_dir = Path(config_path).parent / raw
        if seed is None:
            try:
                seed = int(parser.get("pipeline", "seed", fallback="0"))
            except ValueError:
                raise PipelineError("config key [pipeline] seed must be an integer") from None
        return cls(parser, Path(config_path), out_dir, seed)

    def section(self, name: str) -> _Section:
        return _Section(self.parser, name, self.out_dir)

    @property
    def digest(self) -> str:
        items = []
        for section in sorted(self.parser.sections()):
            for key, value in sorted(self.parser.items(section)):
                items.append(f"{section}.{key}={value}")
        items.append(f"__seed__={self.seed}")
        return hashlib.sha256("\n".join(items).encode("utf-8")).hexdigest()

    # -- typed views over the sections ------------------------------------

    def binning(self) -> TimeBinning:
        sec = self.section("corpus")
        return TimeBinning(
            granularity=sec.text("granularity", "year"),
            first_year=sec.integer("first_year", _REQUIRED),
            last_year=sec.integer("last_year", _REQUIRED),
            historical_cutoff=sec.integer("historical_cutoff", _REQUIRED),
        )

    def tokenizer_rules(self) -> TokenizerRules:
        sec = self.section("corpus")
        return TokenizerRules(
            pretokenized=sec.flag("pretokenized", False),
            max_token_length=sec.integer("max_token_length", 50),
        )

    def corpus_paths(self) -> list[Path]:
        sec = self.section("corpus")
        single = sec.path("path")
        if single is not None:
            return [single]
        paths = [sec.path("historical"), sec.path("modern")]
        if any(p is None for p in paths):
            raise PipelineError(
                "config [corpus] needs either `path` or both `historical` and `modern`"
            )
        return [p for p in paths if p is not None]

    def vocabulary_cap(self) -> int:
        return self.section("vocabulary").integer("size_cap", 100_000)

    def detector(self, table_T: int) -> DetectorConfig:
        sec = self.section("detect")
        tags = sec.words("pos_discard_tags", ("NNP", "NNPS", "FW", "CD", "NFP"))
        return DetectorConfig(
            alpha=sec.real("alpha", 1.0 / 300.0),
            cutoff_timestep=sec.integer("cutoff_timestep", _REQUIRED),
            min_total_count=sec.integer("min_total_count", 500),
            pos_discard_tags=frozenset(tags),
            peak_share_threshold=sec.real("peak_share_threshold", 0.9),
            peak_zero_fraction=sec.real("peak_zero_fraction", 0.5),
        )

    def sgns(self) -> SGNSHyperparams:
        sec = self.section("sgns")
        return SGNSHyperparams(
            window=sec.integer("window", 5),
            dim=sec.integer("dim", 300),
            negatives=sec.integer("negatives", 5),
            epochs=sec.integer("epochs", 5),
            initial_step=sec.real("initial_step", 0.025),
            subsample=sec.real("subsample", 1e-5),
            target_steps=sec.integer("target_steps", 400),
        )

    def constraints(self) -> MatchConstraints:
        sec = self.section("match")
        return MatchConstraints(
            percentile_tolerance=sec.real("percentile_tolerance", 0.01),
            length_tolerance=sec.integer("length_tolerance", 3),
            cosine_floor=sec.real("cosine_floor", 0.4),
        )

    def tau_grid(self) -> TauGrid:
        taus = self.section("metrics").reals("tau_grid")
        return TauGrid(taus) if taus else TauGrid()

    def regime(self) -> str:
        value = self.section("pipeline").text("regime", "static")
        if value not in ("static", "contextual"):
            raise PipelineError("config key [pipeline] regime must be static or contextual")
        return value

    def defaults_dump(self) -> dict:
        """Resolved operating constants, for fidelity checks and manifests."""
        detector = self.section("detect")
        sgns = self.sgns()
        constraints = self.constraints()
        return {
            "sgns.window": sgns.window,
            "sgns.dim": sgns.dim,
            "sgns.negatives": sgns.negatives,
            "sgns.epochs": sgns.epochs,
            "sgns.initial_step": sgns.initial_step,
            "sgns.subsample": sgns.subsample,
            "vocabulary.size_cap": self.vocabulary_cap(),
            "detect.alpha": detector.real("alpha", 1.0 / 300.0),
            "detect.min_total_count": detector.integer("min_total_count", 500),
            "match.percentile_tolerance": constraints.percentile_tolerance,
            "match.length_tolerance": constraints.length_tolerance,
            "match.cosine_floor": constraints.cosine_floor,
            "metrics.tau_grid": list(self.tau_grid()),
        }


# -- manifest handling --------------------------------------------------------

def _manifest_path(out_dir: Path, stage: str) -> Path:
    return out_dir / f"{stage}.manifest.json"


def _write_manifest(
    cfg: PipelineConfig, stage: str, inputs: dict[str, Path], outputs: Sequence[str]
) -> None:
    payload = {
        "stage": stage,
        "config_digest": cfg.digest,
        "inputs": {name: _sha256(path) for name, path in sorted(inputs.items())},
        "outputs": {name: _sha256(cfg.out_dir / name) for name in sorted(outputs)},
    }
    with open(_manifest_path(cfg.out_dir, stage), "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _require(cfg: PipelineConfig, *names: str) -> dict[str, Path]:
    """Resolve artifacts, checking existence and staleness against manifests."""
    resolved = {}
    for name in names:
        producer = ARTIFACTS[name]
        path = cfg.out_dir / name
        if not path.exists():
            raise PipelineError(
                f"missing artifact {name}; run `neolexica {producer}` first"
            )
        manifest_file = _manifest_path(cfg.out_dir, producer)
        if not manifest_file.exists():
            raise PipelineError(
                f"no manifest for {name}; run `neolexica {producer}` first"
            )
        with open(manifest_file, encoding="utf-8") as fh:
            manifest = json.load(fh)
        recorded = manifest.get("outputs", {}).get(name)
        if recorded != _sha256(path):
            raise PipelineError(
                f"stale artifact {name} (modified since {producer} ran); "
                f"re-run `neolexica {producer}`"
            )
        resolved[name] = path
    return resolved


def _load_docs(cfg: PipelineConfig) -> Corpus:
    paths = _require(cfg, "docs.tsv")
    binning = cfg.binning()
    documents = []
    with open(paths["docs.tsv"], encoding="utf-8") as fh:
        fh.readline()
        for line in fh:
            doc_id, year, t, tokens, raw = line.rstrip("\n").split("\t", 4)
            documents.append(
                Document(doc_id, int(year), int(t), tuple(tokens.split(" ")), raw)
            )
    return Corpus(binning, documents, {})


# -- stages -------------------------------------------------------------------

def run_ingest(cfg: PipelineConfig) -> None:
    sec = cfg.section("corpus")
    corpus = ingest_corpus(
        cfg.corpus_paths(),
        cfg.binning(),
        cfg.tokenizer_rules(),
        strict=sec.flag("strict_span", False),
    )
    out = cfg.out_dir
    with open(out / "docs.tsv", "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id\tyear\tbin\ttokens\ttext\n")
        for d in corpus.documents:
            fh.write(f"{d.id}\t{d.year}\t{d.bin}\t{' '.join(d.tokens)}\t{d.text}\n")
    for split, name in (
        ("full", "freq_full.tsv"),
        ("historical", "freq_historical.tsv"),
        ("modern", "freq_modern.tsv"),
    ):
        corpus.frequency_table(split).to_tsv(out / name)
    with open(out / "ingest_stats.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(corpus.manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(
        cfg,
        "ingest",
        {str(p): p for p in cfg.corpus_paths()},
        ["docs.tsv", "freq_full.tsv", "freq_historical.tsv", "freq_modern.tsv"],
    )


def run_detect(cfg: PipelineConfig) -> None:
    inputs = _require(cfg, "freq_full.tsv")
    table = FrequencyTable.from_tsv(inputs["freq_full.tsv"])
    detector = cfg.detector(table.num_timesteps)
    records = detect_candidates(table, detector)
    sec = cfg.section("detect")
    hist_path = sec.path("tag_histograms")
    if hist_path is not None:
        histograms = load_tag_histograms(hist_path)
        records = filter_by_pos(records, histograms, detector.pos_discard_tags)
        inputs[str(hist_path)] = hist_path
    records = filter_peaked(records, table, detector)
    allow_path, deny_path = sec.path("allow_list"), sec.path("deny_list")
    allow = load_word_list(allow_path) if allow_path else []
    deny = load_word_list(deny_path) if deny_path else []
    for p in (allow_path, deny_path):
        if p is not None:
            inputs[str(p)] = p
    records = apply_word_lists(records, allow, deny)
    write_candidate_report(records, cfg.out_dir / "candidates.tsv")
    _write_manifest(cfg, "detect", inputs, ["candidates.tsv"])


def run_train(cfg: PipelineConfig) -> None:
    inputs = _require(cfg, "docs.tsv", "freq_historical.tsv", "freq_modern.tsv")
    corpus = _load_docs(cfg)
    hyper = cfg.sgns()
    cap = cfg.vocabulary_cap()
    workers = cfg.section("sgns").integer("workers", 1)
    for split, name in (("historical", "emb_historical.bin"), ("modern", "emb_modern.bin")):
        table = FrequencyTable.from_tsv(cfg.out_dir / f"freq_{split}.tsv")
        vocab = build_vocabulary(table, cap)
        space = train_sgns(
            corpus,
            split,
            hyper,
            seed=_stable_seed(cfg.seed, f"sgns:{split}"),
            vocab=vocab,
            workers=workers,
        )
        write_embeddings_binary(space, cfg.out_dir / name)
    _write_manifest(cfg, "train", inputs, ["emb_historical.bin", "emb_modern.bin"])


def run_align(cfg: PipelineConfig) -> None:
    inputs = _require(cfg, "emb_historical.bin", "emb_modern.bin")
    historical = read_embeddings_binary(inputs["emb_historical.bin"], "sgns-historical")
    modern = read_embeddings_binary(inputs["emb_modern.bin"], "sgns-modern")
    transform = procrustes_align(modern, historical)
    write_transform(transform, cfg.out_dir / "transform.txt")
    _write_manifest(cfg, "align", inputs, ["transform.txt"])


def run_contexts(cfg: PipelineConfig) -> None:
    inputs = _require(cfg, "docs.tsv", "freq_historical.tsv", "candidates.tsv")
    corpus = _load_docs(cfg)
    sec = cfg.section("contexts")
    k_hist = sec.integer("historical_k", 250)
    k_neo = sec.integer("neologism_k", 500)
    vocab = build_vocabulary(
        FrequencyTable.from_tsv(inputs["freq_historical.tsv"]), cfg.vocabulary_cap()
    )
    candidates = [r.word for r in read_candidate_report(inputs["candidates.tsv"]) if r.verified]
    with open(cfg.out_dir / "contexts_historical.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for word in vocab.entries:
            sentences = sample_contexts(
                corpus, word, k_hist, _stable_seed(cfg.seed, f"ctx:historical:{word}"), "historical"
            )
            for i, sentence in enumerate(sentences):
                fh.write(f"{word}\t{i}\t{sentence}\n")
    with open(cfg.out_dir / "contexts_neologisms.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for word in candidates:
            sentences = sample_contexts(
                corpus, word, k_neo, _stable_seed(cfg.seed, f"ctx:modern:{word}"), "modern"
            )
            for i, sentence in enumerate(sentences):
                fh.write(f"{word}\t{i}\t{sentence}\n")
    _write_manifest(
        cfg, "contexts", inputs, ["contexts_historical.tsv", "contexts_neologisms.tsv"]
    )


def run_ctx_avg(cfg: PipelineConfig) -> None:
    sec = cfg.section("ctx")
    hist_path = sec.path("historical")
    modern_path = sec.path("modern")
    if hist_path is None or modern_path is None:
        raise PipelineError(
            "config [ctx] needs `historical` and `modern` CTX file paths "
            "(produced by the context extractor)"
        )
    for p in (hist_path, modern_path):
        if not p.exists():
            raise PipelineError(f"missing CTX file {p}; run the extractor first")
    hist_set = load_context_vectors(hist_path)
    modern_set = load_context_vectors(modern_path)
    if sec.flag("pooled_stats", True):
        merged, _stats = zscore_vectors(concat_context_sets(hist_set, modern_set))
        n_hist = len(hist_set)
        from .ctxvec import ContextVectorSet

        hist_z = ContextVectorSet(
            merged.words[:n_hist], merged.context_ids[:n_hist], merged.vectors[:n_hist], True
        )
        modern_z = ContextVectorSet(
            merged.words[n_hist:], merged.context_ids[n_hist:], merged.vectors[n_hist:], True
        )
    else:
        hist_z, _ = zscore_vectors(hist_set)
        modern_z, _ = zscore_vectors(modern_set)
    hist_space, _missing = build_decontextualized_space(hist_z, "decontextualized-historical")
    modern_space, _missing = build_decontextualized_space(modern_z, "decontextualized-modern")
    write_embeddings_binary(hist_space, cfg.out_dir / "emb_ctx_historical.bin")
    write_embeddings_binary(modern_space, cfg.out_dir / "emb_ctx_modern.bin")
    _write_manifest(
        cfg,
        "ctx-avg",
        {str(hist_path): hist_path, str(modern_path): modern_path},
        ["emb_ctx_historical.bin", "emb_ctx_modern.bin"],
    )


def run_match(cfg: PipelineConfig) -> None:
    inputs = _require(
        cfg,
        "candidates.tsv",
        "freq_historical.tsv",
        "freq_modern.tsv",
        "emb_historical.bin",
        "emb_modern.bin",
        "transform.txt",
    )
    cap = cfg.vocabulary_cap()
    hist_vocab = build_vocabulary(FrequencyTable.from_tsv(inputs["freq_historical.tsv"]), cap)
    modern_vocab = build_vocabulary(FrequencyTable.from_tsv(inputs["freq_modern.tsv"]), cap)
    hist_space = read_embeddings_binary(inputs["emb_historical.bin"], "sgns-historical")
    modern_space = read_embeddings_binary(inputs["emb_modern.bin"], "sgns-modern")
    transform = read_transform(inputs["transform.txt"])
    all_candidates = read_candidate_report(inputs["candidates.tsv"])
    verified = [r.word for r in all_candidates if r.verified]
    queries = {}
    skipped = {}
    for word in verified:
        if word in modern_space:
            queries[word] = project(modern_space, transform, word)
        else:
            skipped[word] = "no-modern-vector"
    graph, no_rank = build_eligibility_graph(
        [w for w in verified if w in queries],
        queries,
        hist_space,
        modern_vocab,
        hist_vocab,
        cfg.constraints(),
        excluded_controls=[r.word for r in all_candidates],
    )
    for word in no_rank:
        skipped[word] = "no-modern-rank"
    pairs, unmatched = match_controls(graph)
    unmatched.update(skipped)
    write_pairs(pairs, cfg.out_dir / "pairs.tsv")
    write_unmatched(unmatched, cfg.out_dir / "unmatched.tsv")
    _write_manifest(cfg, "match", inputs, ["pairs.tsv", "unmatched.tsv"])


def run_analyze(cfg: PipelineConfig) -> None:
    regime = cfg.regime()
    needed = ["pairs.tsv", "freq_historical.tsv", "candidates.tsv"]
    if regime == "static":
        needed += ["emb_historical.bin", "emb_modern.bin", "transform.txt"]
    else:
        needed += ["emb_ctx_historical.bin", "emb_ctx_modern.bin"]
    inputs = _require(cfg, *needed)
    table = FrequencyTable.from_tsv(inputs["freq_historical.tsv"])
    vocab = build_vocabulary(table, cfg.vocabulary_cap())
    pairs = read_pairs(inputs["pairs.tsv"])
    if regime == "static":
        space = read_embeddings_binary(inputs["emb_historical.bin"], "sgns-historical")
        modern_space = read_embeddings_binary(inputs["emb_modern.bin"], "sgns-modern")
        transform = read_transform(inputs["transform.txt"])
        neo_queries = {
            p.neologism: project(modern_space, transform, p.neologism)
            for p in pairs
            if p.neologism in modern_space
        }
    else:
        space = read_embeddings_binary(
            inputs["emb_ctx_historical.bin"], "decontextualized-historical"
        )
        modern_space = read_embeddings_binary(
            inputs["emb_ctx_modern.bin"], "decontextualized-modern"
        )
        neo_queries = {
            p.neologism: modern_space.vector(p.neologism)
            for p in pairs
            if p.neologism in modern_space
        }
    ctrl_queries = {p.control: space.vector(p.control) for p in pairs if p.control in space}
    grid = cfg.tau_grid()
    exclude: tuple[str, ...] = ()
    if cfg.section("metrics").flag("exclude_candidates", False):
        exclude = tuple(r.word for r in read_candidate_report(inputs["candidates.tsv"]))
    closed = cfg.section("metrics").flag("closed_threshold", True)
    # the vocabulary words over the historical table define the share
    # denominator; restrict to those present in the table
    records = evaluate_word_set(
        neo_queries, space, table, vocab, grid, "neologism", closed, exclude
    ) + evaluate_word_set(ctrl_queries, space, table, vocab, grid, "control", closed, exclude)
    write_metrics_tsv(records, cfg.out_dir / "metrics.tsv")
    _write_manifest(cfg, "analyze", inputs, ["metrics.tsv"])


def run_report(cfg: PipelineConfig) -> None:
    inputs = _require(cfg, "metrics.tsv", "pairs.tsv")
    records = read_metrics_tsv(inputs["metrics.tsv"])
    pairs = read_pairs(inputs["pairs.tsv"])
    grid = list(cfg.tau_grid())
    summaries, tests = summarize(records, pairs, grid)
    emit_report(summaries, tests, cfg.out_dir, records=records, config_digest=cfg.digest, grid=grid)
    plot_paths = emit_plots(summaries, tests, cfg.out_dir)
    outputs = ["report.json", "per_word.tsv"] + [p.name for p in plot_paths]
    _write_manifest(cfg, "report", inputs, outputs)


def run_synth(cfg: PipelineConfig) -> None:
    sec = cfg.section("synth")
    topics = sec.integer("topics", 6)
    planted_count = sec.integer("planted_count", 0)
    planted_topics = sec.words("planted_topics", tuple())
    topic_cycle = [int(t) for t in planted_topics] or list(range(topics))
    class_cycle = list(sec.words("planted_class", ("core",)))
    planted = tuple(
        PlantedNeologism(
            word=f"neo{k:03d}x",
            topic=topic_cycle[k % len(topic_cycle)],
            emergence_bin=sec.integer("planted_bin", _REQUIRED) if planted_count else 1,
            density_class=class_cycle[k % len(class_cycle)],
            weight=sec.real("planted_weight", 2.0),
        )
        for k in range(planted_count)
    )
    scenario = SyntheticScenario(
        topics=topics,
        words_per_topic=sec.integer("words_per_topic", 200),
        num_bins=sec.integer("num_bins", 16),
        historical_cutoff_bin=sec.integer("historical_cutoff_bin", 8),
        growth_factors=sec.reals("growth_factors", tuple([1.0] * topics)),
        token_budget=sec.integer("token_budget", 2_000_000),
        planted=planted,
        sentence_length=sec.integer("sentence_length", 12),
        first_year=sec.integer("first_year", 2001),
        seed=_stable_seed(cfg.seed, "synth"),
        base_volumes=sec.reals("base_volumes", None),
    )
    stats = generate_synthetic(
        scenario, cfg.out_dir / "synth_corpus.tsv", cfg.out_dir / "synth_truth.tsv"
    )
    with open(cfg.out_dir / "synth_stats.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(stats, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(cfg, "synth", {}, ["synth_corpus.tsv", "synth_truth.tsv"])


_RUNNERS = {
    "ingest": run_ingest,
    "detect": run_detect,
    "train": run_train,
    "align": run_align,
    "contexts": run_contexts,
    "ctx-avg": run_ctx_avg,
    "match": run_match,
    "analyze": run_analyze,
    "report": run_report,
    "synth": run_synth,
}


def run_command(
    subcommand: str,
    config_path: str | Path,
    out: str | Path | None = None,
    seed: int | None = None,
) -> int:
    """Run one pipeline stage; returns the process exit code."""
    if subcommand not in _RUNNERS:
        print(f"unknown subcommand: {subcommand}", file=sys.stderr)
        return 1
    try:
        cfg = PipelineConfig.load(config_path, out, seed)
        cfg.out_dir.mkdir(parents=True, exist_ok=True)
        _RUNNERS[subcommand](cfg)
    except (PipelineError, CorpusFormatError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"neolexica {subcommand}: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main(argv: Sequence[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="neolexica",
        description="neologism detection and semantic-neighborhood analysis pipeline",
    )
    parser.add_argument("--version", action="store_true", help="print version and exit")
    parser.add_argument("subcommand", nargs="?", choices=STAGES)
    parser.add_argument("--config", help="path to the INI configuration file")
    parser.add_argument("--out", help="output directory (overrides [pipeline] out_dir)")
    parser.add_argument("--seed", type=int, help="seed (overrides [pipeline] seed)")
    try:
        args = parser.parse_args(argv)
    except SystemExit:
        return 1
    if args.version:
        print(f"neolexica {__version__}")
        return 0
    if args.subcommand is None or args.config is None:
        parser.print_usage(sys.stderr)
        return 1
    return run_command(args.subcommand, args.config, args.out, args.seed)


if __name__ == "__main__":
    sys.exit(main())
