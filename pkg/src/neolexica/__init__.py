"""neolexica: emergent-word detection and semantic-neighborhood analysis.

The library ingests time-stamped corpora, identifies candidate neologisms
from usage-frequency trajectories, trains and aligns static embeddings
per time period (or averages externally produced contextual vectors),
pairs each neologism with a matched control word, and measures how dense
and how fast-growing each word's historical semantic neighborhood is.
"""

from .corpus import (
    Corpus,
    CorpusFormatError,
    FrequencyTable,
    TimeBinning,
    Vocabulary,
    build_frequency_table,
    build_vocabulary,
    ingest_corpus,
    sample_contexts,
)
from .ctxvec import (
    ContextVectorSet,
    ZScoreStats,
    build_decontextualized_space,
    concat_context_sets,
    load_context_vectors,
    write_context_vectors_binary,
    write_context_vectors_text,
    zscore_vectors,
)
from .detect import (
    CandidateRecord,
    DetectorConfig,
    apply_word_lists,
    detect_candidates,
    estimate_popularization_time,
    filter_by_pos,
    filter_peaked,
)
from .embeddings import (
    AlignmentTransform,
    EmbeddingSpace,
    NeighborhoodSet,
    cosine,
    neighborhood,
    procrustes_align,
    project,
    project_space,
    read_embeddings_binary,
    read_embeddings_text,
    write_embeddings_binary,
    write_embeddings_text,
)
from .matching import (
    ControlPair,
    MatchConstraints,
    build_eligibility_graph,
    hopcroft_karp,
    match_controls,
    rank_percentile,
)
from .metrics import (
    DEFAULT_TAU_GRID,
    MetricsRecord,
    TauGrid,
    density,
    evaluate_word_set,
    monotonicity,
    share_series,
    slope,
)
from .report import (
    FormationTally,
    GroupSummary,
    TestResult,
    emit_plots,
    emit_report,
    formation_tally,
    stars_for_p,
    summarize,
)
from .sgns import SGNSHyperparams, train_sgns
from .stats import spearman_rho, wilcoxon_signed_rank
from .synth import PlantedNeologism, SyntheticScenario, generate_synthetic
from .tokenizer import TokenizerRules, tokenize_text

__version__ = "0.1.0"
