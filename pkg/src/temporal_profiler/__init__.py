"""Dynamic user profile embeddings via time-decay weighting.

Turns timestamped per-user document embeddings into profile vectors where
recent documents weigh more, and evaluates those profiles against liked
posts.  Six decay families, each in three variants, against a static mean
baseline.
"""

from .corpus import (
    ActivityKind,
    ActivityRecord,
    CorpusFormatError,
    ParseReport,
    TimelineEvent,
    UserTimeline,
    build_document_text,
    dedupe_and_sort,
    format_timestamp,
    parse_activity_jsonl,
    parse_timeline_csv,
    parse_timestamp,
    read_activity_jsonl,
    read_timeline_csv,
    serialize_activity,
    serialize_corpus,
    write_activity_jsonl,
    write_corpus_csv,
)
from .decay import (
    AgeOrder,
    DecayKind,
    DecaySpec,
    DecayVariant,
    WeightSchedule,
    age_indices,
    basic_weights,
    cos_time_weights,
    cosine_weights,
    decay_curve,
)
from .evalharness import (
    ActivityPair,
    ActivityPairing,
    EvalMatrix,
    EvalRun,
    assemble_matrix,
    build_pairing,
    mean_activity_score,
    pair_score,
    retrieval_accuracy,
    sigmoid,
)
from .metrics import (
    ConsecutiveSimilarities,
    DiversityResult,
    DtMode,
    TimeDeltas,
    consecutive_similarities,
    cosine_similarity,
    pairwise_diversity,
    time_differences,
)
from .profiles import (
    STATIC,
    ProfileEmbedding,
    ProfileSet,
    dynamic_profile,
    normalize,
    profile_all_users,
    static_profile,
)
from .synth import (
    DriftCorpus,
    DriftParams,
    DriftReport,
    generate_drifting_corpus,
    hash_embed,
    run_drift_experiment,
)
from .tensorio import (
    AlignedCorpus,
    EmbeddingMatrix,
    TensorFormatError,
    align,
    matrix_from_bytes,
    matrix_to_bytes,
    read_matrix,
    write_matrix,
)

__version__ = "0.1.0"
