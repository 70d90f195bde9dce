"""Toolkit for detecting lexical semantic change between two time periods by
combining grammatical profiles with distances over contextualised and static
word embeddings, then ensembling, ranking, binarizing and evaluating."""

__version__ = "0.1.0"

from .changepoint import BinaryLabels, binarize, detect_change_point
from .clustering import APResult, affinity_propagation
from .contextual import (
    UmxFormatError,
    UsageMatrix,
    apd,
    apd_prt,
    jensen_shannon_divergence,
    jsd_result,
    jsd_score,
    prt,
    read_umx,
    read_usage_matrix,
    write_umx,
    write_usage_matrix,
)
from .corpus import (
    ConlluParseError,
    ParseStats,
    Period,
    TargetEntry,
    TargetLexicon,
    Token,
    UsageIndex,
    collect_surface_forms,
    index_usages,
    read_conllu,
    read_gold_tsv,
    read_targets_tsv,
    sentence_to_conllu,
)
from .evaluation import (
    EvaluationReport,
    accuracy,
    fpfn_binary,
    fpfn_ranking,
    method_correlation_matrix,
    spearman,
)
from .profiles import (
    CategoryVector,
    GrammaticalProfile,
    ProfileKind,
    build_profile,
    build_profiles,
    category_distance,
    score_profiles,
)
from .scoring import ChangeScoreTable, ensemble, rank, read_scores_tsv, write_scores_tsv
from .static import (
    Alignment,
    AlignmentMode,
    VectorSpace,
    procrustes_align,
    read_word2vec_text,
    static_change_score,
)
