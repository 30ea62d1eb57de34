"""Hybrid lexical/semantic statute retrieval with tiered result fusion
and a probability-thresholded entailment gate."""

from .analysis import AnalyzerConfig, IdfTable, TokenStream, build_idf, stem, tokenize
from .bm25 import (
    Bm25Params,
    InvertedIndex,
    ScoredHit,
    bm25_score,
    build_index,
    search_bm25,
)
from .centroid import (
    CentroidStore,
    build_centroid_store,
    centroid_similarity,
    idf_centroid,
    search_embedding,
)
from .corpus import (
    Article,
    Corpus,
    QueryRecord,
    SplitRules,
    load_corpus_jsonl,
    load_queries,
    save_corpus_jsonl,
    save_queries,
    split_statute,
)
from .embedding import (
    CbowConfig,
    EmbeddingModel,
    continue_training,
    load_vectors,
    save_vectors,
    train_cbow,
)
from .entailment import (
    Decision,
    EntailmentVote,
    GateConfig,
    baseline_negative,
    ensemble_decide,
    exact_match_gate,
    load_votes,
    run_entailment,
    save_votes,
)
from .fusion import (
    FusionResult,
    TierConfig,
    default_tiers,
    evaluate_tier,
    fuse,
)
from .metrics import (
    RetrievalMetrics,
    TierCoverageRow,
    entailment_accuracy,
    evaluate_run,
    f2_measure,
    macro_average,
    mean_average_precision,
    per_query_prf2,
    recall_at_k,
    tier_coverage_report,
)

__version__ = "0.1.0"

__all__ = [
    "AnalyzerConfig", "IdfTable", "TokenStream", "build_idf", "stem", "tokenize",
    "Bm25Params", "InvertedIndex", "ScoredHit", "bm25_score", "build_index",
    "search_bm25",
    "CentroidStore", "build_centroid_store", "centroid_similarity",
    "idf_centroid", "search_embedding",
    "Article", "Corpus", "QueryRecord", "SplitRules", "load_corpus_jsonl",
    "load_queries", "save_corpus_jsonl", "save_queries", "split_statute",
    "CbowConfig", "EmbeddingModel", "continue_training", "load_vectors",
    "save_vectors", "train_cbow",
    "Decision", "EntailmentVote", "GateConfig", "baseline_negative",
    "ensemble_decide", "exact_match_gate", "load_votes", "run_entailment",
    "save_votes",
    "FusionResult", "TierConfig", "default_tiers", "evaluate_tier", "fuse",
    "RetrievalMetrics", "TierCoverageRow", "entailment_accuracy",
    "evaluate_run", "f2_measure", "macro_average", "mean_average_precision",
    "per_query_prf2", "recall_at_k", "tier_coverage_report",
]
