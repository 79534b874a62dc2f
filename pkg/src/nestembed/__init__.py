"""Nested-dimension sentence embeddings: train once, truncate anywhere.

The package trains a desk-scale hashed character n-gram encoder whose
embedding prefixes are themselves usable embeddings, evaluates them with
Pearson/Spearman correlation grids, runs shortlist-then-rerank funnel
retrieval, and serves similarity over HTTP.
"""

from .core import (SimilarityMetric, as_embedding, l2_normalize,
                   ladder_default, ladder_halving, similarity, truncate,
                   validate_ladder)
from .datasetio import (DatasetSplit, PairClassRow, PairRow, PairScoreRow,
                        ParseResult, TripletRow, deterministic_split,
                        make_synthetic_scored_pairs, make_synthetic_sentences,
                        make_synthetic_triplets, normalize_score, parse_csv,
                        rows_checksum, validate_counts, write_csv)
from .encoder import (DESK_LADDER, EncoderModel, TrainConfig, TrainReport,
                      encode, encode_batch, init_model, load_model,
                      model_fingerprint, save_model, train, triplet_accuracy)
from .errors import (ConfigError, DecodeError, DimensionError,
                     DivergenceError, EmptyBatchError, EmptyDatasetError,
                     FingerprintError, FormatError, LabelError,
                     NestembedError, ResultSizeError, RowError, SchemaError,
                     ScoreRangeError, UndefinedCorrelationError,
                     ZeroVectorError)
from .evaluator import (CorrelationPair, CorrelationReport, ScoredPair,
                        as_scored_pairs, average_ranks, evaluate, pearson,
                        similarity_series, spearman)
from .losses import (ClassifierStack, LabeledExample, LossResult, LossWeights,
                     TripletBatch, matryoshka_wrap, mnrl, mrl_e_loss,
                     mrl_loss, softmax_ce)
from .retrieval import (Corpus, FunnelConfig, SearchResult, build_corpus,
                        exact_knn, funnel_search, load_corpus, recall_at_k,
                        save_corpus)
from .service import create_app, load_models_dir, serve
from .textnorm import (FeatureVector, NormConfig, NormalizedText, fnv1a64,
                       hash_ngrams, normalize_arabic)

__version__ = "0.1.0"

__all__ = [
    "SimilarityMetric", "as_embedding", "l2_normalize", "ladder_default",
    "ladder_halving", "similarity", "truncate", "validate_ladder",
    "DatasetSplit", "PairClassRow", "PairRow", "PairScoreRow", "ParseResult",
    "TripletRow", "deterministic_split", "make_synthetic_scored_pairs",
    "make_synthetic_sentences", "make_synthetic_triplets", "normalize_score",
    "parse_csv", "rows_checksum", "validate_counts", "write_csv",
    "DESK_LADDER", "EncoderModel", "TrainConfig", "TrainReport", "encode",
    "encode_batch", "init_model", "load_model", "model_fingerprint",
    "save_model", "train", "triplet_accuracy",
    "NestembedError", "ConfigError", "DecodeError", "DimensionError",
    "DivergenceError", "EmptyBatchError", "EmptyDatasetError",
    "FingerprintError", "FormatError", "LabelError", "ResultSizeError",
    "RowError", "SchemaError", "ScoreRangeError",
    "UndefinedCorrelationError", "ZeroVectorError",
    "CorrelationPair", "CorrelationReport", "ScoredPair", "as_scored_pairs",
    "average_ranks", "evaluate", "pearson", "similarity_series", "spearman",
    "ClassifierStack", "LabeledExample", "LossResult", "LossWeights",
    "TripletBatch", "matryoshka_wrap", "mnrl", "mrl_e_loss", "mrl_loss",
    "softmax_ce",
    "Corpus", "FunnelConfig", "SearchResult", "build_corpus", "exact_knn",
    "funnel_search", "load_corpus", "recall_at_k", "save_corpus",
    "create_app", "load_models_dir", "serve",
    "FeatureVector", "NormConfig", "NormalizedText", "fnv1a64",
    "hash_ngrams", "normalize_arabic",
    "__version__",
]
