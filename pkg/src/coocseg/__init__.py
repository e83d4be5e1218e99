"""Unsupervised temporal segmentation of feature-vector sequences.

The pipeline clusters all frames of a corpus, estimates which clusters
co-occur across videos, decays implausible clusters per video, extracts a
corpus-level temporal path from relative-time histograms and aligns each
video to that path with Viterbi decoding. CooccurrenceSegmenter wraps the
stages behind a scikit-learn style fit/predict API; the per-stage functions
remain available for composing custom pipelines.
"""

from .clustering import (
    KMeansConfig,
    UnderdeterminedClusteringError,
    fit_clusters,
    hard_assign,
    log_gaussian_scores,
    score_sequence,
)
from .cooccur import (
    AlreadyRefinedError,
    RefineConfig,
    SaliencePool,
    build_cooccurrence,
    occurrence_ratios,
    refine_scores,
    select_salience_pool,
)
from .decode import DecodeConfig, PathTooLongError, argmax_decode, viterbi_decode
from .evaluation import (
    GroundTruth,
    MetricsReport,
    VideoMetrics,
    confusion_matrix,
    evaluate,
    f1,
    hungarian_match,
    mof,
)
from .fileio import (
    FeatureLoadError,
    GroundTruthLoadError,
    format_report,
    load_features,
    load_ground_truth,
    load_model,
    load_path,
    load_segmentations,
    load_stats,
    save_model,
    save_path,
    save_stats,
    write_features,
    write_ground_truth,
    write_report,
    write_segmentations,
)
from .pipeline import ConfigError, PipelineConfig, PipelineError, PipelineResult, run_pipeline
from .plot import plot_segmentation, render_svg
from .segmenter import CooccurrenceSegmenter
from .synth import SynthSpec, generate, spread_means, true_cooccurrence
from .temporal import (
    EmptyPathError,
    PathConfig,
    build_histograms,
    deduplicate_path,
    extract_path,
)
from .types import (
    VARIANCE_FLOOR,
    ClusterModel,
    CooccurrenceStats,
    CoocsegError,
    Corpus,
    DimensionMismatchError,
    FeatureSequence,
    LabelMapping,
    ScoreMatrix,
    Segment,
    Segmentation,
    TemporalHistogram,
    TemporalPath,
    Violation,
    coerce_corpus,
    validate_corpus,
)

__version__ = "0.1.0"

__all__ = [
    "VARIANCE_FLOOR",
    "AlreadyRefinedError",
    "ClusterModel",
    "ConfigError",
    "CooccurrenceSegmenter",
    "CooccurrenceStats",
    "CoocsegError",
    "Corpus",
    "DecodeConfig",
    "DimensionMismatchError",
    "EmptyPathError",
    "FeatureLoadError",
    "FeatureSequence",
    "GroundTruth",
    "GroundTruthLoadError",
    "KMeansConfig",
    "LabelMapping",
    "MetricsReport",
    "PathConfig",
    "PathTooLongError",
    "PipelineConfig",
    "PipelineError",
    "PipelineResult",
    "RefineConfig",
    "SaliencePool",
    "ScoreMatrix",
    "Segment",
    "Segmentation",
    "SynthSpec",
    "TemporalHistogram",
    "TemporalPath",
    "UnderdeterminedClusteringError",
    "VideoMetrics",
    "Violation",
    "argmax_decode",
    "build_cooccurrence",
    "build_histograms",
    "coerce_corpus",
    "confusion_matrix",
    "deduplicate_path",
    "evaluate",
    "extract_path",
    "f1",
    "fit_clusters",
    "format_report",
    "generate",
    "hard_assign",
    "hungarian_match",
    "load_features",
    "load_ground_truth",
    "load_model",
    "load_path",
    "load_segmentations",
    "load_stats",
    "log_gaussian_scores",
    "mof",
    "occurrence_ratios",
    "plot_segmentation",
    "refine_scores",
    "render_svg",
    "run_pipeline",
    "save_model",
    "save_path",
    "save_stats",
    "score_sequence",
    "select_salience_pool",
    "spread_means",
    "true_cooccurrence",
    "validate_corpus",
    "viterbi_decode",
    "write_features",
    "write_ground_truth",
    "write_report",
    "write_segmentations",
]
