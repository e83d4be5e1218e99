"""End-to-end pipeline: load, cluster, refine, decode, evaluate, write.

One invocation handles one activity's corpus. Every stage failure is
re-raised as PipelineError with the stage name in the message, so CLI users
see where a run died. Given the same config (including seeds) the pipeline
writes byte-identical outputs.
"""

from __future__ import annotations

import dataclasses
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from joblib import Parallel, delayed

from .clustering import KMeansConfig, fit_clusters, score_sequence
from .cooccur import (
    RefineConfig,
    build_cooccurrence,
    occurrence_ratios,
    refine_scores,
    select_salience_pool,
)
from .decode import DecodeConfig, argmax_decode, viterbi_decode
from .evaluation import MetricsReport, evaluate
from .fileio import (
    load_features,
    load_ground_truth,
    save_model,
    save_path,
    save_stats,
    write_report,
    write_segmentations,
)
from .temporal import EmptyPathError, PathConfig, build_histograms, extract_path
from .types import ClusterModel, CooccurrenceStats, CoocsegError, Segmentation, TemporalPath

logger = logging.getLogger(__name__)


class ConfigError(CoocsegError):
    """A pipeline config file or dict could not be interpreted."""


class PipelineError(CoocsegError):
    """A pipeline stage failed; the message carries the stage tag."""

    def __init__(self, message: str, stage: str = "") -> None:
        super().__init__(message)
        self.stage = stage


@dataclass
class PipelineConfig:
    """Declarative description of one pipeline run.

    kmeans defaults to a config with k = n_clusters; when given explicitly
    its k must agree. The use_* toggles switch co-occurrence refinement and
    path-constrained decoding off for ablation runs.
    """

    n_clusters: int
    features: str
    out_dir: str
    ground_truth: str | None = None
    use_cooccurrence: bool = True
    use_multi_occur_path: bool = True
    n_jobs: int = 1
    kmeans: KMeansConfig | None = None
    refine: RefineConfig = field(default_factory=RefineConfig)
    path: PathConfig = field(default_factory=PathConfig)
    decode: DecodeConfig = field(default_factory=DecodeConfig)

    def __post_init__(self) -> None:
        if self.kmeans is None:
            self.kmeans = KMeansConfig(k=self.n_clusters)
        if self.kmeans.k != self.n_clusters:
            raise ValueError(
                f"kmeans.k = {self.kmeans.k} but n_clusters = {self.n_clusters}"
            )

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "PipelineConfig":
        obj = dict(obj)
        sections = {
            "kmeans": KMeansConfig,
            "refine": RefineConfig,
            "path": PathConfig,
            "decode": DecodeConfig,
        }
        known = {
            "n_clusters",
            "features",
            "out_dir",
            "ground_truth",
            "use_cooccurrence",
            "use_multi_occur_path",
            "n_jobs",
            *sections,
        }
        unknown = set(obj) - known
        if unknown:
            raise ConfigError(f"unknown config key(s): {sorted(unknown)}")
        for key in ("n_clusters", "features", "out_dir"):
            if key not in obj:
                raise ConfigError(f"config is missing required key {key!r}")
        kwargs = {k: v for k, v in obj.items() if k not in sections}
        for name, config_cls in sections.items():
            section = dict(obj.get(name, {}))
            if name == "kmeans":
                section.setdefault("k", obj["n_clusters"])
            try:
                kwargs[name] = config_cls(**section)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"invalid {name!r} config section: {e}") from e
        try:
            return cls(**kwargs)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"invalid config: {e}") from e

    @classmethod
    def from_file(cls, path: "str | Path") -> "PipelineConfig":
        path = Path(path)
        try:
            obj = json.loads(path.read_text())
        except OSError as e:
            raise ConfigError(f"{path}: cannot read config ({e})") from e
        except json.JSONDecodeError as e:
            raise ConfigError(f"{path}: config is not valid JSON ({e})") from e
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(obj)


@dataclass
class PipelineResult:
    model: ClusterModel
    stats: CooccurrenceStats
    temporal_path: TemporalPath | None
    segmentations: list[Segmentation]
    report: MetricsReport | None


def _stage(name: str, fn):
    try:
        return fn()
    except PipelineError:
        raise
    except (CoocsegError, OSError, ValueError, KeyError) as e:
        raise PipelineError(f"[{name}] {e}", stage=name) from e


def run_pipeline(cfg: PipelineConfig) -> PipelineResult:
    """Execute every stage and write all artifacts under cfg.out_dir.

    Writes model.json, cooccurrence.json, path.json (when a path was
    extracted), config.json (the resolved config), segments/<id>.txt and,
    when ground truth is supplied, report.txt ending in mof=/f1= lines.
    """
    corpus = _stage("load-features", lambda: load_features(cfg.features))
    ground_truth = None
    if cfg.ground_truth is not None:
        ground_truth = _stage(
            "load-ground-truth", lambda: load_ground_truth(cfg.ground_truth, corpus)
        )

    model = _stage("cluster", lambda: fit_clusters(corpus, cfg.kmeans))
    logger.info("clustered %d sequences into %d clusters", len(corpus), model.k)
    stats = _stage("cooccurrence", lambda: build_cooccurrence(model, corpus, cfg.refine))

    def _build_path() -> TemporalPath | None:
        histograms = build_histograms(model, corpus, cfg.path)
        try:
            return extract_path(histograms, cfg.path)
        except EmptyPathError:
            logger.warning(
                "no histogram bin exceeds theta=%g; falling back to argmax decoding",
                cfg.path.theta,
            )
            return None

    temporal_path = None
    if cfg.use_multi_occur_path:
        temporal_path = _stage("temporal-path", _build_path)

    def _decode_one(seq) -> Segmentation:
        scores = score_sequence(model, seq)
        if cfg.use_cooccurrence:
            ratios = occurrence_ratios(model, seq.id)
            pool = select_salience_pool(ratios, stats, cfg.refine)
            scores = refine_scores(scores, pool, cfg.refine)
        if temporal_path is not None:
            return viterbi_decode(scores, temporal_path, cfg.decode)
        return argmax_decode(scores)

    def _decode_all() -> list[Segmentation]:
        if cfg.n_jobs == 1:
            return [_decode_one(seq) for seq in corpus]
        return Parallel(n_jobs=cfg.n_jobs)(delayed(_decode_one)(seq) for seq in corpus)

    segmentations = _stage("decode", _decode_all)

    report = None
    if ground_truth is not None:
        report = _stage(
            "evaluate", lambda: evaluate(segmentations, ground_truth, cfg.n_clusters)
        )
        logger.info("mof=%.6f f1=%.6f", report.mof, report.f1)

    def _write() -> None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "config.json").write_text(
            json.dumps(cfg.to_dict(), sort_keys=True, indent=2) + "\n"
        )
        save_model(model, out / "model.json")
        save_stats(stats, out / "cooccurrence.json")
        if temporal_path is not None:
            save_path(temporal_path, out / "path.json")
        write_segmentations(segmentations, out / "segments")
        if report is not None:
            write_report(report, out / "report.txt")

    _stage("write-output", _write)
    return PipelineResult(
        model=model,
        stats=stats,
        temporal_path=temporal_path,
        segmentations=segmentations,
        report=report,
    )
