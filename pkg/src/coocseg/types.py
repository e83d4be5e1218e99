"""Shared domain types for the segmentation pipeline.

Every type here is immutable after construction (arrays are marked
read-only), so values can be shared freely across parallel workers.
Construction is deliberately lenient about *content* problems (NaN frames,
mismatched dimensions across a corpus): those are surfaced by
:func:`validate_corpus` so loaders can report them instead of crashing on
the first bad file. Structural problems (wrong rank, wrong shape) raise
immediately.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

import numpy as np

# Diagonal covariance floor applied per component when fitting clusters.
VARIANCE_FLOOR = 1e-6


class CoocsegError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(CoocsegError):
    """Feature dimension of an input does not match the model/corpus."""


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    if out is arr:
        out = arr.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class FeatureSequence:
    """One video: an ordered list of per-frame feature vectors.

    frames has shape (n_frames, dim). Content checks (finiteness,
    n_frames >= 1) are deferred to validate_corpus.
    """

    id: str
    frames: np.ndarray

    def __post_init__(self) -> None:
        frames = np.asarray(self.frames, dtype=np.float64)
        if frames.ndim != 2:
            raise ValueError(
                f"sequence {self.id!r}: frames must be 2-D (n_frames, dim), got ndim={frames.ndim}"
            )
        object.__setattr__(self, "frames", _freeze(frames))

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def dim(self) -> int:
        return self.frames.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FeatureSequence):
            return NotImplemented
        return self.id == other.id and np.array_equal(self.frames, other.frames)


@dataclass(frozen=True)
class Corpus:
    """A set of feature sequences sharing one feature dimension."""

    sequences: tuple[FeatureSequence, ...]

    def __post_init__(self) -> None:
        seqs = tuple(self.sequences)
        if not seqs:
            raise ValueError("a corpus needs at least one sequence")
        ids = [s.id for s in seqs]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate sequence ids in corpus: {dupes}")
        object.__setattr__(self, "sequences", seqs)

    @property
    def dim(self) -> int:
        return self.sequences[0].dim

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.sequences)

    def __len__(self) -> int:
        return len(self.sequences)

    def __iter__(self) -> Iterator[FeatureSequence]:
        return iter(self.sequences)

    def __getitem__(self, index: int) -> FeatureSequence:
        return self.sequences[index]

    def by_id(self, seq_id: str) -> FeatureSequence:
        for s in self.sequences:
            if s.id == seq_id:
                return s
        raise KeyError(f"no sequence with id {seq_id!r}")


def coerce_corpus(data: "Corpus | Sequence[np.ndarray]") -> Corpus:
    """Input-validation helper: accept a Corpus or a list of (n, d) arrays.

    Plain arrays get positional ids ("seq0", "seq1", ...), mirroring how
    estimator-style APIs accept bare arrays. Either way the result is fully
    validated; content problems raise with every violation listed.
    """
    if isinstance(data, Corpus):
        corpus = data
    else:
        corpus = Corpus(
            sequences=tuple(
                FeatureSequence(id=f"seq{i}", frames=np.asarray(x, dtype=np.float64))
                for i, x in enumerate(data)
            )
        )
    violations = validate_corpus(corpus)
    if violations:
        raise ValueError("invalid input: " + "; ".join(str(v) for v in violations))
    return corpus


@dataclass(frozen=True)
class Violation:
    """One problem found in a corpus."""

    sequence_id: str
    kind: str  # "dimension-mismatch" | "non-finite" | "empty-sequence"
    detail: str

    def __str__(self) -> str:
        return f"[{self.kind}] {self.sequence_id}: {self.detail}"


def validate_corpus(corpus: Corpus) -> list[Violation]:
    """Report-only corpus check; an empty list means the corpus is valid."""
    violations: list[Violation] = []
    dim = corpus.sequences[0].dim
    for seq in corpus:
        if seq.n_frames < 1:
            violations.append(Violation(seq.id, "empty-sequence", "sequence has no frames"))
        if seq.dim != dim:
            violations.append(
                Violation(seq.id, "dimension-mismatch", f"dim {seq.dim} != corpus dim {dim}")
            )
        if seq.n_frames and not np.all(np.isfinite(seq.frames)):
            bad = int(np.count_nonzero(~np.isfinite(seq.frames).all(axis=1)))
            violations.append(
                Violation(seq.id, "non-finite", f"{bad} frame(s) contain NaN/Inf components")
            )
    return violations


@dataclass(frozen=True)
class ClusterModel:
    """K cluster centroids plus per-cluster diagonal Gaussians.

    centroids come from the best k-means restart; means/variances are the
    statistics of the frames hard-assigned to each cluster, with every
    variance component floored at VARIANCE_FLOOR. frame_assignments maps
    sequence id -> (n_frames,) int array of hard cluster ids.
    """

    centroids: np.ndarray
    means: np.ndarray
    variances: np.ndarray
    frame_assignments: Mapping[str, np.ndarray]

    def __post_init__(self) -> None:
        centroids = _freeze(np.asarray(self.centroids, dtype=np.float64))
        means = _freeze(np.asarray(self.means, dtype=np.float64))
        variances = _freeze(np.asarray(self.variances, dtype=np.float64))
        if centroids.ndim != 2 or means.shape != centroids.shape or variances.shape != centroids.shape:
            raise ValueError("centroids, means and variances must all be (k, dim)")
        if np.any(variances <= 0):
            raise ValueError("all variance components must be positive")
        assignments = {}
        k = centroids.shape[0]
        for seq_id, a in dict(self.frame_assignments).items():
            a = np.asarray(a, dtype=np.intp)
            if a.size and (a.min() < 0 or a.max() >= k):
                raise ValueError(f"hard assignments for {seq_id!r} fall outside [0, {k})")
            assignments[seq_id] = _freeze(a)
        object.__setattr__(self, "centroids", centroids)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)
        object.__setattr__(self, "frame_assignments", assignments)

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    @property
    def dim(self) -> int:
        return self.centroids.shape[1]


@dataclass(frozen=True)
class ScoreMatrix:
    """Per-frame cluster log-densities for one sequence, shape (k, n_frames).

    Scores live in natural-log space throughout: raw densities underflow
    already for moderate feature dimensions. refined marks matrices that
    went through salience-pool decay.
    """

    sequence_id: str
    values: np.ndarray
    refined: bool = False

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError("score matrix must be 2-D (k, n_frames)")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"score matrix for {self.sequence_id!r} contains non-finite entries")
        object.__setattr__(self, "values", _freeze(values))

    @property
    def k(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class CooccurrenceStats:
    """Corpus-level cluster occurrence counts and conditional probabilities.

    occurs[i] counts videos where cluster i appears (frame ratio > tau1).
    pair_counts[i, j] counts videos where both appear, with the diagonal
    defined as pair_counts[i, i] = occurs[i] so a cluster always co-occurs
    with itself. conditional[i, j] is P(j | i) = pair_counts[i, j] /
    occurs[i], and 0 whenever occurs[i] == 0.
    """

    occurs: np.ndarray
    pair_counts: np.ndarray
    conditional: np.ndarray
    tau1: float

    def __post_init__(self) -> None:
        occurs = _freeze(np.asarray(self.occurs, dtype=np.int64))
        pairs = _freeze(np.asarray(self.pair_counts, dtype=np.int64))
        cond = _freeze(np.asarray(self.conditional, dtype=np.float64))
        k = occurs.shape[0]
        if pairs.shape != (k, k) or cond.shape != (k, k):
            raise ValueError("pair_counts and conditional must be (k, k)")
        if not np.array_equal(pairs, pairs.T):
            raise ValueError("pair_counts must be symmetric")
        if not np.array_equal(np.diag(pairs), occurs):
            raise ValueError("pair_counts diagonal must equal occurs")
        if np.any(pairs > np.minimum.outer(occurs, occurs)):
            raise ValueError("pair_counts cannot exceed min(occurs[i], occurs[j])")
        if np.any(cond < 0) or np.any(cond > 1):
            raise ValueError("conditional probabilities must lie in [0, 1]")
        object.__setattr__(self, "occurs", occurs)
        object.__setattr__(self, "pair_counts", pairs)
        object.__setattr__(self, "conditional", cond)

    @property
    def k(self) -> int:
        return self.occurs.shape[0]


@dataclass(frozen=True)
class TemporalHistogram:
    """Distribution of one cluster's frames over relative time in [0, 1].

    normalized_counts has one entry per bin and sums to 1, except for
    clusters that received no frames at all (then it is all zero).
    """

    cluster_id: int
    normalized_counts: np.ndarray

    def __post_init__(self) -> None:
        counts = np.asarray(self.normalized_counts, dtype=np.float64)
        if counts.ndim != 1 or counts.size < 1:
            raise ValueError("normalized_counts must be a non-empty 1-D array")
        if np.any(counts < 0):
            raise ValueError("histogram counts must be non-negative")
        total = counts.sum()
        if not (abs(total) <= 1e-9 or abs(total - 1.0) <= 1e-9):
            raise ValueError(f"histogram must sum to 0 or 1, got {total}")
        object.__setattr__(self, "normalized_counts", _freeze(counts))

    @property
    def bin_count(self) -> int:
        return self.normalized_counts.shape[0]


@dataclass(frozen=True)
class TemporalPath:
    """Ordered cluster visit sequence used to constrain decoding.

    A cluster may appear several times, just never twice in a row.
    """

    steps: tuple[int, ...]

    def __post_init__(self) -> None:
        steps = tuple(int(s) for s in self.steps)
        if not steps:
            raise ValueError("a temporal path needs at least one step")
        for a, b in zip(steps, steps[1:]):
            if a == b:
                raise ValueError("consecutive path steps must differ")
        object.__setattr__(self, "steps", steps)

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class Segment:
    """Maximal run of equal labels: [start, end) in frame indices."""

    label: int
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Segmentation:
    """Per-frame cluster labels for one sequence plus derived segments."""

    sequence_id: str
    labels: np.ndarray

    def __post_init__(self) -> None:
        labels = np.asarray(self.labels, dtype=np.intp)
        if labels.ndim != 1 or labels.size < 1:
            raise ValueError("labels must be a non-empty 1-D array")
        object.__setattr__(self, "labels", _freeze(labels))

    @property
    def n_frames(self) -> int:
        return self.labels.shape[0]

    @property
    def segments(self) -> list[Segment]:
        labels = self.labels
        boundaries = np.flatnonzero(labels[1:] != labels[:-1]) + 1
        starts = np.concatenate(([0], boundaries))
        ends = np.concatenate((boundaries, [labels.size]))
        return [Segment(int(labels[s]), int(s), int(e)) for s, e in zip(starts, ends)]


@dataclass(frozen=True)
class LabelMapping:
    """Injective partial map from cluster id to ground-truth label id."""

    mapping: Mapping[int, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        mapping = {int(k): int(v) for k, v in dict(self.mapping).items()}
        values = list(mapping.values())
        if len(set(values)) != len(values):
            raise ValueError("label mapping must be injective")
        object.__setattr__(self, "mapping", mapping)

    def get(self, cluster_id: int) -> int | None:
        return self.mapping.get(cluster_id)

    def __len__(self) -> int:
        return len(self.mapping)
