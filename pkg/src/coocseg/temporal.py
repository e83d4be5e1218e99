"""Cluster temporal-location histograms and path extraction.

Each frame gets a relative timestamp t = n / n_frames with 1-based n, so
t falls in (0, 1]. Per cluster, the timestamps of its hard-assigned frames
across the whole corpus are binned into bin_count equal bins ([b/B, (b+1)/B),
last bin closed) and normalized. Bins whose normalized count exceeds theta
are kept, merged across clusters, and sorted by time; the resulting cluster
order is the temporal path used to constrain decoding. Because several bins
of one cluster can survive, the path can revisit a cluster.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .types import ClusterModel, CoocsegError, Corpus, TemporalHistogram, TemporalPath


class EmptyPathError(CoocsegError):
    """No histogram bin cleared theta; callers may lower theta or fall back."""


@dataclass
class PathConfig:
    bin_count: int = 20
    theta: float = 0.15

    def __post_init__(self) -> None:
        if self.bin_count < 1:
            raise ValueError("bin_count must be >= 1")
        if not 0 < self.theta < 1:
            raise ValueError("theta must lie in (0, 1)")


def build_histograms(
    model: ClusterModel, corpus: Corpus, cfg: PathConfig
) -> list[TemporalHistogram]:
    """Histogram of relative frame timestamps per cluster, one per cluster.

    Bin indices are computed with integer arithmetic (floor(n*B / N)) so
    frames landing exactly on a bin edge never drift to the wrong side
    through float rounding. t = 1 goes to the last bin.
    """
    b = cfg.bin_count
    counts = np.zeros((model.k, b), dtype=np.float64)
    for seq in corpus:
        assignments = model.frame_assignments.get(seq.id)
        if assignments is None:
            raise KeyError(f"model has no recorded assignments for sequence {seq.id!r}")
        n = assignments.shape[0]
        frame_numbers = np.arange(1, n + 1)
        bins = np.minimum(frame_numbers * b // n, b - 1)
        np.add.at(counts, (assignments, bins), 1.0)
    histograms = []
    for cluster in range(model.k):
        total = counts[cluster].sum()
        normalized = counts[cluster] / total if total > 0 else counts[cluster]
        histograms.append(TemporalHistogram(cluster_id=cluster, normalized_counts=normalized))
    return histograms


def extract_path(histograms: list[TemporalHistogram], cfg: PathConfig) -> TemporalPath:
    """Merge over-theta bins from all clusters into one time-ordered path.

    Selected (bin, cluster) pairs are sorted by bin index, ties going to the
    lower cluster id; consecutive duplicates of the same cluster collapse
    into a single step.
    """
    selected: list[tuple[int, int]] = []
    for hist in histograms:
        for bin_index in np.flatnonzero(hist.normalized_counts > cfg.theta):
            selected.append((int(bin_index), hist.cluster_id))
    if not selected:
        raise EmptyPathError(
            f"no histogram bin exceeds theta={cfg.theta}; lower theta to get a path"
        )
    selected.sort()
    steps: list[int] = []
    for _, cluster in selected:
        if not steps or steps[-1] != cluster:
            steps.append(cluster)
    return TemporalPath(steps=tuple(steps))


def deduplicate_path(path: TemporalPath) -> TemporalPath:
    """Single-occurrence variant: keep only the first visit of each cluster."""
    seen: set[int] = set()
    steps = []
    for step in path.steps:
        if step not in seen:
            seen.add(step)
            steps.append(step)
    return TemporalPath(steps=tuple(steps))
