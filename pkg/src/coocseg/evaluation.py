"""Cluster-to-label matching and segmentation metrics.

Predicted cluster ids carry no semantics, so evaluation first finds the
one-to-one cluster/label assignment that maximizes total frame overlap on a
confusion matrix pooled over all videos, then reports frame accuracy (MoF)
and a segment-level F1 score under that fixed global mapping.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .types import LabelMapping, Segmentation


@dataclass(frozen=True)
class GroundTruth:
    """Reference per-frame labels for a set of sequences.

    labels maps sequence id to an int array over the label vocabulary;
    label_names gives the printable token for each label id.
    """

    labels: Mapping[str, np.ndarray]
    label_names: tuple[str, ...]

    def __post_init__(self) -> None:
        labels = {}
        n_labels = len(self.label_names)
        for seq_id, arr in dict(self.labels).items():
            arr = np.asarray(arr, dtype=np.intp)
            if arr.ndim != 1:
                raise ValueError(f"ground truth for {seq_id!r} must be 1-D")
            if arr.size and (arr.min() < 0 or arr.max() >= n_labels):
                raise ValueError(f"ground truth for {seq_id!r} uses ids outside the vocabulary")
            arr = arr.copy()
            arr.setflags(write=False)
            labels[seq_id] = arr
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "label_names", tuple(self.label_names))

    @property
    def n_labels(self) -> int:
        return len(self.label_names)


@dataclass(frozen=True)
class VideoMetrics:
    mof: float
    f1: float
    n_frames: int


@dataclass(frozen=True)
class MetricsReport:
    mof: float
    f1: float
    per_video: Mapping[str, VideoMetrics]
    confusion: np.ndarray
    mapping: LabelMapping


def confusion_matrix(
    segmentations: Iterable[Segmentation], ground_truth: GroundTruth, n_clusters: int
) -> np.ndarray:
    """(n_clusters, n_labels) frame counts pooled over all videos."""
    counts = np.zeros((n_clusters, ground_truth.n_labels), dtype=np.int64)
    for seg in segmentations:
        gt = ground_truth.labels.get(seg.sequence_id)
        if gt is None:
            raise KeyError(f"no ground truth for sequence {seg.sequence_id!r}")
        if gt.shape[0] != seg.n_frames:
            raise ValueError(
                f"sequence {seg.sequence_id!r}: {seg.n_frames} predicted frames "
                f"vs {gt.shape[0]} ground-truth frames"
            )
        np.add.at(counts, (seg.labels, gt), 1)
    return counts


def hungarian_match(confusion: np.ndarray) -> LabelMapping:
    """Injective cluster -> label map maximizing total matched frame count.

    Solved as a linear assignment problem on the negated count matrix;
    when clusters outnumber labels, the surplus clusters stay unmapped.
    """
    confusion = np.asarray(confusion)
    if np.any(confusion < 0):
        raise ValueError("confusion counts must be non-negative")
    rows, cols = linear_sum_assignment(-confusion)
    return LabelMapping(mapping={int(r): int(c) for r, c in zip(rows, cols)})


def mof(
    segmentations: Iterable[Segmentation],
    ground_truth: GroundTruth,
    mapping: LabelMapping,
) -> float:
    """Fraction of frames whose mapped prediction equals the ground truth."""
    correct = 0
    total = 0
    for seg in segmentations:
        gt = ground_truth.labels[seg.sequence_id]
        mapped = np.array(
            [-1 if (m := mapping.get(c)) is None else m for c in range(seg.labels.max() + 1)]
        )
        correct += int(np.count_nonzero(mapped[seg.labels] == gt))
        total += seg.n_frames
    return correct / total if total else 0.0


def _video_f1(seg: Segmentation, gt: np.ndarray, mapping: LabelMapping) -> float:
    """Segment-level F1 for one video under the majority-overlap rule.

    A predicted segment counts as a true positive when strictly more than
    half of its frames carry the ground-truth label its cluster maps to;
    each ground-truth segment can be claimed at most once, which keeps
    recall (and hence F1) within [0, 1] even for fragmented predictions.
    """
    gt_segments = Segmentation(sequence_id=seg.sequence_id, labels=gt).segments
    claimed = [False] * len(gt_segments)
    true_positives = 0
    predicted_segments = seg.segments
    for pseg in predicted_segments:
        target = mapping.get(pseg.label)
        if target is None:
            continue
        span = gt[pseg.start : pseg.end]
        if np.count_nonzero(span == target) * 2 <= pseg.length:
            continue
        # Claim the ground-truth segment of the target label with the largest overlap.
        best_idx = -1
        best_overlap = 0
        for idx, gseg in enumerate(gt_segments):
            if gseg.label != target:
                continue
            overlap = min(pseg.end, gseg.end) - max(pseg.start, gseg.start)
            if overlap > best_overlap:
                best_overlap = overlap
                best_idx = idx
        if best_idx >= 0 and not claimed[best_idx]:
            claimed[best_idx] = True
            true_positives += 1
    precision = true_positives / len(predicted_segments)
    recall = true_positives / len(gt_segments)
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def f1(
    segmentations: Iterable[Segmentation],
    ground_truth: GroundTruth,
    mapping: LabelMapping,
) -> float:
    """Segment-level F1, computed per video and averaged over videos."""
    scores = [
        _video_f1(seg, ground_truth.labels[seg.sequence_id], mapping)
        for seg in segmentations
    ]
    if not scores:
        return 0.0
    return float(np.mean(scores))


def evaluate(
    segmentations: Sequence[Segmentation],
    ground_truth: GroundTruth,
    n_clusters: int,
) -> MetricsReport:
    """Full evaluation: global Hungarian mapping, MoF, F1 and per-video stats."""
    confusion = confusion_matrix(segmentations, ground_truth, n_clusters)
    mapping = hungarian_match(confusion)
    per_video = {}
    for seg in segmentations:
        gt = ground_truth.labels[seg.sequence_id]
        video_mof = mof([seg], ground_truth, mapping)
        per_video[seg.sequence_id] = VideoMetrics(
            mof=video_mof, f1=_video_f1(seg, gt, mapping), n_frames=seg.n_frames
        )
    return MetricsReport(
        mof=mof(segmentations, ground_truth, mapping),
        f1=f1(segmentations, ground_truth, mapping),
        per_video=per_video,
        confusion=confusion,
        mapping=mapping,
    )
