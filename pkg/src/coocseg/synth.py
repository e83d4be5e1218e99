"""Synthetic corpus generator with known ground truth.

Videos are sampled from a small grammar of sub-action sequences: each video
picks one admissible sequence, optionally drops some sub-actions, draws a
length for every step and emits frames from that step's isotropic Gaussian.
Because the true per-frame labels are known, generated corpora double as
oracles for the co-occurrence statistics and for end-to-end recovery tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .evaluation import GroundTruth
from .types import CooccurrenceStats, Corpus, FeatureSequence


@dataclass
class SynthSpec:
    """Everything needed to generate one corpus deterministically.

    Args mirror the generative story: n_subactions Gaussians in dim
    dimensions (one mean row each, shared isotropic sigma), a grammar of
    admissible sub-action orderings sampled by weight, a per-video chance
    of dropping each optional sub-action, and a uniform frames-per-step
    range. sigma = 0 gives noiseless corpora whose frames sit exactly on
    the means.
    """

    n_subactions: int
    dim: int
    n_videos: int
    means: np.ndarray
    sigma: float
    grammar: tuple[tuple[int, ...], ...]
    segment_frames: tuple[int, int]
    grammar_weights: tuple[float, ...] | None = None
    optional_subactions: tuple[int, ...] = ()
    drop_prob: float = 0.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.n_subactions < 1 or self.dim < 1 or self.n_videos < 1:
            raise ValueError("n_subactions, dim and n_videos must all be >= 1")
        means = np.asarray(self.means, dtype=np.float64)
        if means.shape != (self.n_subactions, self.dim):
            raise ValueError(
                f"means must have shape ({self.n_subactions}, {self.dim}), got {means.shape}"
            )
        gaps = cdist(means, means)
        np.fill_diagonal(gaps, np.inf)
        if self.n_subactions > 1 and gaps.min() == 0:
            raise ValueError("sub-action means must be pairwise distinct")
        self.means = means
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        grammar = tuple(tuple(int(s) for s in seq) for seq in self.grammar)
        if not grammar:
            raise ValueError("grammar needs at least one sequence")
        for seq in grammar:
            if not seq:
                raise ValueError("grammar sequences must be non-empty")
            if any(s < 0 or s >= self.n_subactions for s in seq):
                raise ValueError(f"grammar step outside [0, {self.n_subactions}): {seq}")
        self.grammar = grammar
        if self.grammar_weights is not None:
            weights = tuple(float(w) for w in self.grammar_weights)
            if len(weights) != len(grammar) or any(w <= 0 for w in weights):
                raise ValueError("grammar_weights must be positive, one per grammar sequence")
            self.grammar_weights = weights
        optional = tuple(int(s) for s in self.optional_subactions)
        if any(s < 0 or s >= self.n_subactions for s in optional):
            raise ValueError("optional sub-action ids must lie in range")
        self.optional_subactions = optional
        if not 0 <= self.drop_prob <= 1:
            raise ValueError("drop_prob must lie in [0, 1]")
        lo, hi = (int(self.segment_frames[0]), int(self.segment_frames[1]))
        if lo < 1 or hi < lo:
            raise ValueError("segment_frames must satisfy 1 <= lo <= hi")
        self.segment_frames = (lo, hi)


def spread_means(
    n_subactions: int, dim: int, separation: float, rng_seed: int = 0
) -> np.ndarray:
    """Random means rescaled so the closest pair sits exactly `separation` apart."""
    if separation <= 0:
        raise ValueError("separation must be > 0")
    rng = np.random.default_rng(rng_seed)
    if n_subactions == 1:
        return rng.standard_normal((1, dim))
    while True:
        points = rng.standard_normal((n_subactions, dim))
        gaps = cdist(points, points)
        np.fill_diagonal(gaps, np.inf)
        closest = gaps.min()
        if closest > 0:
            return points * (separation / closest)


def generate(spec: SynthSpec) -> tuple[Corpus, GroundTruth]:
    """Sample a corpus plus its ground truth, fully determined by spec.rng_seed.

    Each video draws from an independent child seed, so corpora are stable
    under parallel generation and adding videos never reshuffles earlier ones.
    """
    if spec.grammar_weights is None:
        probs = np.full(len(spec.grammar), 1.0 / len(spec.grammar))
    else:
        probs = np.asarray(spec.grammar_weights, dtype=np.float64)
        probs = probs / probs.sum()
    children = np.random.SeedSequence(spec.rng_seed).spawn(spec.n_videos)
    lo, hi = spec.segment_frames
    sequences = []
    labels: dict[str, np.ndarray] = {}
    for m, child in enumerate(children):
        rng = np.random.default_rng(child)
        steps = list(spec.grammar[rng.choice(len(spec.grammar), p=probs)])
        if spec.optional_subactions and spec.drop_prob > 0:
            dropped = {s for s in spec.optional_subactions if rng.random() < spec.drop_prob}
            kept = [s for s in steps if s not in dropped]
            if kept:  # never drop a video down to nothing
                steps = kept
        frame_blocks = []
        label_blocks = []
        for step in steps:
            length = int(rng.integers(lo, hi + 1))
            noise = rng.standard_normal((length, spec.dim))
            frame_blocks.append(spec.means[step] + spec.sigma * noise)
            label_blocks.append(np.full(length, step, dtype=np.intp))
        video_id = f"video{m:04d}"
        sequences.append(FeatureSequence(id=video_id, frames=np.concatenate(frame_blocks)))
        labels[video_id] = np.concatenate(label_blocks)
    ground_truth = GroundTruth(
        labels=labels,
        label_names=tuple(f"sub{i:03d}" for i in range(spec.n_subactions)),
    )
    return Corpus(sequences=tuple(sequences)), ground_truth


def true_cooccurrence(ground_truth: GroundTruth, tau1: float) -> CooccurrenceStats:
    """Co-occurrence statistics computed from ground-truth labels directly.

    Applies the same appearance rule (frame ratio strictly above tau1) to
    the true labels, giving an independent reference for the statistics the
    pipeline estimates from clustered data.
    """
    k = ground_truth.n_labels
    occurs = np.zeros(k, dtype=np.int64)
    pair_counts = np.zeros((k, k), dtype=np.int64)
    for arr in ground_truth.labels.values():
        ratios = np.bincount(arr, minlength=k) / arr.shape[0]
        present = np.flatnonzero(ratios > tau1)
        occurs[present] += 1
        for pos, i in enumerate(present):
            for j in present[pos + 1 :]:
                pair_counts[i, j] += 1
                pair_counts[j, i] += 1
    pair_counts[np.arange(k), np.arange(k)] = occurs
    conditional = np.zeros((k, k), dtype=np.float64)
    nonzero = occurs > 0
    conditional[nonzero] = pair_counts[nonzero] / occurs[nonzero, None]
    return CooccurrenceStats(
        occurs=occurs, pair_counts=pair_counts, conditional=conditional, tau1=tau1
    )
