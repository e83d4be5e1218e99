"""Corpus-level co-occurrence statistics and salience-pool score refinement.

A cluster "appears" in a video when its share of the video's frames exceeds
tau1. Counting appearances over the whole corpus yields conditional
probabilities P(j|i) = C(i,j)/C(i) that capture which clusters tend to show
up together. Per video, a greedy pool of salient clusters is grown from
those probabilities and every cluster outside the pool has its scores
decayed, which suppresses clusters that are unlikely to occur in that video.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .types import ClusterModel, CooccurrenceStats, CoocsegError, Corpus, ScoreMatrix


class AlreadyRefinedError(CoocsegError):
    """refine_scores was handed a matrix that is already refined."""


@dataclass
class RefineConfig:
    """Thresholds for appearance counting and pool growth, plus the decay."""

    tau1: float = 0.1
    tau2: float = 0.1
    eta: float = 0.5

    def __post_init__(self) -> None:
        if not 0 <= self.tau1 < 1:
            raise ValueError("tau1 must lie in [0, 1)")
        if not 0 <= self.tau2 < 1:
            raise ValueError("tau2 must lie in [0, 1)")
        if not 0 < self.eta <= 1:
            raise ValueError("eta must lie in (0, 1]")


@dataclass(frozen=True)
class SaliencePool:
    """Clusters deemed present in one video, in admission order."""

    members: tuple[int, ...]

    def __post_init__(self) -> None:
        members = tuple(int(m) for m in self.members)
        if not members:
            raise ValueError("a salience pool is never empty")
        if len(set(members)) != len(members):
            raise ValueError("salience pool members must be unique")
        object.__setattr__(self, "members", members)

    def __contains__(self, cluster_id: int) -> bool:
        return int(cluster_id) in self.members

    def __len__(self) -> int:
        return len(self.members)


def occurrence_ratios(model: ClusterModel, seq_id: str) -> np.ndarray:
    """Fraction of a sequence's frames hard-assigned to each cluster."""
    try:
        assignments = model.frame_assignments[seq_id]
    except KeyError:
        raise KeyError(f"model has no recorded assignments for sequence {seq_id!r}") from None
    counts = np.bincount(assignments, minlength=model.k).astype(np.float64)
    return counts / assignments.shape[0]


def build_cooccurrence(
    model: ClusterModel, corpus: Corpus, cfg: RefineConfig
) -> CooccurrenceStats:
    """Count cluster appearances and co-appearances over a whole corpus.

    A cluster appears in a video iff its frame ratio is strictly above
    cfg.tau1. The diagonal pair count is defined as the occurrence count
    itself, so P(i|i) = 1 whenever cluster i appears anywhere.
    """
    k = model.k
    occurs = np.zeros(k, dtype=np.int64)
    pair_counts = np.zeros((k, k), dtype=np.int64)
    for seq in corpus:
        ratios = occurrence_ratios(model, seq.id)
        present = np.flatnonzero(ratios > cfg.tau1)
        occurs[present] += 1
        for a_pos, i in enumerate(present):
            for j in present[a_pos + 1 :]:
                pair_counts[i, j] += 1
                pair_counts[j, i] += 1
    pair_counts[np.arange(k), np.arange(k)] = occurs
    conditional = np.zeros((k, k), dtype=np.float64)
    nonzero = occurs > 0
    conditional[nonzero] = pair_counts[nonzero] / occurs[nonzero, None]
    return CooccurrenceStats(
        occurs=occurs, pair_counts=pair_counts, conditional=conditional, tau1=cfg.tau1
    )


def select_salience_pool(
    ratios: np.ndarray, stats: CooccurrenceStats, cfg: RefineConfig
) -> SaliencePool:
    """Greedily grow the set of clusters considered present in one video.

    Start from the cluster with the largest frame ratio. After each
    admission, every remaining cluster j has its ratio multiplied by
    P(i|j), where i is the cluster just admitted; the updates compound
    across iterations. The best remaining cluster joins the pool while its
    updated ratio stays above tau2. Argmax ties break toward the lower
    cluster id.
    """
    ratios = np.asarray(ratios, dtype=np.float64)
    if ratios.shape != (stats.k,):
        raise ValueError(f"expected {stats.k} ratios, got shape {ratios.shape}")
    working = ratios.copy()
    k0 = int(np.argmax(working))
    members = [k0]
    remaining = [j for j in range(stats.k) if j != k0]
    last_added = k0
    while remaining:
        for j in remaining:
            working[j] *= stats.conditional[j, last_added]  # P(last_added | j)
        best = max(remaining, key=lambda j: (working[j], -j))
        if working[best] > cfg.tau2:
            members.append(best)
            remaining.remove(best)
            last_added = best
        else:
            break
    return SaliencePool(members=tuple(members))


def refine_scores(scores: ScoreMatrix, pool: SaliencePool, cfg: RefineConfig) -> ScoreMatrix:
    """Decay every non-pool cluster's row by eta (additively, in log space)."""
    if scores.refined:
        raise AlreadyRefinedError(
            f"score matrix for {scores.sequence_id!r} was already refined"
        )
    values = scores.values.copy()
    outside = [k for k in range(scores.k) if k not in pool]
    if outside:
        values[outside, :] += math.log(cfg.eta)
    return ScoreMatrix(sequence_id=scores.sequence_id, values=values, refined=True)
