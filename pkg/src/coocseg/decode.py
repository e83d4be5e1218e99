"""Path-constrained Viterbi decoding of a score matrix into a segmentation.

Frames are aligned monotonically to path positions: the first frame sits at
the first path step, the last frame at the last step, and between frames the
alignment either stays at the current step or advances by one. The dynamic
program maximizes the summed frame log-scores plus stay/advance transition
weights in O(n_frames * path_length).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .types import CoocsegError, ScoreMatrix, Segmentation, TemporalPath


class PathTooLongError(CoocsegError):
    """The sequence has fewer frames than the path has steps."""


@dataclass
class DecodeConfig:
    """Log transition weights for staying vs. advancing along the path."""

    stay_log_prob: float = math.log(0.5)
    advance_log_prob: float = math.log(0.5)

    def __post_init__(self) -> None:
        for name in ("stay_log_prob", "advance_log_prob"):
            value = getattr(self, name)
            if not math.isfinite(value) or value > 0:
                raise ValueError(f"{name} must be finite and <= 0, got {value}")


def viterbi_decode(
    scores: ScoreMatrix, path: TemporalPath, cfg: DecodeConfig | None = None
) -> Segmentation:
    """Best monotone alignment of frames to path steps.

    The only moves are staying at the current path position or advancing by
    one; the alignment is forced to start at the first step and end at the
    last. On equal scores staying wins, so boundaries land as late as
    possible, deterministically.

    Args:
        scores: (k, n_frames) log-score matrix, refined or not.
        path: cluster visit order; every step receives at least one frame.
        cfg: transition weights; defaults to log 0.5 for both moves.

    Returns:
        Segmentation labeling frame n with the cluster of its aligned step.

    Raises:
        PathTooLongError: when n_frames < len(path).
    """
    cfg = cfg or DecodeConfig()
    steps = path.steps
    n = scores.n_frames
    t = len(steps)
    if n < t:
        raise PathTooLongError(
            f"sequence {scores.sequence_id!r} has {n} frames but the path has {t} steps"
        )
    if max(steps) >= scores.k:
        raise ValueError(f"path references cluster {max(steps)} outside [0, {scores.k})")

    # Suffix scores: beta[p, f] = best completion score from position p at
    # frame f. Reconstruction then walks forward in time, which lets the
    # stay-on-tie rule act on the actual time direction.
    emit = scores.values[np.asarray(steps), :]  # (t, n)
    beta = np.full((t, n), -np.inf)
    beta[t - 1, n - 1] = emit[t - 1, n - 1]
    for frame in range(n - 2, -1, -1):
        stay = beta[:, frame + 1] + cfg.stay_log_prob
        advance = np.full(t, -np.inf)
        advance[:-1] = beta[1:, frame + 1] + cfg.advance_log_prob
        beta[:, frame] = emit[:, frame] + np.maximum(stay, advance)

    labels = np.empty(n, dtype=np.intp)
    position = 0  # alignment must start on the first step
    labels[0] = steps[0]
    for frame in range(1, n):
        stay_score = beta[position, frame] + cfg.stay_log_prob
        if position + 1 < t:
            advance_score = beta[position + 1, frame] + cfg.advance_log_prob
        else:
            advance_score = -np.inf
        if advance_score > stay_score:  # ties prefer staying
            position += 1
        labels[frame] = steps[position]
    return Segmentation(sequence_id=scores.sequence_id, labels=labels)


def argmax_decode(scores: ScoreMatrix) -> Segmentation:
    """Unconstrained per-frame argmax baseline; ties go to the lower cluster id."""
    labels = np.argmax(scores.values, axis=0)
    return Segmentation(sequence_id=scores.sequence_id, labels=labels)
