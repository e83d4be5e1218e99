"""Seeded k-means over all corpus frames plus diagonal-Gaussian scoring.

Fitting pools every frame of every sequence in a corpus, clusters them with
restarted k-means++ and then estimates one diagonal Gaussian per cluster
from its hard-assigned frames. Scoring evaluates those Gaussians in
log space to build the per-sequence score matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from .types import (
    VARIANCE_FLOOR,
    ClusterModel,
    CoocsegError,
    Corpus,
    DimensionMismatchError,
    FeatureSequence,
    ScoreMatrix,
)

LOG_2PI = math.log(2.0 * math.pi)


class UnderdeterminedClusteringError(CoocsegError):
    """Fewer frames than requested clusters."""


@dataclass
class KMeansConfig:
    """Knobs for the clustering stage.

    rng_seed makes runs reproducible bit-for-bit; convergence_tol bounds
    the maximum centroid shift between iterations.
    """

    k: int
    max_iters: int = 300
    restarts: int = 10
    rng_seed: int = 0
    convergence_tol: float = 1e-6

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


def _plusplus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """k-means++ seeding; falls back to uniform draws when all distances vanish."""
    n = points.shape[0]
    centroids = np.empty((k, points.shape[1]), dtype=np.float64)
    centroids[0] = points[rng.integers(n)]
    if k == 1:
        return centroids
    closest = cdist(points, centroids[:1], "sqeuclidean")[:, 0]
    for i in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = rng.choice(n, p=closest / total)
        else:
            idx = rng.integers(n)
        centroids[i] = points[idx]
        if i + 1 < k:
            d_new = cdist(points, centroids[i : i + 1], "sqeuclidean")[:, 0]
            np.minimum(closest, d_new, out=closest)
    return centroids


def _repair_empty_clusters(
    points: np.ndarray, centroids: np.ndarray, assignments: np.ndarray
) -> np.ndarray:
    """Hand the point farthest from its own centroid to each empty cluster."""
    k = centroids.shape[0]
    counts = np.bincount(assignments, minlength=k)
    empty = np.flatnonzero(counts == 0)
    if empty.size == 0:
        return assignments
    assignments = assignments.copy()
    dist_to_own = np.linalg.norm(points - centroids[assignments], axis=1)
    for cluster in empty:
        donor = int(np.argmax(dist_to_own))
        assignments[donor] = cluster
        dist_to_own[donor] = -1.0  # keep later repairs from stealing the same point
    return assignments


def _lloyd(
    points: np.ndarray,
    centroids: np.ndarray,
    max_iters: int,
    tol: float,
) -> tuple[np.ndarray, np.ndarray, float, list[float]]:
    """One restart of Lloyd's algorithm.

    Returns (centroids, assignments, inertia, per-iteration inertia trace).
    """
    history: list[float] = []
    assignments = np.zeros(points.shape[0], dtype=np.intp)
    for _ in range(max_iters):
        sq_dists = cdist(points, centroids, "sqeuclidean")
        assignments = np.argmin(sq_dists, axis=1)
        assignments = _repair_empty_clusters(points, centroids, assignments)
        new_centroids = np.empty_like(centroids)
        for cluster in range(centroids.shape[0]):
            members = points[assignments == cluster]
            new_centroids[cluster] = members.mean(axis=0)
        shift = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids
        inertia = float(
            np.sum((points - centroids[assignments]) ** 2)
        )
        history.append(inertia)
        if shift <= tol:
            break
    return centroids, assignments, history[-1], history


def fit_clusters(corpus: Corpus, cfg: KMeansConfig) -> ClusterModel:
    """Cluster all frames of a corpus and fit per-cluster diagonal Gaussians.

    Args:
        corpus: sequences sharing one feature dimension.
        cfg: clustering configuration, including the RNG seed.

    Returns:
        ClusterModel with centroids from the best-inertia restart, per-cluster
        mean/variance statistics (variance floored at VARIANCE_FLOOR) and the
        per-sequence hard assignments.

    Raises:
        UnderdeterminedClusteringError: when the corpus holds fewer frames
            than cfg.k.
    """
    points = np.concatenate([seq.frames for seq in corpus], axis=0)
    if points.shape[0] < cfg.k:
        raise UnderdeterminedClusteringError(
            f"cannot fit {cfg.k} clusters from {points.shape[0]} frame(s)"
        )
    rng = np.random.default_rng(cfg.rng_seed)
    best_centroids: np.ndarray | None = None
    best_inertia = np.inf
    for _ in range(cfg.restarts):
        init = _plusplus_init(points, cfg.k, rng)
        centroids, _, inertia, _ = _lloyd(points, init, cfg.max_iters, cfg.convergence_tol)
        if inertia < best_inertia:
            best_inertia = inertia
            best_centroids = centroids
    assert best_centroids is not None

    # Final hard assignment against the winning centroids, then Gaussian stats.
    assignments = np.argmin(cdist(points, best_centroids, "sqeuclidean"), axis=1)
    assignments = _repair_empty_clusters(points, best_centroids, assignments)
    means = np.empty_like(best_centroids)
    variances = np.empty_like(best_centroids)
    for cluster in range(cfg.k):
        members = points[assignments == cluster]
        if members.shape[0] == 0:
            means[cluster] = best_centroids[cluster]
            variances[cluster] = VARIANCE_FLOOR
            continue
        means[cluster] = members.mean(axis=0)
        variances[cluster] = np.maximum(members.var(axis=0), VARIANCE_FLOOR)

    per_sequence: dict[str, np.ndarray] = {}
    offset = 0
    for seq in corpus:
        per_sequence[seq.id] = assignments[offset : offset + seq.n_frames]
        offset += seq.n_frames
    return ClusterModel(
        centroids=best_centroids,
        means=means,
        variances=variances,
        frame_assignments=per_sequence,
    )


def log_gaussian_scores(
    frames: np.ndarray, means: np.ndarray, variances: np.ndarray
) -> np.ndarray:
    """Log-density of each frame under each diagonal Gaussian, shape (k, n)."""
    # log N(x; mu, diag(var)) = -0.5 * sum_j [log(2*pi*var_j) + (x_j-mu_j)^2/var_j]
    log_norm = 0.5 * np.sum(LOG_2PI + np.log(variances), axis=1)  # (k,)
    diff = frames[None, :, :] - means[:, None, :]  # (k, n, d)
    mahalanobis = np.sum(diff * diff / variances[:, None, :], axis=2)  # (k, n)
    return -(log_norm[:, None] + 0.5 * mahalanobis)


def score_sequence(model: ClusterModel, seq: FeatureSequence) -> ScoreMatrix:
    """Build the (k, n_frames) log-score matrix for one sequence."""
    if seq.dim != model.dim:
        raise DimensionMismatchError(
            f"sequence {seq.id!r} has dim {seq.dim}, model expects {model.dim}"
        )
    values = log_gaussian_scores(seq.frames, model.means, model.variances)
    return ScoreMatrix(sequence_id=seq.id, values=values)


def hard_assign(model: ClusterModel, seq: FeatureSequence) -> np.ndarray:
    """Nearest-centroid assignment; matches the assignments recorded at fit time."""
    if seq.dim != model.dim:
        raise DimensionMismatchError(
            f"sequence {seq.id!r} has dim {seq.dim}, model expects {model.dim}"
        )
    return np.argmin(cdist(seq.frames, model.centroids, "sqeuclidean"), axis=1)
