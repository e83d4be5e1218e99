from __future__ import annotations

import numpy as np
import pytest
from scipy.stats import norm

from coocseg.clustering import (
    KMeansConfig,
    UnderdeterminedClusteringError,
    _lloyd,
    fit_clusters,
    hard_assign,
    log_gaussian_scores,
    score_sequence,
)
from coocseg.types import (
    VARIANCE_FLOOR,
    Corpus,
    DimensionMismatchError,
    FeatureSequence,
)


def _corpus_from(points: np.ndarray, n_split: int = 2) -> Corpus:
    chunks = np.array_split(points, n_split)
    return Corpus(
        sequences=tuple(
            FeatureSequence(id=f"v{i}", frames=c) for i, c in enumerate(chunks)
        )
    )


def _blobs(rng, k=3, per=40, dim=4, spread=8.0):
    centers = rng.standard_normal((k, dim)) * spread
    points = np.concatenate(
        [centers[i] + rng.standard_normal((per, dim)) for i in range(k)]
    )
    return points, centers


def test_fit_is_deterministic_bit_for_bit():
    rng = np.random.default_rng(11)
    points, _ = _blobs(rng)
    corpus = _corpus_from(points)
    cfg = KMeansConfig(k=3, rng_seed=5)
    a = fit_clusters(corpus, cfg)
    b = fit_clusters(corpus, cfg)
    assert np.array_equal(a.centroids, b.centroids)
    assert np.array_equal(a.means, b.means)
    assert np.array_equal(a.variances, b.variances)
    for seq_id in a.frame_assignments:
        assert np.array_equal(a.frame_assignments[seq_id], b.frame_assignments[seq_id])


def test_different_seeds_allowed_same_shape():
    rng = np.random.default_rng(3)
    points, _ = _blobs(rng)
    corpus = _corpus_from(points)
    model = fit_clusters(corpus, KMeansConfig(k=3, rng_seed=123))
    assert model.k == 3
    assert model.dim == 4


def test_lloyd_inertia_never_increases():
    rng = np.random.default_rng(7)
    for trial in range(20):
        points = rng.standard_normal((rng.integers(10, 60), 3))
        k = int(rng.integers(1, 5))
        init = points[rng.choice(points.shape[0], size=k, replace=False)]
        _, _, _, history = _lloyd(points, init.copy(), max_iters=50, tol=0.0)
        for earlier, later in zip(history, history[1:]):
            assert later <= earlier + 1e-9, f"trial {trial}: inertia went up"


def test_too_few_frames_raises():
    corpus = _corpus_from(np.zeros((3, 2)), n_split=1)
    with pytest.raises(UnderdeterminedClusteringError):
        fit_clusters(corpus, KMeansConfig(k=4))


def test_every_cluster_gets_at_least_one_frame():
    # duplicate points force ties and potential empty clusters
    points = np.zeros((10, 2))
    points[:5] = 1.0
    corpus = _corpus_from(points)
    model = fit_clusters(corpus, KMeansConfig(k=4, restarts=2))
    all_assignments = np.concatenate(list(model.frame_assignments.values()))
    assert set(np.unique(all_assignments)) == set(range(4))


def test_variance_floor_applies_to_constant_clusters():
    points = np.concatenate([np.zeros((20, 3)), np.ones((20, 3)) * 9])
    corpus = _corpus_from(points)
    model = fit_clusters(corpus, KMeansConfig(k=2))
    assert np.all(model.variances >= VARIANCE_FLOOR)
    assert np.allclose(model.variances, VARIANCE_FLOOR)  # both blobs are constant


def test_assignments_match_hard_assign():
    rng = np.random.default_rng(2)
    points, _ = _blobs(rng)
    corpus = _corpus_from(points, n_split=3)
    model = fit_clusters(corpus, KMeansConfig(k=3))
    for seq in corpus:
        assert np.array_equal(model.frame_assignments[seq.id], hard_assign(model, seq))


def test_log_gaussian_at_mean_unit_variance_analytic():
    for d in (1, 2, 8):
        mean = np.zeros((1, d))
        var = np.ones((1, d))
        score = log_gaussian_scores(mean.copy(), mean, var)[0, 0]
        assert abs(score - (-(d / 2) * np.log(2 * np.pi))) < 1e-10


def test_log_gaussian_matches_scipy_norm():
    rng = np.random.default_rng(9)
    for _ in range(25):
        k, n, d = rng.integers(1, 5), rng.integers(1, 6), rng.integers(1, 5)
        frames = rng.standard_normal((n, d)) * 3
        means = rng.standard_normal((k, d))
        variances = rng.uniform(0.2, 4.0, size=(k, d))
        got = log_gaussian_scores(frames, means, variances)
        for i in range(k):
            for j in range(n):
                want = norm.logpdf(frames[j], means[i], np.sqrt(variances[i])).sum()
                assert abs(got[i, j] - want) < 1e-9


def test_isotropic_argmax_equals_nearest_centroid():
    # with equal isotropic variances the densest cluster is the closest one
    rng = np.random.default_rng(4)
    for _ in range(20):
        k, n, d = 4, 15, 3
        means = rng.standard_normal((k, d)) * 5
        frames = rng.standard_normal((n, d)) * 5
        variances = np.full((k, d), 2.5)
        scores = log_gaussian_scores(frames, means, variances)
        closest = np.argmin(
            ((frames[None, :, :] - means[:, None, :]) ** 2).sum(axis=2), axis=0
        )
        assert np.array_equal(np.argmax(scores, axis=0), closest)


def test_score_sequence_checks_dimension():
    rng = np.random.default_rng(1)
    points, _ = _blobs(rng, dim=4)
    corpus = _corpus_from(points)
    model = fit_clusters(corpus, KMeansConfig(k=3))
    bad = FeatureSequence(id="bad", frames=np.zeros((5, 3)))
    with pytest.raises(DimensionMismatchError):
        score_sequence(model, bad)
    with pytest.raises(DimensionMismatchError):
        hard_assign(model, bad)


def test_score_sequence_shape_and_finiteness():
    rng = np.random.default_rng(12)
    points, _ = _blobs(rng)
    corpus = _corpus_from(points)
    model = fit_clusters(corpus, KMeansConfig(k=3))
    scores = score_sequence(model, corpus[0])
    assert scores.values.shape == (3, corpus[0].n_frames)
    assert np.all(np.isfinite(scores.values))
    assert scores.refined is False


def test_kmeans_config_validation():
    with pytest.raises(ValueError):
        KMeansConfig(k=0)
    with pytest.raises(ValueError):
        KMeansConfig(k=2, restarts=0)
    with pytest.raises(ValueError):
        KMeansConfig(k=2, max_iters=0)
