from __future__ import annotations

import numpy as np
import pytest

from coocseg.types import (
    ClusterModel,
    CooccurrenceStats,
    Corpus,
    FeatureSequence,
    LabelMapping,
    ScoreMatrix,
    Segmentation,
    TemporalHistogram,
    TemporalPath,
    coerce_corpus,
    validate_corpus,
)


def _corpus(*arrays):
    return Corpus(
        sequences=tuple(
            FeatureSequence(id=f"v{i}", frames=a) for i, a in enumerate(arrays)
        )
    )


def test_feature_sequence_is_immutable():
    seq = FeatureSequence(id="a", frames=np.zeros((3, 2)))
    with pytest.raises(ValueError):
        seq.frames[0, 0] = 1.0


def test_feature_sequence_copies_input():
    raw = np.zeros((2, 2))
    seq = FeatureSequence(id="a", frames=raw)
    raw[0, 0] = 5.0
    assert seq.frames[0, 0] == 0.0


def test_feature_sequence_rejects_wrong_rank():
    with pytest.raises(ValueError):
        FeatureSequence(id="a", frames=np.zeros(4))
    with pytest.raises(ValueError):
        FeatureSequence(id="a", frames=np.zeros((2, 2, 2)))


def test_corpus_rejects_duplicate_ids():
    seqs = (
        FeatureSequence(id="same", frames=np.zeros((1, 2))),
        FeatureSequence(id="same", frames=np.zeros((1, 2))),
    )
    with pytest.raises(ValueError, match="duplicate"):
        Corpus(sequences=seqs)


def test_corpus_rejects_empty():
    with pytest.raises(ValueError):
        Corpus(sequences=())


def test_corpus_lookup_and_iteration():
    corpus = _corpus(np.zeros((2, 3)), np.ones((4, 3)))
    assert corpus.ids == ("v0", "v1")
    assert corpus.dim == 3
    assert len(corpus) == 2
    assert corpus.by_id("v1").n_frames == 4
    with pytest.raises(KeyError):
        corpus.by_id("nope")


def test_validate_corpus_reports_all_violation_kinds():
    corpus = _corpus(
        np.zeros((0, 3)),  # empty
        np.full((2, 4), np.nan),  # wrong dim and non-finite
        np.zeros((2, 3)),  # fine
    )
    violations = validate_corpus(corpus)
    kinds = sorted(v.kind for v in violations)
    assert kinds == ["dimension-mismatch", "empty-sequence", "non-finite"]
    assert all(v.sequence_id in ("v0", "v1") for v in violations)


def test_validate_corpus_clean():
    assert validate_corpus(_corpus(np.zeros((2, 3)), np.ones((5, 3)))) == []


def test_coerce_corpus_from_arrays():
    corpus = coerce_corpus([np.zeros((2, 3)), np.ones((4, 3))])
    assert corpus.ids == ("seq0", "seq1")


def test_coerce_corpus_rejects_bad_content():
    with pytest.raises(ValueError, match="non-finite"):
        coerce_corpus([np.array([[np.inf, 0.0]])])
    with pytest.raises(ValueError, match="dimension-mismatch"):
        coerce_corpus([np.zeros((2, 3)), np.zeros((2, 4))])


def test_cluster_model_validates_shapes_and_variances():
    good = dict(
        centroids=np.zeros((2, 3)),
        means=np.zeros((2, 3)),
        variances=np.ones((2, 3)),
        frame_assignments={"v0": np.array([0, 1, 1])},
    )
    model = ClusterModel(**good)
    assert model.k == 2 and model.dim == 3
    with pytest.raises(ValueError):
        ClusterModel(**{**good, "variances": np.zeros((2, 3))})
    with pytest.raises(ValueError):
        ClusterModel(**{**good, "means": np.zeros((3, 3))})
    with pytest.raises(ValueError):
        ClusterModel(**{**good, "frame_assignments": {"v0": np.array([0, 2])}})


def test_score_matrix_rejects_non_finite():
    with pytest.raises(ValueError):
        ScoreMatrix(sequence_id="v", values=np.array([[0.0, np.nan]]))


def test_cooccurrence_stats_invariants():
    occurs = np.array([2, 1])
    pairs = np.array([[2, 1], [1, 1]])
    cond = pairs / occurs[:, None]
    stats = CooccurrenceStats(occurs=occurs, pair_counts=pairs, conditional=cond, tau1=0.1)
    assert stats.k == 2
    with pytest.raises(ValueError, match="symmetric"):
        CooccurrenceStats(
            occurs=occurs,
            pair_counts=np.array([[2, 1], [0, 1]]),
            conditional=cond,
            tau1=0.1,
        )
    with pytest.raises(ValueError, match="diagonal"):
        CooccurrenceStats(
            occurs=occurs,
            pair_counts=np.array([[1, 1], [1, 1]]),
            conditional=cond,
            tau1=0.1,
        )
    with pytest.raises(ValueError, match="exceed"):
        CooccurrenceStats(
            occurs=occurs,
            pair_counts=np.array([[2, 2], [2, 1]]),
            conditional=cond,
            tau1=0.1,
        )
    with pytest.raises(ValueError, match=r"\[0, 1\]"):
        CooccurrenceStats(occurs=occurs, pair_counts=pairs, conditional=cond * 3, tau1=0.1)


def test_temporal_histogram_sums_to_one_or_zero():
    TemporalHistogram(cluster_id=0, normalized_counts=np.array([0.25, 0.75]))
    TemporalHistogram(cluster_id=0, normalized_counts=np.zeros(4))
    with pytest.raises(ValueError):
        TemporalHistogram(cluster_id=0, normalized_counts=np.array([0.2, 0.2]))
    with pytest.raises(ValueError):
        TemporalHistogram(cluster_id=0, normalized_counts=np.array([-0.5, 1.5]))


def test_temporal_path_rejects_consecutive_repeats():
    assert TemporalPath(steps=(0, 1, 0)).steps == (0, 1, 0)
    with pytest.raises(ValueError):
        TemporalPath(steps=(0, 0, 1))
    with pytest.raises(ValueError):
        TemporalPath(steps=())


def test_segmentation_segments_tile_the_sequence():
    rng = np.random.default_rng(0)
    for _ in range(50):
        labels = rng.integers(0, 4, size=rng.integers(1, 30))
        segments = Segmentation(sequence_id="v", labels=labels).segments
        # segments must tile [0, n) in order with maximal equal-label runs
        assert segments[0].start == 0
        assert segments[-1].end == labels.size
        for a, b in zip(segments, segments[1:]):
            assert a.end == b.start
            assert a.label != b.label
        rebuilt = np.concatenate([[s.label] * s.length for s in segments])
        assert np.array_equal(rebuilt, labels)


def test_label_mapping_requires_injectivity():
    m = LabelMapping(mapping={0: 1, 1: 0})
    assert m.get(0) == 1 and m.get(2) is None and len(m) == 2
    with pytest.raises(ValueError):
        LabelMapping(mapping={0: 1, 1: 1})
