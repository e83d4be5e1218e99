from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from coocseg.decode import DecodeConfig, PathTooLongError, argmax_decode, viterbi_decode
from coocseg.types import ScoreMatrix, Segmentation, TemporalPath


def _scores(values) -> ScoreMatrix:
    return ScoreMatrix(sequence_id="v", values=np.asarray(values, dtype=np.float64))


def _collapse(labels: np.ndarray) -> tuple[int, ...]:
    out = [int(labels[0])]
    for x in labels[1:]:
        if int(x) != out[-1]:
            out.append(int(x))
    return tuple(out)


def _alignment_score(values, steps, labels, cfg: DecodeConfig) -> float:
    # any full monotone alignment advances T-1 times and stays N-T times
    n, t = labels.shape[0], len(steps)
    emit = sum(values[int(labels[i]), i] for i in range(n))
    return emit + (t - 1) * cfg.advance_log_prob + (n - t) * cfg.stay_log_prob


def _brute_force_best(values, steps, cfg: DecodeConfig):
    """Enumerate every monotone alignment; return (best score, one best labeling)."""
    n, t = values.shape[1], len(steps)
    best = (-math.inf, None)
    for cuts in itertools.combinations(range(1, n), t - 1):
        bounds = (0, *cuts, n)
        labels = np.empty(n, dtype=np.intp)
        for i in range(t):
            labels[bounds[i] : bounds[i + 1]] = steps[i]
        score = _alignment_score(values, steps, labels, cfg)
        if score > best[0]:
            best = (score, labels)
    return best


def test_two_step_hand_example():
    values = np.array([[0.9, 0.8, 0.2, 0.1], [0.1, 0.2, 0.8, 0.9]])
    seg = viterbi_decode(_scores(values), TemporalPath(steps=(0, 1)))
    assert seg.labels.tolist() == [0, 0, 1, 1]
    # emission part of the best split is 0.9 + 0.8 + 0.8 + 0.9
    emit = sum(values[label, i] for i, label in enumerate(seg.labels))
    assert emit == pytest.approx(3.4)


def test_single_step_path_labels_everything():
    values = np.array([[-5.0, -1.0, -9.0], [0.0, 0.0, 0.0]])
    seg = viterbi_decode(_scores(values), TemporalPath(steps=(0,)))
    assert seg.labels.tolist() == [0, 0, 0]


def test_reoccurring_cluster_hand_example():
    a = [0.0, 0.0, -9.0, -9.0, 0.0, 0.0]
    b = [-9.0, -9.0, 0.0, 0.0, -9.0, -9.0]
    seg = viterbi_decode(_scores([a, b]), TemporalPath(steps=(0, 1, 0)))
    assert seg.labels.tolist() == [0, 0, 1, 1, 0, 0]


def test_path_longer_than_sequence_raises():
    with pytest.raises(PathTooLongError):
        viterbi_decode(_scores(np.zeros((2, 1))), TemporalPath(steps=(0, 1)))


def test_path_cluster_out_of_range_raises():
    with pytest.raises(ValueError):
        viterbi_decode(_scores(np.zeros((2, 3))), TemporalPath(steps=(0, 2)))


def test_collapsed_labels_equal_path():
    rng = np.random.default_rng(41)
    for _ in range(100):
        k = int(rng.integers(2, 5))
        n = int(rng.integers(1, 14))
        steps = [int(rng.integers(0, k))]
        while len(steps) < min(n, int(rng.integers(1, 5))):
            nxt = int(rng.integers(0, k))
            if nxt != steps[-1]:
                steps.append(nxt)
        path = TemporalPath(steps=tuple(steps))
        seg = viterbi_decode(_scores(rng.standard_normal((k, n))), path)
        assert _collapse(seg.labels) == path.steps


def test_matches_brute_force_on_random_instances():
    rng = np.random.default_rng(43)
    cfg = DecodeConfig()
    for _ in range(200):
        k = int(rng.integers(2, 5))
        t = int(rng.integers(1, 5))
        n = int(rng.integers(t, 11))
        steps = [int(rng.integers(0, k))]
        while len(steps) < t:
            nxt = int(rng.integers(0, k))
            if nxt != steps[-1]:
                steps.append(nxt)
        values = rng.standard_normal((k, n)) * 2
        path = TemporalPath(steps=tuple(steps))
        seg = viterbi_decode(_scores(values), path, cfg)
        got = _alignment_score(values, path.steps, seg.labels, cfg)
        want, _ = _brute_force_best(values, path.steps, cfg)
        assert abs(got - want) < 1e-9


def test_uniform_shift_does_not_change_labels():
    rng = np.random.default_rng(47)
    for _ in range(30):
        values = rng.standard_normal((3, 8))
        path = TemporalPath(steps=(0, 2, 1))
        base = viterbi_decode(_scores(values), path)
        shifted = viterbi_decode(_scores(values + 123.456), path)
        assert np.array_equal(base.labels, shifted.labels)


def test_all_equal_scores_prefer_latest_boundaries():
    # perfect ties everywhere: preferring "stay" pushes every advance as
    # late as possible, so each of the last t-1 steps gets exactly one frame
    values = np.zeros((3, 6))
    seg = viterbi_decode(_scores(values), TemporalPath(steps=(0, 1, 2)))
    assert seg.labels.tolist() == [0, 0, 0, 0, 1, 2]


def test_unbalanced_transition_weights_still_valid():
    rng = np.random.default_rng(53)
    cfg = DecodeConfig(stay_log_prob=math.log(0.9), advance_log_prob=math.log(0.1))
    for _ in range(50):
        values = rng.standard_normal((2, 7))
        path = TemporalPath(steps=(0, 1))
        seg = viterbi_decode(_scores(values), path, cfg)
        got = _alignment_score(values, path.steps, seg.labels, cfg)
        want, _ = _brute_force_best(values, path.steps, cfg)
        assert abs(got - want) < 1e-9


def test_decode_is_deterministic():
    rng = np.random.default_rng(59)
    values = rng.standard_normal((3, 9))
    path = TemporalPath(steps=(1, 0, 2))
    first = viterbi_decode(_scores(values), path)
    for _ in range(5):
        assert np.array_equal(viterbi_decode(_scores(values), path).labels, first.labels)


def test_argmax_decode_matches_column_scan():
    rng = np.random.default_rng(61)
    for _ in range(20):
        values = rng.standard_normal((4, 12))
        seg = argmax_decode(_scores(values))
        for col in range(12):
            assert values[seg.labels[col], col] == values[:, col].max()


def test_argmax_decode_tie_prefers_lower_id():
    values = np.array([[1.0, 0.0], [1.0, 2.0]])
    seg = argmax_decode(_scores(values))
    assert seg.labels.tolist() == [0, 1]


def test_decode_config_validation():
    with pytest.raises(ValueError):
        DecodeConfig(stay_log_prob=0.5)
    with pytest.raises(ValueError):
        DecodeConfig(advance_log_prob=math.inf)
