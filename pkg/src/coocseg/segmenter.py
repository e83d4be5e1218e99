"""Estimator-style front end tying the pipeline stages together.

CooccurrenceSegmenter follows the scikit-learn protocol: all knobs are
constructor parameters (so get_params/set_params/clone work), fit learns the
corpus-level state (cluster model, co-occurrence statistics, temporal path)
and predict segments sequences, including ones not seen during fit.
"""

from __future__ import annotations

import logging
import math
from typing import Sequence

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .clustering import KMeansConfig, fit_clusters, hard_assign, score_sequence
from .cooccur import RefineConfig, build_cooccurrence, refine_scores, select_salience_pool
from .decode import DecodeConfig, argmax_decode, viterbi_decode
from .temporal import EmptyPathError, PathConfig, build_histograms, extract_path
from .types import Corpus, FeatureSequence, ScoreMatrix, Segmentation, coerce_corpus

logger = logging.getLogger(__name__)


class CooccurrenceSegmenter(BaseEstimator):
    """Unsupervised temporal segmentation of feature-vector sequences.

    fit clusters all frames of the training corpus, estimates which clusters
    co-occur across videos and extracts a corpus-level temporal path from
    the clusters' relative-time histograms. predict scores each sequence
    against the cluster Gaussians, optionally decays clusters outside the
    video's salience pool, and aligns frames to the path with Viterbi
    decoding (falling back to per-frame argmax when the path is disabled or
    empty).

    Parameters mirror the stage configs: tau1/tau2/eta drive the
    co-occurrence refinement, bin_count/theta the temporal path, and the
    use_* flags switch the two refinement mechanisms off for ablations.
    """

    def __init__(
        self,
        n_clusters: int = 8,
        tau1: float = 0.1,
        tau2: float = 0.1,
        eta: float = 0.5,
        bin_count: int = 20,
        theta: float = 0.15,
        use_cooccurrence: bool = True,
        use_multi_occur_path: bool = True,
        kmeans_restarts: int = 10,
        kmeans_max_iters: int = 300,
        kmeans_tol: float = 1e-6,
        stay_log_prob: float = math.log(0.5),
        advance_log_prob: float = math.log(0.5),
        random_state: int = 0,
        n_jobs: int = 1,
    ) -> None:
        self.n_clusters = n_clusters
        self.tau1 = tau1
        self.tau2 = tau2
        self.eta = eta
        self.bin_count = bin_count
        self.theta = theta
        self.use_cooccurrence = use_cooccurrence
        self.use_multi_occur_path = use_multi_occur_path
        self.kmeans_restarts = kmeans_restarts
        self.kmeans_max_iters = kmeans_max_iters
        self.kmeans_tol = kmeans_tol
        self.stay_log_prob = stay_log_prob
        self.advance_log_prob = advance_log_prob
        self.random_state = random_state
        self.n_jobs = n_jobs

    # Config builders; constructing them also validates the parameter ranges.
    def _kmeans_config(self) -> KMeansConfig:
        return KMeansConfig(
            k=self.n_clusters,
            max_iters=self.kmeans_max_iters,
            restarts=self.kmeans_restarts,
            rng_seed=self.random_state,
            convergence_tol=self.kmeans_tol,
        )

    def _refine_config(self) -> RefineConfig:
        return RefineConfig(tau1=self.tau1, tau2=self.tau2, eta=self.eta)

    def _path_config(self) -> PathConfig:
        return PathConfig(bin_count=self.bin_count, theta=self.theta)

    def _decode_config(self) -> DecodeConfig:
        return DecodeConfig(
            stay_log_prob=self.stay_log_prob, advance_log_prob=self.advance_log_prob
        )

    def fit(self, X: "Corpus | Sequence[np.ndarray]", y=None) -> "CooccurrenceSegmenter":
        """Learn clusters, co-occurrence statistics and the temporal path.

        Args:
            X: a Corpus, or a plain list of (n_frames, dim) arrays.
            y: ignored; present for scikit-learn API compatibility.

        Returns:
            self.
        """
        corpus = coerce_corpus(X)
        self.model_ = fit_clusters(corpus, self._kmeans_config())
        self.cooccurrence_ = build_cooccurrence(self.model_, corpus, self._refine_config())
        self.histograms_ = build_histograms(self.model_, corpus, self._path_config())
        try:
            self.path_ = extract_path(self.histograms_, self._path_config())
        except EmptyPathError:
            logger.warning(
                "no histogram bin exceeds theta=%g; predictions fall back to argmax decoding",
                self.theta,
            )
            self.path_ = None
        self.n_features_in_ = corpus.dim
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "model_"):
            raise NotFittedError(
                "this CooccurrenceSegmenter instance is not fitted yet; call fit first"
            )

    def _score_one(self, seq: FeatureSequence) -> ScoreMatrix:
        scores = score_sequence(self.model_, seq)
        if not self.use_cooccurrence:
            return scores
        assignments = hard_assign(self.model_, seq)
        ratios = np.bincount(assignments, minlength=self.model_.k) / seq.n_frames
        pool = select_salience_pool(ratios, self.cooccurrence_, self._refine_config())
        return refine_scores(scores, pool, self._refine_config())

    def _predict_one(self, seq: FeatureSequence) -> Segmentation:
        scores = self._score_one(seq)
        if self.use_multi_occur_path and self.path_ is not None:
            return viterbi_decode(scores, self.path_, self._decode_config())
        return argmax_decode(scores)

    def _map_over(self, corpus: Corpus, fn):
        if self.n_jobs == 1:
            return [fn(seq) for seq in corpus]
        return Parallel(n_jobs=self.n_jobs)(delayed(fn)(seq) for seq in corpus)

    def transform(self, X: "Corpus | Sequence[np.ndarray]") -> list[ScoreMatrix]:
        """Per-sequence (k, n_frames) log-score matrices, refined when enabled."""
        self._check_fitted()
        return self._map_over(coerce_corpus(X), self._score_one)

    def predict(self, X: "Corpus | Sequence[np.ndarray]") -> list[Segmentation]:
        """Segment every sequence; order matches the input order."""
        self._check_fitted()
        return self._map_over(coerce_corpus(X), self._predict_one)

    def fit_predict(self, X: "Corpus | Sequence[np.ndarray]", y=None) -> list[Segmentation]:
        return self.fit(X).predict(X)
