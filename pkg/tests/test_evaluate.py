"""Balancing, ROC/AUC, confusion metrics and cross-validation."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlconfirm.corpus import Label
from nlconfirm.errors import LengthMismatch, MissingClass
from nlconfirm.evaluate import (
    CvReport,
    balance_frames,
    frame_metrics,
    louo_cv,
    roc_auc,
    segment_metrics,
    speaker_frames,
)
from nlconfirm.featset import FeatureKind, FeatureSetConfig
from nlconfirm.learn import SvmHyperParams
from nlconfirm.learn.cv_core import FoldResult, weighted_accuracy
from nlconfirm.pipeline import decision_from_scores

from .conftest import make_segment, sine


def pairwise_auc(scores, labels):
    """Brute-force Wilcoxon statistic: P(score_pos > score_neg), ties count half."""
    pos = [s for s, y in zip(scores, labels) if y > 0]
    neg = [s for s, y in zip(scores, labels) if y < 0]
    wins = 0.0
    for p in pos:
        for n in neg:
            if p > n:
                wins += 1.0
            elif p == n:
                wins += 0.5
    return wins / (len(pos) * len(neg))


class TestBalance:
    def test_majority_subsampled(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((130, 3))
        y = np.concatenate([np.ones(30), -np.ones(100)])
        bx, by = balance_frames(x, y, seed=1)
        assert np.sum(by > 0) == 30
        assert np.sum(by < 0) == 30
        assert bx.shape == (60, 3)

    def test_already_balanced_unchanged(self):
        x = np.arange(20, dtype=float).reshape(10, 2)
        y = np.array([1.0, -1.0] * 5)
        bx, by = balance_frames(x, y, seed=0)
        assert np.array_equal(bx, x)
        assert np.array_equal(by, y)

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((50, 2))
        y = np.concatenate([np.ones(10), -np.ones(40)])
        a = balance_frames(x, y, seed=7)[0]
        b = balance_frames(x, y, seed=7)[0]
        assert np.array_equal(a, b)
        c = balance_frames(x, y, seed=8)[0]
        assert not np.array_equal(a, c)

    def test_missing_class(self):
        with pytest.raises(MissingClass):
            balance_frames(np.zeros((5, 2)), np.ones(5), seed=0)


class TestRoc:
    def test_perfect_separation(self):
        scores = np.array([2.0, 1.5, -1.0, -2.0])
        labels = np.array([1, 1, -1, -1])
        curve = roc_auc(scores, labels)
        assert curve.auc == 1.0

    def test_identical_scores(self):
        curve = roc_auc(np.zeros(10), np.array([1, -1] * 5))
        assert curve.auc == pytest.approx(0.5, abs=1e-15)
        assert np.array_equal(curve.points, [[0.0, 0.0], [1.0, 1.0]])

    def test_worked_example(self):
        scores = np.array([0.9, 0.7, 0.8, 0.6])
        labels = np.array([1, 1, -1, -1])
        assert roc_auc(scores, labels).auc == pytest.approx(0.75, abs=1e-15)

    def test_endpoints_and_monotone(self):
        rng = np.random.default_rng(2)
        scores = rng.standard_normal(100)
        labels = np.where(rng.random(100) < 0.3, 1, -1)
        curve = roc_auc(scores, labels)
        assert np.array_equal(curve.points[0], [0.0, 0.0])
        assert np.array_equal(curve.points[-1], [1.0, 1.0])
        diffs = np.diff(curve.points, axis=0)
        assert (diffs >= 0).all()

    def test_missing_class(self):
        with pytest.raises(MissingClass):
            roc_auc(np.array([0.1, 0.2]), np.array([1, 1]))

    @settings(max_examples=60, deadline=None)
    @given(
        scores=st.lists(st.integers(-5, 5), min_size=2, max_size=60),
        labels=st.lists(st.booleans(), min_size=2, max_size=60),
    )
    def test_auc_equals_pairwise_oracle(self, scores, labels):
        n = min(len(scores), len(labels))
        scores = np.asarray(scores[:n], dtype=float)
        signs = np.where(np.asarray(labels[:n]), 1, -1)
        if len(set(signs)) < 2:
            return
        fast = roc_auc(scores, signs).auc
        assert fast == pytest.approx(pairwise_auc(scores, signs), abs=1e-12)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(3)
        scores = rng.standard_normal(200)
        labels = np.where(rng.random(200) < 0.4, 1, -1)
        base = roc_auc(scores, labels)
        warped = roc_auc(np.exp(scores) * 3.0 + 1.0, labels)
        assert warped.auc == pytest.approx(base.auc, abs=1e-12)
        assert np.array_equal(base.points, warped.points)


class TestSegmentMetrics:
    def _decision(self, ref, positive):
        scores = np.array([1.0] * 10) if positive else np.array([-1.0] * 10)
        return decision_from_scores(ref, np.arange(10), scores)

    def test_all_correct(self):
        decisions = [self._decision("a", True), self._decision("b", False)]
        counts = segment_metrics(decisions, [Label.CONFIRMATION, Label.OTHER])
        assert counts.accuracy == 1.0
        assert counts.fp == 0 and counts.fn == 0

    def test_corpus_shaped_perfection(self):
        decisions = [self._decision(f"p{i}", True) for i in range(42)]
        decisions += [self._decision(f"n{i}", False) for i in range(373)]
        truth = [Label.CONFIRMATION] * 42 + [Label.OTHER] * 373
        counts = segment_metrics(decisions, truth)
        assert counts.total == 415
        assert counts.tpr == 1.0
        assert counts.fpr == 0.0

    def test_inversion_complements_accuracy(self):
        rng = np.random.default_rng(4)
        truth = [Label.CONFIRMATION if rng.random() < 0.3 else Label.OTHER for _ in range(50)]
        flags = [rng.random() < 0.5 for _ in range(50)]
        straight = segment_metrics(
            [self._decision(str(i), f) for i, f in enumerate(flags)], truth)
        inverted = segment_metrics(
            [self._decision(str(i), not f) for i, f in enumerate(flags)], truth)
        assert straight.accuracy == pytest.approx(1.0 - inverted.accuracy, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            segment_metrics([self._decision("a", True)], [])


class TestFrameMetrics:
    def test_counts(self):
        scores = np.array([1.0, -1.0, 0.5, -0.5])
        labels = np.array([1, -1, -1, 1])
        counts = frame_metrics(scores, labels)
        assert (counts.tp, counts.tn, counts.fp, counts.fn) == (1, 1, 1, 1)
        assert counts.accuracy == 0.5


class TestWeightedAccuracy:
    def test_worked_example(self):
        folds = [
            FoldResult("a", accuracy=0.8, weight=3.0, n_test=10),
            FoldResult("b", accuracy=0.9, weight=1.0, n_test=10),
        ]
        assert weighted_accuracy(folds) == pytest.approx(0.825, abs=1e-12)

    def test_within_fold_range(self):
        rng = np.random.default_rng(5)
        folds = [
            FoldResult(str(i), accuracy=rng.uniform(0.3, 0.9), weight=rng.integers(1, 9),
                       n_test=10)
            for i in range(6)
        ]
        w = weighted_accuracy(folds)
        assert min(f.accuracy for f in folds) <= w <= max(f.accuracy for f in folds)


def _two_speaker_segments():
    rng = np.random.default_rng(6)
    segments = []
    for speaker, freq in (("alice", 220.0), ("bob", 150.0)):
        for i in range(3):
            tone = sine(freq + 10 * i, 0.3, amplitude=0.4)
            noise = rng.uniform(-0.3, 0.3, tone.size)
            segments.append(make_segment(tone, speaker=speaker, label=Label.CONFIRMATION,
                                         source=f"{speaker}.wav", start_ms=1000 * i))
            segments.append(make_segment(noise, speaker=speaker, label=Label.OTHER,
                                         source=f"{speaker}.wav", start_ms=1000 * i + 500))
    return segments


class TestLouoCv:
    def test_two_speakers_two_folds(self):
        segments = _two_speaker_segments()
        report = louo_cv(
            segments,
            FeatureSetConfig(FeatureKind.MFCC),
            SvmHyperParams(C=1.0, eps=0.05, gamma=0.05),
            seed=0,
        )
        assert isinstance(report, CvReport)
        assert sorted(f.speaker_id for f in report.folds) == ["alice", "bob"]
        assert all(0.0 <= f.accuracy <= 1.0 for f in report.folds)
        assert report.min_accuracy <= report.weighted_accuracy <= report.max_accuracy

    def test_speaker_without_confirmations_excluded(self):
        segments = _two_speaker_segments()
        rng = np.random.default_rng(7)
        for i in range(3):
            segments.append(make_segment(rng.uniform(-0.2, 0.2, 4800), speaker="mute",
                                         label=Label.OTHER, source="mute.wav",
                                         start_ms=1000 * i))
        speakers = speaker_frames(segments, FeatureSetConfig(FeatureKind.MFCC))
        assert sorted(s.speaker_id for s in speakers) == ["alice", "bob"]

    def test_fold_weight_is_confirmation_count(self):
        segments = _two_speaker_segments()
        speakers = speaker_frames(segments, FeatureSetConfig(FeatureKind.MFCC))
        assert all(s.weight == 3.0 for s in speakers)

    def test_determinism(self):
        segments = _two_speaker_segments()
        config = FeatureSetConfig(FeatureKind.MFCC)
        params = SvmHyperParams(C=1.0, eps=0.05, gamma=0.05)
        a = louo_cv(segments, config, params, seed=3)
        b = louo_cv(segments, config, params, seed=3)
        assert [f.accuracy for f in a.folds] == [f.accuracy for f in b.folds]


class TestGridSearch:
    def _speakers(self):
        # trivially separable: every grid point reaches weighted accuracy 1.0
        from nlconfirm.learn.cv_core import SpeakerFrames
        rng = np.random.default_rng(8)
        speakers = []
        for name in ("a", "b", "c"):
            pos = rng.normal(5.0, 0.3, (30, 2))
            neg = rng.normal(-5.0, 0.3, (30, 2))
            speakers.append(SpeakerFrames(
                speaker_id=name,
                vectors=np.concatenate([pos, neg]),
                labels=np.concatenate([np.ones(30), -np.ones(30)]),
                weight=3.0,
            ))
        return speakers

    def test_sixteen_points_and_tie_break(self):
        from nlconfirm.learn import DEFAULT_GRID, grid_search
        result = grid_search(self._speakers(), use_pca=False, seed=0)
        assert len(result.points) == 16
        assert len(DEFAULT_GRID) == 16
        assert all(p.weighted_accuracy == 1.0 for p in result.points)
        # all tied: lexicographically smallest triple wins
        assert (result.best.C, result.best.eps, result.best.gamma) == (1.0, 0.005, 0.005)

    def test_deterministic(self):
        from nlconfirm.learn import grid_search
        a = grid_search(self._speakers(), use_pca=False, seed=3)
        b = grid_search(self._speakers(), use_pca=False, seed=3)
        assert [p.weighted_accuracy for p in a.points] == [p.weighted_accuracy for p in b.points]
        assert a.best == b.best
