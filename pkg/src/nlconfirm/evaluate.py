"""Cross-validation, class balancing, ROC/AUC and confusion metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import AudioSegment, Label, frame_stream
from .errors import LengthMismatch, MissingClass
from .featset import FeatureSetConfig, extract, feature_matrix, required_context
from .learn import SvmHyperParams
from .learn.cv_core import (
    FoldResult,
    SpeakerFrames,
    balance_classes,
    run_louo_folds,
    weighted_accuracy,
)
from .pipeline import SegmentDecision

__all__ = [
    "ConfusionCounts", "RocCurve", "CvReport", "EvalReport", "SpeakerFrames",
    "balance_frames", "speaker_frames", "louo_cv", "roc_auc",
    "segment_metrics", "frame_metrics",
]


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def accuracy(self) -> float:
        return (self.tp + self.tn) / self.total if self.total else 0.0

    @property
    def tpr(self) -> float:
        pos = self.tp + self.fn
        return self.tp / pos if pos else 0.0

    @property
    def fpr(self) -> float:
        neg = self.fp + self.tn
        return self.fp / neg if neg else 0.0

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
            "accuracy": self.accuracy, "tpr": self.tpr, "fpr": self.fpr,
        }


@dataclass(frozen=True)
class RocCurve:
    """(FPR, TPR) points for a threshold sweep from +inf to -inf, plus trapezoid AUC."""

    points: np.ndarray  # (n, 2)
    auc: float


@dataclass(frozen=True)
class CvReport:
    folds: list[FoldResult]

    @property
    def weighted_accuracy(self) -> float:
        return weighted_accuracy(self.folds)

    @property
    def min_accuracy(self) -> float:
        return min(f.accuracy for f in self.folds)

    @property
    def max_accuracy(self) -> float:
        return max(f.accuracy for f in self.folds)

    def to_dict(self) -> dict:
        return {
            "weighted_accuracy": self.weighted_accuracy,
            "folds": [
                {
                    "speaker_id": f.speaker_id,
                    "accuracy": f.accuracy,
                    "confirmation_count": f.weight,
                    "n_test_frames": f.n_test,
                }
                for f in self.folds
            ],
        }


def balance_frames(
    vectors: np.ndarray, labels: np.ndarray, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Keep all confirmation frames; subsample the other class to match.

    (Symmetric: whichever class is larger is subsampled down.) Seeded and
    deterministic.
    """
    return balance_classes(vectors, labels, seed)


def label_sign(label: Label) -> int:
    return 1 if label is Label.CONFIRMATION else -1


def speaker_frames(
    segments: list[AudioSegment], config: FeatureSetConfig
) -> list[SpeakerFrames]:
    """Extract per-speaker frame features; fold weight = confirmation segment count.

    Speakers without a confirmation segment are excluded, as are segments
    shorter than the feature set's context.
    """
    min_frames = required_context(config)
    by_speaker: dict[str, list[AudioSegment]] = {}
    for seg in segments:
        by_speaker.setdefault(seg.speaker_id, []).append(seg)
    out = []
    for speaker_id in sorted(by_speaker):
        segs = by_speaker[speaker_id]
        if not any(s.label is Label.CONFIRMATION for s in segs):
            continue
        blocks, labels = [], []
        confirmations = 0
        for seg in segs:
            frames = frame_stream(seg)
            if len(frames) < min_frames:
                continue
            vectors = extract(frames, config)
            blocks.append(feature_matrix(vectors))
            labels.append(np.full(len(vectors), label_sign(seg.label)))
            if seg.label is Label.CONFIRMATION:
                confirmations += 1
        if not blocks:
            continue
        out.append(SpeakerFrames(
            speaker_id=speaker_id,
            vectors=np.concatenate(blocks),
            labels=np.concatenate(labels).astype(np.float64),
            weight=float(confirmations),
        ))
    return out


def louo_cv(
    segments: list[AudioSegment],
    config: FeatureSetConfig,
    params: SvmHyperParams,
    *,
    pca_epsilon: float = 0.95,
    seed: int = 0,
) -> CvReport:
    """Leave-one-user-out cross-validation over labeled segments.

    Each fold trains class-balanced on every other speaker and scores the
    held-out speaker's frames without balancing; fold accuracies are
    weighted by the speaker's confirmation count.
    """
    speakers = speaker_frames(segments, config)
    folds = run_louo_folds(
        speakers, params, use_pca=config.uses_pca, pca_epsilon=pca_epsilon, seed=seed
    )
    return CvReport(folds=folds)


def roc_auc(scores: np.ndarray, labels: np.ndarray) -> RocCurve:
    """ROC curve and trapezoid AUC from decision values and +1/-1 labels.

    Thresholds sweep the unique score values from high to low; tied scores
    flip together.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    if scores.size != labels.size:
        raise LengthMismatch(f"{scores.size} scores vs {labels.size} labels")
    n_pos = int(np.sum(labels > 0))
    n_neg = int(np.sum(labels < 0))
    if n_pos == 0 or n_neg == 0:
        raise MissingClass("ROC needs both classes")
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_pos = labels[order] > 0
    points = [(0.0, 0.0)]
    tp = fp = 0
    i = 0
    while i < sorted_scores.size:
        j = i
        while j + 1 < sorted_scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        group = sorted_pos[i : j + 1]
        tp += int(group.sum())
        fp += int((~group).sum())
        points.append((fp / n_neg, tp / n_pos))
        i = j + 1
    pts = np.asarray(points)
    x, y = pts[:, 0], pts[:, 1]
    auc = float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))
    return RocCurve(points=pts, auc=auc)


def segment_metrics(
    decisions: list[SegmentDecision], truth: list[Label]
) -> ConfusionCounts:
    """Confusion counts at segment granularity."""
    if len(decisions) != len(truth):
        raise LengthMismatch(f"{len(decisions)} decisions vs {len(truth)} labels")
    tp = fp = tn = fn = 0
    for decision, label in zip(decisions, truth):
        predicted_pos = decision.decided_label is Label.CONFIRMATION
        actual_pos = label is Label.CONFIRMATION
        if predicted_pos and actual_pos:
            tp += 1
        elif predicted_pos:
            fp += 1
        elif actual_pos:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def frame_metrics(scores: np.ndarray, labels: np.ndarray) -> ConfusionCounts:
    """Confusion counts for frame scores thresholded at zero."""
    scores = np.asarray(scores)
    labels = np.asarray(labels)
    if scores.size != labels.size:
        raise LengthMismatch(f"{scores.size} scores vs {labels.size} labels")
    predicted = scores > 0.0
    actual = labels > 0
    return ConfusionCounts(
        tp=int(np.sum(predicted & actual)),
        fp=int(np.sum(predicted & ~actual)),
        tn=int(np.sum(~predicted & ~actual)),
        fn=int(np.sum(~predicted & actual)),
    )


@dataclass(frozen=True)
class EvalReport:
    """Everything the evaluation harness measures for one feature set."""

    feature_kind: str
    raw_dimension: int
    model_dimension: int
    params: SvmHyperParams
    cv: CvReport | None
    frame_confusion: ConfusionCounts
    roc: RocCurve
    segment_confusion: ConfusionCounts
    segment_roc: RocCurve | None = None  # max-rolling-mean scores, behind a CLI flag

    def to_dict(self) -> dict:
        return {
            "feature_kind": self.feature_kind,
            "raw_dimension": self.raw_dimension,
            "model_dimension": self.model_dimension,
            "params": self.params.to_dict(),
            "cv": self.cv.to_dict() if self.cv else None,
            "frame": self.frame_confusion.to_dict(),
            "roc_auc": self.roc.auc,
            "segment": self.segment_confusion.to_dict(),
            "segment_roc_auc": self.segment_roc.auc if self.segment_roc else None,
        }

    def save_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    def save_roc_csv(self, path: str | Path) -> None:
        with Path(path).open("w") as fh:
            fh.write("fpr,tpr\n")
            for fpr, tpr in self.roc.points:
                fh.write(f"{fpr:.10g},{tpr:.10g}\n")
