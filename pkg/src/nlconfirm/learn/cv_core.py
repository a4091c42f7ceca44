"""Leave-one-speaker-out fold engine on per-speaker feature matrices.

Kept free of corpus/feature dependencies so the grid search can reuse it:
callers hand in per-speaker matrices, labels and fold weights. Per fold,
the training side is class-balanced, normalization (and PCA, when the
feature set calls for it) is fitted on the balanced set, the SVM is
trained and the held-out speaker's frames are scored unbalanced.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from ..errors import MissingClass
from .normalize import NormalizerStats, fit_normalizer
from .pca import fit_pca
from .svm import SvmHyperParams, decision_values, train_svm


@dataclass(frozen=True)
class SpeakerFrames:
    """All frame features of one speaker, plus the fold weight (confirmation count)."""

    speaker_id: str
    vectors: np.ndarray  # (n, d)
    labels: np.ndarray   # (n,) in {+1, -1}
    weight: float


@dataclass(frozen=True)
class FoldResult:
    speaker_id: str
    accuracy: float
    weight: float
    n_test: int


def balance_classes(
    vectors: np.ndarray, labels: np.ndarray, seed: int
) -> tuple[np.ndarray, np.ndarray]:
    """Uniformly subsample the majority class down to the minority count.

    In practice the majority is the "other" class, whose frames are
    discarded to match the confirmation frame count. Deterministic for a
    given seed; raises MissingClass when a class is absent.
    """
    labels = np.asarray(labels)
    pos_idx = np.flatnonzero(labels > 0)
    neg_idx = np.flatnonzero(labels < 0)
    if pos_idx.size == 0 or neg_idx.size == 0:
        raise MissingClass("both classes are required for balancing")
    rng = np.random.default_rng(seed)
    if pos_idx.size < neg_idx.size:
        neg_idx = np.sort(rng.choice(neg_idx, size=pos_idx.size, replace=False))
    elif neg_idx.size < pos_idx.size:
        pos_idx = np.sort(rng.choice(pos_idx, size=neg_idx.size, replace=False))
    keep = np.sort(np.concatenate([pos_idx, neg_idx]))
    return vectors[keep], labels[keep]


def fit_transform_chain(
    vectors: np.ndarray, use_pca: bool, pca_epsilon: float, normalize: bool = True
):
    """Fit normalizer (and PCA) on training vectors; return (normalizer, pca, projected).

    With normalize=False the normalizer is the identity (raw feature
    scales reach the kernel); PCA feature sets always normalize, since the
    projection is fitted on z-scored data by construction.
    """
    if normalize or use_pca:
        normalizer = fit_normalizer(vectors)
    else:
        d = vectors.shape[1]
        normalizer = NormalizerStats(mean=np.zeros(d), std=np.ones(d))
    normalized = normalizer.transform(vectors)
    if not use_pca:
        return normalizer, None, normalized
    pca = fit_pca(normalized, pca_epsilon)
    return normalizer, pca, pca.transform(normalized)


def _fold_seed(seed: int, speaker_id: str) -> int:
    # stable across processes (unlike hash())
    return int(np.random.SeedSequence([seed, zlib.crc32(speaker_id.encode())]).generate_state(1)[0])


def run_louo_folds(
    speakers: list[SpeakerFrames],
    params: SvmHyperParams,
    *,
    use_pca: bool,
    pca_epsilon: float = 0.95,
    seed: int = 0,
) -> list[FoldResult]:
    """One fold per speaker: train balanced on the rest, score the speaker unbalanced."""
    if len(speakers) < 2:
        raise MissingClass("leave-one-user-out needs at least two speakers")
    results = []
    for held_out in speakers:
        rest = [s for s in speakers if s.speaker_id != held_out.speaker_id]
        train_x = np.concatenate([s.vectors for s in rest])
        train_y = np.concatenate([s.labels for s in rest])
        bal_x, bal_y = balance_classes(train_x, train_y, _fold_seed(seed, held_out.speaker_id))
        normalizer, pca, projected = fit_transform_chain(bal_x, use_pca, pca_epsilon)
        model = train_svm(projected, bal_y, params)
        test_x = normalizer.transform(held_out.vectors)
        if pca is not None:
            test_x = pca.transform(test_x)
        predicted = np.where(decision_values(model, test_x) > 0.0, 1.0, -1.0)
        accuracy = float(np.mean(predicted == held_out.labels))
        results.append(FoldResult(
            speaker_id=held_out.speaker_id,
            accuracy=accuracy,
            weight=held_out.weight,
            n_test=held_out.labels.size,
        ))
    return results


def weighted_accuracy(folds: list[FoldResult]) -> float:
    """Fold accuracies weighted by confirmation counts, normalized to [0, 1]."""
    total = sum(f.weight for f in folds)
    if total <= 0:
        return float(np.mean([f.accuracy for f in folds]))
    return sum(f.accuracy * f.weight for f in folds) / total
