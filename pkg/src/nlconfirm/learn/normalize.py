"""Per-dimension z-score normalization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, TooFewSamples


@dataclass(frozen=True)
class NormalizerStats:
    """Per-dimension mean and population standard deviation (std 1 where degenerate)."""

    mean: np.ndarray
    std: np.ndarray

    @property
    def dimension(self) -> int:
        return self.mean.size

    def transform(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.dimension:
            raise DimensionMismatch(f"vector dim {x.shape[-1]} != normalizer dim {self.dimension}")
        return (x - self.mean) / self.std


def fit_normalizer(vectors: np.ndarray) -> NormalizerStats:
    """Estimate per-dimension mean and population std from >= 2 rows.

    Zero-variance dimensions get std = 1 so their transformed values are 0.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise TooFewSamples(f"need a matrix with >= 2 rows, got shape {x.shape}")
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    std = np.where(std > 0.0, std, 1.0)
    return NormalizerStats(mean=mean, std=std)
