"""Soft-margin RBF-SVM trained with sequential minimal optimization.

The dual problem  min 1/2 a'Qa - e'a  s.t. y'a = 0, 0 <= a <= C  (with
Q_ij = y_i y_j K_ij) is solved by repeatedly optimizing the maximal
KKT-violating pair: i maximizing and j minimizing -y grad over the
admissible index sets. Convergence is declared when the violation gap
drops to the stopping tolerance. The kernel matrix is precomputed, which
keeps per-iteration cost at two cached columns.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConvergenceFailure, DimensionMismatch, SingleClass

MAX_ITERATIONS = 1_000_000
_SNAP = 1e-12  # relative distance at which alphas snap onto a box bound


@dataclass(frozen=True)
class SvmHyperParams:
    """Regularization C, SMO stopping tolerance eps, RBF width gamma."""

    C: float
    eps: float
    gamma: float

    def __post_init__(self):
        if self.C <= 0 or self.eps <= 0 or self.gamma <= 0:
            raise ValueError(f"hyperparameters must be positive, got {self}")

    def to_dict(self) -> dict:
        return {"C": self.C, "eps": self.eps, "gamma": self.gamma}

    @staticmethod
    def from_dict(data: dict) -> "SvmHyperParams":
        return SvmHyperParams(C=data["C"], eps=data["eps"], gamma=data["gamma"])


@dataclass(frozen=True)
class SvmModel:
    """Trained classifier: f(x) = sum_i w_i K(s_i, x) + b with w_i = alpha_i y_i."""

    support_vectors: np.ndarray  # (m, d)
    alphas_signed: np.ndarray    # (m,)
    bias: float
    gamma: float

    @property
    def dimension(self) -> int:
        return self.support_vectors.shape[1]


def squared_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, (len(a), len(b))."""
    a = np.atleast_2d(np.asarray(a, dtype=np.float64))
    b = np.atleast_2d(np.asarray(b, dtype=np.float64))
    d2 = (a * a).sum(axis=1)[:, None] + (b * b).sum(axis=1)[None, :] - 2.0 * (a @ b.T)
    return np.maximum(d2, 0.0)


def rbf_kernel(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    return np.exp(-gamma * squared_distances(a, b))


def smo_solve(
    kernel: np.ndarray,
    labels: np.ndarray,
    C: float,
    eps: float,
    max_iterations: int = MAX_ITERATIONS,
) -> tuple[np.ndarray, float, int]:
    """Run SMO on a precomputed kernel matrix.

    Returns (alpha, bias, iterations). Raises ConvergenceFailure when the
    iteration cap is hit before the maximal KKT violation falls to eps.
    """
    y = np.asarray(labels, dtype=np.float64)
    n = y.size
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective at alpha = 0
    pos = y > 0

    for iteration in range(max_iterations):
        score = -y * grad
        up = (pos & (alpha < C)) | (~pos & (alpha > 0.0))
        low = (~pos & (alpha < C)) | (pos & (alpha > 0.0))
        up_score = np.where(up, score, -np.inf)
        low_score = np.where(low, score, np.inf)
        i = int(np.argmax(up_score))
        j = int(np.argmin(low_score))
        gap = up_score[i] - low_score[j]
        if gap <= eps:
            bias = float((up_score[i] + low_score[j]) / 2.0)
            return alpha, bias, iteration
        eta = max(kernel[i, i] + kernel[j, j] - 2.0 * kernel[i, j], 1e-12)
        step = gap / eta
        room_i = C - alpha[i] if pos[i] else alpha[i]
        room_j = alpha[j] if pos[j] else C - alpha[j]
        step = min(step, room_i, room_j)
        alpha[i] += y[i] * step
        alpha[j] -= y[j] * step
        for k in (i, j):
            if alpha[k] < _SNAP * C:
                alpha[k] = 0.0
            elif alpha[k] > C * (1.0 - _SNAP):
                alpha[k] = C
        grad += y * step * (kernel[:, i] - kernel[:, j])

    raise ConvergenceFailure(
        f"SMO did not reach tolerance {eps} within {max_iterations} iterations"
    )


def train_svm(
    vectors: np.ndarray,
    labels: np.ndarray,
    params: SvmHyperParams,
    max_iterations: int = MAX_ITERATIONS,
) -> SvmModel:
    """Train on (n, d) vectors with labels in {+1, -1}.

    Vectors are expected to be normalized (and projected, where PCA
    applies) already.
    """
    x = np.asarray(vectors, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != y.size:
        raise DimensionMismatch(f"vectors {x.shape} do not match {y.size} labels")
    if not (np.any(y > 0) and np.any(y < 0)):
        raise SingleClass("training data must contain both classes")
    kernel = rbf_kernel(x, x, params.gamma)
    alpha, bias, _ = smo_solve(kernel, y, params.C, params.eps, max_iterations)
    support = alpha > 0.0
    model = SvmModel(
        support_vectors=x[support].copy(),
        alphas_signed=(alpha * y)[support],
        bias=bias,
        gamma=params.gamma,
    )
    if not (np.any(model.alphas_signed > 0) and np.any(model.alphas_signed < 0)):
        raise ConvergenceFailure("degenerate solution: a class ended up with no support vector")
    return model


def decision_values(model: SvmModel, x: np.ndarray) -> np.ndarray:
    """Decision function for a batch of row vectors."""
    x = np.atleast_2d(np.asarray(x, dtype=np.float64))
    if x.shape[1] != model.dimension:
        raise DimensionMismatch(f"vector dim {x.shape[1]} != model dim {model.dimension}")
    k = rbf_kernel(x, model.support_vectors, model.gamma)
    return k @ model.alphas_signed + model.bias


def decision_value(model: SvmModel, x: np.ndarray) -> float:
    """Decision function for one vector; positive means confirmation."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise DimensionMismatch("decision_value expects a single vector")
    if x.size != model.dimension:
        raise DimensionMismatch(f"vector dim {x.size} != model dim {model.dimension}")
    diff = model.support_vectors - x
    k = np.exp(-model.gamma * (diff * diff).sum(axis=1))
    return float(k @ model.alphas_signed + model.bias)
