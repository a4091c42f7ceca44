"""Linear prediction, polynomial roots and formant frequencies.

The chain for one Hann-windowed frame: autocorrelation LPC of order 12
(Levinson-Durbin) -> roots of the prediction-error polynomial (companion
matrix eigenvalues) -> reflection of out-of-circle roots -> the two lowest
resonance frequencies that survive the low-cut and bandwidth filters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateFrame, NumericalFailure

LPC_ORDER = 12

# candidate filters for formant picking
FORMANT_MIN_HZ = 90.0
FORMANT_MAX_BANDWIDTH_HZ = 400.0

ROOT_RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class LpcResult:
    """Predictor coefficients c_k with x[n] ~ sum_k c_k x[n-k], plus residual energy."""

    order: int
    coefficients: np.ndarray
    gain: float


@dataclass(frozen=True)
class FormantPair:
    """First two formant frequencies in Hz; 0 marks an absent formant."""

    f1: float
    f2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.f1, self.f2])


def lpc(windowed: np.ndarray, order: int = LPC_ORDER) -> LpcResult:
    """Autocorrelation-method LPC via the Levinson-Durbin recursion.

    Raises DegenerateFrame for a zero-energy frame. A tiny noise floor
    (1e-9 relative) keeps the recursion stable on nearly-perfectly
    predictable input; if the residual energy still collapses, the
    remaining reflection coefficients are treated as zero.
    """
    x = np.asarray(windowed, dtype=np.float64)
    if x.size <= order:
        raise DegenerateFrame(f"frame of {x.size} samples too short for order {order}")
    r = np.array([np.dot(x[: x.size - k], x[k:]) for k in range(order + 1)])
    if r[0] <= 0.0:
        raise DegenerateFrame("zero-energy frame")
    r[0] *= 1.0 + 1e-9
    a = np.zeros(order + 1)
    a[0] = 1.0
    err = r[0]
    for k in range(1, order + 1):
        if err <= 0.0:
            break
        acc = r[k] + np.dot(a[1:k], r[k - 1:0:-1])
        lam = -acc / err
        a[1 : k + 1] += lam * a[k - 1 :: -1][:k]
        err *= 1.0 - lam * lam
    return LpcResult(order=order, coefficients=-a[1:], gain=float(max(err, 0.0)))


def lpc_polynomial(result: LpcResult) -> np.ndarray:
    """Prediction-error polynomial A(z) = 1 - sum c_k z^{-k}, highest power first."""
    return np.concatenate(([1.0], -result.coefficients))


def polynomial_roots(coefficients: np.ndarray, residual_tol: float = ROOT_RESIDUAL_TOL) -> np.ndarray:
    """All complex roots of a polynomial (coefficients highest power first).

    Solved as eigenvalues of the companion matrix. Every root r is checked
    against |p(r)| <= tol * sum_i |c_i| |r|^(deg-i); NumericalFailure if any
    root misses that residual bound.
    """
    c = np.atleast_1d(np.asarray(coefficients, dtype=np.complex128))
    nonzero = np.nonzero(np.abs(c) > 0.0)[0]
    if nonzero.size == 0:
        raise ValueError("zero polynomial has no defined roots")
    c = c[nonzero[0]:]
    if c.size < 2:
        raise ValueError("polynomial degree must be >= 1")
    # trailing zero coefficients are roots at the origin
    tail = 0
    while np.abs(c[-1]) == 0.0:
        c = c[:-1]
        tail += 1
    roots = np.zeros(tail, dtype=np.complex128)
    if c.size >= 2:
        monic = c / c[0]
        deg = monic.size - 1
        companion = np.zeros((deg, deg), dtype=np.complex128)
        companion[0, :] = -monic[1:]
        companion[1:, :-1] = np.eye(deg - 1)
        roots = np.concatenate([np.linalg.eigvals(companion), roots])
    degree = c.size - 1 + tail
    full = np.concatenate([c, np.zeros(tail, dtype=np.complex128)])
    for r in roots:
        residual = np.abs(np.polyval(full, r))
        scale = np.polyval(np.abs(full), max(np.abs(r), 1e-300))
        if residual > residual_tol * scale:
            raise NumericalFailure(
                f"root {r} residual {residual:.3e} exceeds {residual_tol:.0e} * scale {scale:.3e}"
            )
    return roots


def fix_roots(roots: np.ndarray) -> np.ndarray:
    """Reflect roots outside the unit circle to 1/conj(r); angle is preserved."""
    roots = np.asarray(roots, dtype=np.complex128)
    mags = np.abs(roots)
    out = roots.copy()
    outside = mags > 1.0
    out[outside] = 1.0 / np.conj(roots[outside])
    return out


def formants(roots: np.ndarray, sample_rate: int) -> FormantPair:
    """First two formant frequencies from fixed LPC roots.

    Candidates are roots with angle in (0, pi); frequency = angle * fs / 2pi
    and bandwidth = -(fs/pi) * ln|r|. Candidates below 90 Hz or wider than
    400 Hz bandwidth are discarded; the two lowest survivors are returned,
    padded with 0.
    """
    candidates = []
    for r in np.asarray(roots, dtype=np.complex128):
        angle = np.angle(r)
        mag = np.abs(r)
        if not (0.0 < angle < np.pi) or mag <= 0.0:
            continue
        freq = angle * sample_rate / (2.0 * np.pi)
        bandwidth = -(sample_rate / np.pi) * np.log(mag)
        if freq < FORMANT_MIN_HZ or bandwidth > FORMANT_MAX_BANDWIDTH_HZ:
            continue
        candidates.append(freq)
    candidates.sort()
    candidates += [0.0, 0.0]
    return FormantPair(f1=candidates[0], f2=candidates[1])
