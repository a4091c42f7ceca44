"""Window functions and power spectra."""

import numpy as np
import pytest

from nlconfirm.dsp import WindowKind, apply_window, make_window, power_spectrum
from nlconfirm.errors import LengthMismatch


class TestWindows:
    def test_hann_shape(self):
        w = make_window(WindowKind.HANN, 401).coefficients
        assert w[0] == 0.0 and w[-1] == 0.0
        assert w[200] == 1.0

    def test_hann_on_ones_is_window(self):
        w = make_window(WindowKind.HANN, 401)
        out = apply_window(np.ones(401), w)
        assert np.array_equal(out, w.coefficients)

    def test_blackman_harris_endpoint(self):
        # a0 - a1 + a2 - a3 for the 4-term -92 dB coefficients
        w = make_window(WindowKind.BLACKMAN_HARRIS4, 400).coefficients
        assert w[0] == pytest.approx(0.00006, abs=1e-12)

    def test_blackman_harris_peak(self):
        w = make_window(WindowKind.BLACKMAN_HARRIS4, 401).coefficients
        assert w[200] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("kind", list(WindowKind))
    @pytest.mark.parametrize("length", [2, 3, 400, 401])
    def test_exact_symmetry(self, kind, length):
        w = make_window(kind, length).coefficients
        assert np.array_equal(w, w[::-1])

    @pytest.mark.parametrize("kind", list(WindowKind))
    def test_max_at_most_one(self, kind):
        w = make_window(kind, 400).coefficients
        assert w.max() <= 1.0

    def test_length_mismatch(self):
        w = make_window(WindowKind.HANN, 400)
        with pytest.raises(LengthMismatch):
            apply_window(np.ones(401), w)

    def test_windows_cached(self):
        assert make_window(WindowKind.HANN, 400) is make_window(WindowKind.HANN, 400)


class TestPowerSpectrum:
    def test_zero_input(self):
        spec = power_spectrum(np.zeros(400))
        assert spec.shape == (257,)  # 512-point FFT
        assert np.all(spec == 0.0)

    def test_on_bin_sine_concentrates(self):
        # 1000 Hz at 16 kHz with a 512-point FFT lands on bin 32
        n = np.arange(400)
        x = np.sin(2 * np.pi * 1000 * n / 16000)
        spec = power_spectrum(x)
        assert np.argmax(spec) == 32
        # Parseval-weighted share of the peak bin dominates
        weights = np.full(257, 2.0)
        weights[0] = weights[-1] = 1.0
        share = (2 * spec[32]) / np.sum(weights * spec)
        assert share > 0.75

    def test_parseval(self):
        rng = np.random.default_rng(3)
        for size in (256, 400, 512):
            x = rng.standard_normal(size)
            spec = power_spectrum(x)
            n_fft = 2 * (spec.size - 1)
            lhs = np.sum(x * x)
            rhs = (spec[0] + spec[-1] + 2 * np.sum(spec[1:-1])) / n_fft
            assert rhs == pytest.approx(lhs, rel=1e-6)

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            power_spectrum(np.array([]))
