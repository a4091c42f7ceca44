"""Synthetic speech-like corpus for end-to-end testing.

Confirmation tokens are short pulse trains driven at a flat per-speaker
pitch through two fixed vocal-tract-like resonators (stable formants near
350 and 1400 Hz). Other tokens are longer, sweep both resonators by at
least 400 Hz and modulate the pitch by at least +/-20 percent, mimicking
regular speech dynamics. Tokens are laid out per speaker into one WAV
with silence gaps, and a manifest records the spans and labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.signal import lfilter

from .corpus import SAMPLE_RATE, AudioBuffer, Label, SegmentDescriptor, write_manifest, write_wav

CONTROL_BLOCK = 160  # resonator coefficients update every 10 ms


@dataclass(frozen=True)
class SynthConfig:
    speakers: int = 10
    segments_per_speaker: int = 40
    confirmation_rate: float = 0.08
    seed: int = 0
    confirmation_formants: tuple[float, float] = (350.0, 1400.0)
    pole_radius: float = 0.975
    noise_db: float = -40.0

    def to_dict(self) -> dict:
        return {
            "speakers": self.speakers,
            "segments_per_speaker": self.segments_per_speaker,
            "confirmation_rate": self.confirmation_rate,
            "seed": self.seed,
            "confirmation_formants": list(self.confirmation_formants),
            "pole_radius": self.pole_radius,
            "noise_db": self.noise_db,
        }


def _ms_to_samples(ms: float) -> int:
    # keep token boundaries on exact millisecond sample counts
    return int(round(ms)) * (SAMPLE_RATE // 1000)


def _pulse_train(f0_curve: np.ndarray) -> np.ndarray:
    phase = np.cumsum(f0_curve / SAMPLE_RATE)
    out = np.zeros(f0_curve.size)
    out[np.flatnonzero(np.diff(np.floor(phase)) > 0) + 1] = 1.0
    out[0] = 1.0
    return out


def _resonate(x: np.ndarray, f1_curve: np.ndarray, f2_curve: np.ndarray, radius: float) -> np.ndarray:
    """Cascade of two 2-pole resonators with block-wise coefficient updates."""
    y = x
    for curve in (f1_curve, f2_curve):
        out = np.empty_like(y)
        zi = np.zeros(2)
        for start in range(0, y.size, CONTROL_BLOCK):
            stop = min(start + CONTROL_BLOCK, y.size)
            center = curve[(start + stop) // 2]
            theta = 2.0 * np.pi * center / SAMPLE_RATE
            a = [1.0, -2.0 * radius * np.cos(theta), radius * radius]
            out[start:stop], zi = lfilter([1.0], a, y[start:stop], zi=zi)
        y = out
    return y


def _shape_token(token: np.ndarray, peak: float, noise_db: float, rng: np.random.Generator) -> np.ndarray:
    ramp = _ms_to_samples(30)
    envelope = np.ones(token.size)
    fade = 0.5 - 0.5 * np.cos(np.pi * np.arange(ramp) / ramp)
    envelope[:ramp] = fade
    envelope[-ramp:] = fade[::-1]
    token = token * envelope
    token *= peak / max(np.max(np.abs(token)), 1e-12)
    token += rng.normal(0.0, peak * 10.0 ** (noise_db / 20.0), token.size)
    return np.clip(token, -1.0, 1.0)


def _confirmation_token(rng: np.random.Generator, f0_median: float, cfg: SynthConfig) -> np.ndarray:
    n = _ms_to_samples(rng.uniform(300, 700))
    f0 = f0_median * (1.0 + rng.uniform(-0.02, 0.02))
    f1_c, f2_c = cfg.confirmation_formants
    f1 = np.full(n, f1_c + rng.uniform(-25, 25))
    f2 = np.full(n, f2_c + rng.uniform(-50, 50))
    token = _resonate(_pulse_train(np.full(n, f0)), f1, f2, cfg.pole_radius)
    return _shape_token(token, rng.uniform(0.18, 0.32), cfg.noise_db, rng)


def _other_token(rng: np.random.Generator, f0_median: float, cfg: SynthConfig) -> np.ndarray:
    n = _ms_to_samples(rng.uniform(500, 3000))
    t = np.arange(n) / n
    # pitch excursion of at least +/-20 percent around the speaker median
    depth = rng.uniform(0.2, 0.35)
    cycles = rng.integers(1, 3)
    f0 = f0_median * (1.0 + depth * np.sin(2.0 * np.pi * cycles * t + rng.uniform(0, 2 * np.pi)))
    # formant trajectories sweeping at least 400 Hz
    lo1 = rng.uniform(280, 550)
    hi1 = lo1 + rng.uniform(400, 700)
    lo2 = rng.uniform(1000, 1800)
    hi2 = lo2 + rng.uniform(400, 800)
    f1 = np.linspace(lo1, hi1, n) if rng.random() < 0.5 else np.linspace(hi1, lo1, n)
    f2 = np.linspace(lo2, hi2, n) if rng.random() < 0.5 else np.linspace(hi2, lo2, n)
    token = _resonate(_pulse_train(f0), f1, f2, cfg.pole_radius)
    return _shape_token(token, rng.uniform(0.18, 0.32), cfg.noise_db, rng)


def generate_corpus(out_dir: str | Path, config: SynthConfig = SynthConfig()) -> Path:
    """Write per-speaker WAVs plus manifest.csv and meta.json; returns the manifest path."""
    out_dir = Path(out_dir)
    wav_dir = out_dir / "wavs"
    wav_dir.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(config.seed)
    descriptors: list[SegmentDescriptor] = []
    for s in range(config.speakers):
        speaker_id = f"spk{s:02d}"
        f0_median = rng.uniform(95, 235)
        n_segments = config.segments_per_speaker
        n_confirm = max(2, round(config.confirmation_rate * n_segments))
        kinds = np.array([True] * n_confirm + [False] * (n_segments - n_confirm))
        rng.shuffle(kinds)
        pieces = []
        cursor = 0
        wav_name = f"wavs/{speaker_id}.wav"
        for is_confirmation in kinds:
            gap = np.zeros(_ms_to_samples(rng.uniform(300, 600)))
            pieces.append(gap)
            cursor += gap.size
            token = (
                _confirmation_token(rng, f0_median, config)
                if is_confirmation
                else _other_token(rng, f0_median, config)
            )
            start_ms = cursor * 1000 // SAMPLE_RATE
            end_ms = (cursor + token.size) * 1000 // SAMPLE_RATE
            descriptors.append(SegmentDescriptor(
                wav_path=wav_name,
                speaker_id=speaker_id,
                start_ms=int(start_ms),
                end_ms=int(end_ms),
                label=Label.CONFIRMATION if is_confirmation else Label.OTHER,
            ))
            pieces.append(token)
            cursor += token.size
        pieces.append(np.zeros(_ms_to_samples(400)))
        write_wav(out_dir / wav_name, AudioBuffer(np.concatenate(pieces)))
    manifest = out_dir / "manifest.csv"
    write_manifest(descriptors, manifest)
    (out_dir / "meta.json").write_text(json.dumps(config.to_dict(), indent=2))
    return manifest
