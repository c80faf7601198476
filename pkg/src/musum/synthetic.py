"""Synthetic two-class corpus for smoke-testing the evaluation pipeline.

"String-like" clips are plucked harmonic notes whose overtones reach the
8-11 kHz band; "percussive" clips are noise bursts over 60 Hz kick pulses
at 2 Hz. Neither is meant to sound like music.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .audio_io import AudioClip, save_wav
from .harness import DatasetManifest, write_manifest

SAMPLE_RATE = 22050


def _normalize(x: np.ndarray, peak: float) -> np.ndarray:
    return x * (peak / max(np.max(np.abs(x)), 1e-12))


def string_like(duration_s: float, rng: np.random.Generator, sr: int = SAMPLE_RATE) -> AudioClip:
    n = int(round(duration_s * sr))
    out = np.zeros(n)
    pos = 0
    while pos < n:
        note = int(sr * rng.uniform(0.4, 0.9))
        f0 = 110.0 * 2 ** (rng.integers(0, 30) / 12.0)
        t = np.arange(min(note, n - pos)) / sr
        n_harm = int((sr / 2 - 50) // f0)
        h = np.arange(1, n_harm + 1)
        amps = h ** -0.6 * rng.uniform(0.5, 1.0, n_harm)
        phases = rng.uniform(0, 2 * np.pi, n_harm)
        tone = (amps[:, None] * np.sin(2 * np.pi * f0 * h[:, None] * t + phases[:, None])).sum(axis=0)
        out[pos:pos + t.size] += tone * np.exp(-t / rng.uniform(0.3, 0.8))
        pos += note
    return AudioClip(_normalize(out, rng.uniform(0.4, 0.9)), sr, "string")


def percussive(duration_s: float, rng: np.random.Generator, sr: int = SAMPLE_RATE) -> AudioClip:
    n = int(round(duration_s * sr))
    out = 0.02 * rng.standard_normal(n)
    period = sr // 2
    kick_t = np.arange(int(0.25 * sr)) / sr
    kick = np.sin(2 * np.pi * 60.0 * kick_t) * np.exp(-kick_t / 0.08)
    burst_len = int(0.08 * sr)
    for start in range(0, n, period):
        seg = out[start:start + kick.size]
        seg += kick[:seg.size]
        off = start + int(rng.integers(0, period // 2))
        burst = rng.standard_normal(burst_len) * np.exp(-np.arange(burst_len) / (0.02 * sr))
        burst = np.convolve(burst, np.ones(8) / 8, mode="same")
        seg = out[off:off + burst_len]
        seg += 0.5 * burst[:seg.size]
    return AudioClip(_normalize(out, rng.uniform(0.4, 0.9)), sr, "percussive")


def make_corpus(out_dir, n_per_class: int = 20, duration_s: float = 60.0, seed: int = 0) -> DatasetManifest:
    """Write a balanced corpus of WAV files and its manifest.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(seed)
    entries = []
    for i in range(n_per_class):
        for label, make in (("pos", string_like), ("neg", percussive)):
            name = f"{label}_{i:03d}.wav"
            save_wav(make(duration_s, rng), out / name)
            entries.append((str(out / name), label))
    manifest = DatasetManifest(entries, "synthetic")
    write_manifest(manifest, out / "manifest.csv")
    return manifest
