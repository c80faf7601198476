"""Framing, MFCCs, RMS energy and band-limited rhythmic descriptors."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.fft import dct

from .audio_io import AudioClip

PRE_EMPHASIS = 0.97
N_MEL_FILTERS = 26
LOG_FLOOR = 1e-10

RHYTHM_FRAME = 1024
RHYTHM_HOP = 512
PEAK_FRACTION = 0.5

LOW_BAND = (20.0, 100.0)
HIGH_BAND = (8000.0, 11025.0)


@dataclass(frozen=True)
class FrameSpec:
    frame_s: float
    hop_s: float

    def __post_init__(self):
        if not 0 < self.hop_s <= self.frame_s:
            raise ValueError(f"need 0 < hop_s <= frame_s, got frame {self.frame_s} hop {self.hop_s}")

    def in_samples(self, sample_rate: int) -> tuple[int, int]:
        return int(round(self.frame_s * sample_rate)), int(round(self.hop_s * sample_rate))


@dataclass(frozen=True)
class FeatureMatrix:
    rows: np.ndarray
    frame_spec: FrameSpec
    frame_start_times: np.ndarray

    @property
    def n_frames(self) -> int:
        return self.rows.shape[0]

    @property
    def n_dims(self) -> int:
        return self.rows.shape[1]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in self.rows:
                writer.writerow([f"{v:.12g}" for v in row])


@dataclass(frozen=True)
class BandSpectrogram:
    """Magnitudes with time along rows and frequency along columns."""

    values: np.ndarray
    band: tuple[float, float]
    bin_freqs: np.ndarray
    frame: int = RHYTHM_FRAME
    hop: int = RHYTHM_HOP


class RhythmicVector(NamedTuple):
    maxamp: float
    minamp: float
    count_above_80pct: int
    count_above_15pct: int
    count_above_maxamp: int
    count_below_minamp: int
    mean_peak_dist: float
    std_peak_dist: float
    max_peak_dist: float


def _frame_samples(samples: np.ndarray, frame: int, hop: int) -> np.ndarray:
    n = 1 + (samples.size - frame) // hop
    idx = np.arange(frame)[None, :] + hop * np.arange(n)[:, None]
    return samples[idx]


def frame_signal(clip: AudioClip, spec: FrameSpec) -> np.ndarray:
    """Split a clip into windows starting at 0, hop, 2*hop, ...

    Trailing windows that would run past the end are dropped. Returns an
    (n_windows, frame_len) array.
    """
    frame, hop = spec.in_samples(clip.sample_rate)
    if frame < 1 or len(clip) < frame:
        raise ValueError(f"clip of {clip.duration:.3f} s is shorter than one {spec.frame_s} s frame")
    return _frame_samples(clip.samples, frame, hop)


def hz_to_mel(f):
    return 2595.0 * np.log10(1.0 + np.asarray(f, dtype=np.float64) / 700.0)


def mel_to_hz(m):
    return 700.0 * (10.0 ** (np.asarray(m, dtype=np.float64) / 2595.0) - 1.0)


def mel_filterbank(sample_rate: int, nfft: int, n_filters: int = N_MEL_FILTERS) -> tuple[np.ndarray, np.ndarray]:
    """Triangular mel filters spanning 0 Hz to Nyquist.

    Triangles are evaluated at the exact bin frequencies, so every filter
    has unit peak response at its centre. Returns (weights, centres_hz)
    with weights shaped (n_filters, nfft // 2 + 1).
    """
    edges = mel_to_hz(np.linspace(0.0, hz_to_mel(sample_rate / 2.0), n_filters + 2))
    freqs = np.arange(nfft // 2 + 1) * sample_rate / nfft
    lo, mid, hi = edges[:-2, None], edges[1:-1, None], edges[2:, None]
    rising = (freqs - lo) / (mid - lo)
    falling = (hi - freqs) / (hi - mid)
    return np.maximum(0.0, np.minimum(rising, falling)), edges[1:-1]


def next_pow2(n: int) -> int:
    return 1 << max(0, int(n - 1).bit_length())


def power_spectrum(frames: np.ndarray, nfft: int) -> np.ndarray:
    return np.abs(np.fft.rfft(frames, nfft, axis=-1)) ** 2 / nfft


def mel_energies(clip: AudioClip, spec: FrameSpec) -> np.ndarray:
    """Per-frame mel filterbank energies (before the log)."""
    frames = frame_signal(clip, spec)
    emphasized = np.empty_like(frames)
    emphasized[:, 0] = frames[:, 0]
    emphasized[:, 1:] = frames[:, 1:] - PRE_EMPHASIS * frames[:, :-1]
    emphasized *= np.hamming(frames.shape[1])
    nfft = next_pow2(frames.shape[1])
    weights, _ = mel_filterbank(clip.sample_rate, nfft)
    return power_spectrum(emphasized, nfft) @ weights.T


def mfcc(clip: AudioClip, spec: FrameSpec, n_coeffs: int = 12) -> FeatureMatrix:
    """MFCCs c1..c_n per frame (c0 dropped).

    Pre-emphasis is applied inside each frame, so frames are independent
    of their neighbours.
    """
    if not 1 <= n_coeffs < N_MEL_FILTERS:
        raise ValueError(f"n_coeffs must be in [1, {N_MEL_FILTERS - 1}], got {n_coeffs}")
    logmel = np.log(np.maximum(mel_energies(clip, spec), LOG_FLOOR))
    ceps = dct(logmel, type=2, axis=1, norm="ortho")[:, 1:n_coeffs + 1]
    starts = np.arange(ceps.shape[0]) * spec.in_samples(clip.sample_rate)[1] / clip.sample_rate
    return FeatureMatrix(ceps, spec, starts)


def rms_energy(clip: AudioClip) -> float:
    if len(clip) == 0:
        raise ValueError("RMS of an empty clip is undefined")
    return float(np.sqrt(np.mean(clip.samples ** 2)))


def band_spectrogram(clip: AudioClip, f_lo: float, f_hi: float) -> BandSpectrogram:
    """Hamming-windowed 1024-point magnitude spectra (hop 512) restricted
    to the bins whose centre frequency lies in [f_lo, f_hi]."""
    nyquist = clip.sample_rate / 2.0
    if not 0 <= f_lo < f_hi <= nyquist:
        raise ValueError(f"band [{f_lo}, {f_hi}] Hz must satisfy 0 <= lo < hi <= {nyquist}")
    if len(clip) < RHYTHM_FRAME:
        raise ValueError(f"clip needs at least {RHYTHM_FRAME} samples for a band spectrogram")
    frames = _frame_samples(clip.samples, RHYTHM_FRAME, RHYTHM_HOP) * np.hamming(RHYTHM_FRAME)
    mags = np.abs(np.fft.rfft(frames, RHYTHM_FRAME, axis=1))
    bins = band_bins(clip.sample_rate, f_lo, f_hi)
    freqs = bins * clip.sample_rate / RHYTHM_FRAME
    return BandSpectrogram(mags[:, bins], (f_lo, f_hi), freqs)


def band_bins(sample_rate: int, f_lo: float, f_hi: float, nfft: int = RHYTHM_FRAME) -> np.ndarray:
    k = np.arange(nfft // 2 + 1)
    centres = k * sample_rate / nfft
    return k[(centres >= f_lo) & (centres <= f_hi)]


def find_peaks(series: np.ndarray, fraction: float = PEAK_FRACTION) -> np.ndarray:
    """Indices of strict interior local maxima above `fraction` of the max."""
    e = np.asarray(series, dtype=np.float64)
    if e.size < 3:
        return np.zeros(0, dtype=int)
    inner = (e[1:-1] > e[:-2]) & (e[1:-1] > e[2:]) & (e[1:-1] > fraction * e.max())
    return np.flatnonzero(inner) + 1


def rhythmic_features(spec: BandSpectrogram) -> RhythmicVector:
    v = np.asarray(spec.values, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] < 2 or v.shape[1] < 1:
        raise ValueError("rhythmic features need a spectrogram with >= 2 frames and >= 1 bin")
    avg = v.mean(axis=0)
    maxamp, minamp = float(avg.max()), float(avg.min())
    peaks = find_peaks(v.sum(axis=1))
    gaps = np.diff(peaks).astype(np.float64)
    if gaps.size:
        dist = (float(gaps.mean()), float(gaps.std()), float(gaps.max()))
    else:
        dist = (0.0, 0.0, 0.0)
    return RhythmicVector(
        maxamp,
        minamp,
        int(np.count_nonzero(v > 0.8 * maxamp)),
        int(np.count_nonzero(v > 0.15 * maxamp)),
        int(np.count_nonzero(v > maxamp)),
        int(np.count_nonzero(v < minamp)),
        *dist,
    )
