"""Mono 16-bit PCM WAV input/output and sample-level clip surgery."""

from __future__ import annotations

import wave
from dataclasses import dataclass
from typing import Sequence

import numpy as np

FULL_SCALE = 32768.0


class AudioFormatError(ValueError):
    """The file is not a readable mono 16-bit RIFF/WAVE PCM file."""


@dataclass(frozen=True)
class AudioClip:
    samples: np.ndarray
    sample_rate: int
    source_id: str = ""

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioClip is mono: samples must be one-dimensional")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample_rate must be positive, got {self.sample_rate}")
        if samples.size and (np.max(np.abs(samples)) > 1.0 or not np.all(np.isfinite(samples))):
            raise ValueError("samples must be finite and within [-1.0, 1.0]")
        samples = samples.copy()
        samples.flags.writeable = False
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate


@dataclass(frozen=True)
class TimeInterval:
    start_s: float
    end_s: float

    def __post_init__(self):
        if self.start_s < 0:
            raise ValueError(f"interval start must be >= 0, got {self.start_s}")
        if not self.end_s > self.start_s:
            raise ValueError(f"interval end {self.end_s} must exceed start {self.start_s}")

    @property
    def duration(self) -> float:
        return self.end_s - self.start_s

    def sample_bounds(self, sample_rate: int) -> tuple[int, int]:
        # each endpoint rounds to the nearest sample on its own
        return int(round(self.start_s * sample_rate)), int(round(self.end_s * sample_rate))


def load_wav(path) -> AudioClip:
    """Read a mono 16-bit PCM WAV file; samples are scaled by 1/32768."""
    try:
        with wave.open(str(path), "rb") as wf:
            channels = wf.getnchannels()
            width = wf.getsampwidth()
            rate = wf.getframerate()
            if channels != 1:
                raise AudioFormatError(
                    f"{path}: {channels} channels; only mono is supported (no downmixing)")
            if width != 2:
                raise AudioFormatError(
                    f"{path}: {8 * width}-bit samples; only 16-bit PCM is supported")
            raw = wf.readframes(wf.getnframes())
    except (wave.Error, EOFError) as exc:
        raise AudioFormatError(f"{path}: malformed WAV file ({exc})") from exc
    pcm = np.frombuffer(raw, dtype="<i2")
    return AudioClip(pcm.astype(np.float64) / FULL_SCALE, rate, source_id=str(path))


def to_pcm16(samples: np.ndarray) -> np.ndarray:
    scaled = np.round(np.asarray(samples, dtype=np.float64) * FULL_SCALE)
    return np.clip(scaled, -32768, 32767).astype("<i2")


def save_wav(clip: AudioClip, path) -> None:
    if len(clip) == 0:
        raise ValueError("refusing to write an empty clip")
    with open(path, "wb") as fh, wave.open(fh, "wb") as wf:
        wf.setnchannels(1)
        wf.setsampwidth(2)
        wf.setframerate(clip.sample_rate)
        wf.writeframes(to_pcm16(clip.samples).tobytes())


def extract_section(clip: AudioClip, position: str, duration_s: float) -> AudioClip:
    """Cut a contiguous `duration_s` section from the begin, middle or end.

    The middle section is centred: it starts at (D - d) / 2.
    """
    total = clip.duration
    if duration_s <= 0 or duration_s > total + 0.5 / clip.sample_rate:
        raise ValueError(f"section of {duration_s} s does not fit in a {total:.3f} s clip")
    if position == "begin":
        start = 0.0
    elif position == "middle":
        start = (total - duration_s) / 2.0
    elif position == "end":
        start = total - duration_s
    else:
        raise ValueError(f"position must be begin, middle or end, not {position!r}")
    n = int(round(duration_s * clip.sample_rate))
    lo = int(round(start * clip.sample_rate))
    lo = min(max(lo, 0), len(clip) - n)
    return AudioClip(clip.samples[lo:lo + n], clip.sample_rate, clip.source_id)


def splice(clip: AudioClip, intervals: Sequence[TimeInterval]) -> AudioClip:
    """Concatenate the given intervals, in the order given."""
    if not intervals:
        raise ValueError("splice needs at least one interval")
    blocks = []
    for iv in intervals:
        lo, hi = iv.sample_bounds(clip.sample_rate)
        if hi > len(clip) or hi <= lo:
            raise ValueError(
                f"interval [{iv.start_s}, {iv.end_s}) s lies outside the {clip.duration:.3f} s clip")
        blocks.append(clip.samples[lo:hi])
    return AudioClip(np.concatenate(blocks), clip.sample_rate, clip.source_id)
