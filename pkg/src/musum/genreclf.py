"""Song-level features, a linear soft-margin SVM and k-fold cross-validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .audio_io import AudioClip
from .spectral import (
    HIGH_BAND,
    LOW_BAND,
    FrameSpec,
    band_spectrogram,
    mfcc,
    rhythmic_features,
    rms_energy,
)

N_FEATURES = 32
CLF_FRAME = FrameSpec(0.5, 0.25)
N_ITER = 100_000
EPOCH = 1_000

FEATURE_NAMES = (
    [f"mfcc{i}" for i in range(1, 14)]
    + ["rms"]
    + [f"high_{n}" for n in (
        "maxamp", "minamp", "above80", "above15", "above_max", "below_min",
        "peak_mean", "peak_std", "peak_max")]
    + [f"low_{n}" for n in (
        "maxamp", "minamp", "above80", "above15", "above_max", "below_min",
        "peak_mean", "peak_std", "peak_max")]
)


def song_features(clip: AudioClip) -> np.ndarray:
    """32 values: mean MFCC c1..c13, RMS, high-band rhythm, low-band rhythm."""
    if clip.duration < 1.0:
        raise ValueError(f"song features need at least 1 s of audio, got {clip.duration:.3f} s")
    mfcc_mean = mfcc(clip, CLF_FRAME, 13).rows.mean(axis=0)
    nyquist = clip.sample_rate / 2.0
    high = rhythmic_features(band_spectrogram(clip, HIGH_BAND[0], min(HIGH_BAND[1], nyquist)))
    low = rhythmic_features(band_spectrogram(clip, *LOW_BAND))
    vec = np.concatenate([mfcc_mean, [rms_energy(clip)], np.asarray(high, float), np.asarray(low, float)])
    assert vec.size == N_FEATURES
    return vec


@dataclass(frozen=True)
class SvmModel:
    weights: np.ndarray
    bias: float
    mean: np.ndarray
    scale: np.ndarray
    C: float = 1.0
    objective_history: tuple = field(default=(), repr=False)

    def standardize(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale

    def decision(self, X) -> np.ndarray:
        return self.standardize(X) @ self.weights + self.bias

    def to_json(self) -> str:
        return json.dumps({
            "weights": self.weights.tolist(),
            "bias": self.bias,
            "mean": self.mean.tolist(),
            "scale": self.scale.tolist(),
            "C": self.C,
        })

    @classmethod
    def from_json(cls, text: str) -> "SvmModel":
        d = json.loads(text)
        return cls(np.array(d["weights"]), float(d["bias"]), np.array(d["mean"]),
                   np.array(d["scale"]), float(d["C"]))


def hinge_objective(w, b, X, y, C) -> float:
    return 0.5 * float(w @ w) + C * float(np.maximum(0.0, 1.0 - y * (X @ w + b)).sum())


def train(X, y, C: float = 1.0, n_iter: int = N_ITER) -> SvmModel:
    """Fit a linear soft-margin SVM by full-batch primal subgradient descent.

    Minimizes 0.5 |w|^2 + C sum hinge on standardized features, with the
    bias unregularized. Step size max(1, C) / sqrt(t) on the objective
    divided by C*n; the best iterate seen is returned.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] != y.size:
        raise ValueError("X must be (n_samples, n_features) matching y")
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise ValueError("labels must be +1 or -1")
    if np.unique(y).size < 2:
        raise ValueError("training needs at least one example of each class")
    if C <= 0:
        raise ValueError("C must be positive")
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    scale[scale == 0] = 1.0
    Z = (X - mean) / scale
    n, dim = Z.shape
    lam = 1.0 / (C * n)
    step0 = max(1.0, C)

    w = np.zeros(dim)
    b = 0.0
    best = (np.inf, w.copy(), b)
    history = []
    for t in range(1, n_iter + 1):
        margin = y * (Z @ w + b)
        viol = margin < 1.0
        f = 0.5 * float(w @ w) + C * float((1.0 - margin[viol]).sum())
        if f < best[0]:
            best = (f, w.copy(), b)
        if t % EPOCH == 0:
            history.append(best[0])
        eta = step0 / np.sqrt(t)
        yv = y[viol]
        w = w - eta * (lam * w - (yv @ Z[viol]) / n)
        b = b + eta * yv.sum() / n
    f_final = hinge_objective(w, b, Z, y, C)
    if f_final < best[0]:
        best = (f_final, w, b)
    history.append(best[0])
    return SvmModel(best[1], float(best[2]), mean, scale, C, tuple(history))


def predict(model: SvmModel, x) -> np.ndarray | int:
    """sign(w . standardize(x) + b) with 0 mapped to +1."""
    scores = model.decision(x)
    labels = np.where(scores >= 0, 1, -1)
    return int(labels) if labels.ndim == 0 else labels


@dataclass(frozen=True)
class CvReport:
    fold_accuracies: tuple
    mean_accuracy: float
    fold_assignments: np.ndarray
    seed: int

    def to_dict(self) -> dict:
        return {
            "fold_accuracies": list(self.fold_accuracies),
            "mean_accuracy": self.mean_accuracy,
            "fold_assignments": [int(f) for f in self.fold_assignments],
            "seed": self.seed,
        }


def stratified_folds(y, k: int, seed: int) -> np.ndarray:
    """Seeded stratified fold index per example.

    Each class is shuffled and dealt round-robin, continuing from the fold
    where the previous class stopped, so fold sizes differ by at most one.
    """
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    folds = np.empty(y.size, dtype=np.int64)
    offset = 0
    for label in np.unique(y):
        idx = np.flatnonzero(y == label)
        idx = idx[rng.permutation(idx.size)]
        folds[idx] = (offset + np.arange(idx.size)) % k
        offset = (offset + idx.size) % k
    return folds


def cross_validate(X, y, k: int = 5, seed: int = 0, C: float = 1.0,
                   trainer: Callable | None = None) -> CvReport:
    """k-fold stratified CV; `trainer(X, y)` must return an object usable
    by `predict`-style calls (defaults to a linear SVM with the given C)."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if k < 2:
        raise ValueError("need at least 2 folds")
    if k > y.size:
        raise ValueError(f"{k} folds requested for only {y.size} examples")
    fit = trainer or (lambda Xt, yt: train(Xt, yt, C=C))
    folds = stratified_folds(y, k, seed)
    accs = []
    for f in range(k):
        test = folds == f
        model = fit(X[~test], y[~test])
        pred = model(X[test]) if callable(model) else predict(model, X[test])
        accs.append(float(np.mean(np.asarray(pred) == y[test])))
    return CvReport(tuple(accs), float(np.mean(accs)), folds, seed)
