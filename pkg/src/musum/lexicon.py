"""Musical words and sentences.

Frames of a song are clustered with K-means; each frame becomes the id of
its nearest centroid (a word), and consecutive words are grouped into
fixed-size sentences that are weighted into a term-sentence matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .audio_io import TimeInterval
from .spectral import FeatureMatrix

WEIGHTINGS = ("raw", "binary", "tfidf", "damptf")

MAX_ITER = 100
REL_TOL = 1e-6


@dataclass(frozen=True)
class Vocabulary:
    centroids: np.ndarray
    seed: int
    inertia: float
    inertia_history: tuple = field(default=(), repr=False)
    n_iter: int = 0

    @property
    def k(self) -> int:
        return self.centroids.shape[0]


@dataclass(frozen=True)
class WordSequence:
    word_ids: np.ndarray
    frame_start_times: np.ndarray
    frame_s: float

    def __len__(self):
        return self.word_ids.size


@dataclass(frozen=True)
class Sentence:
    index: int
    word_ids: np.ndarray
    span: TimeInterval


@dataclass(frozen=True)
class TermSentenceMatrix:
    values: np.ndarray
    scheme: str

    @property
    def shape(self):
        return self.values.shape


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    # explicit differences, so equal distances compare equal
    return ((points[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)


def _kmeans_pp(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(n))]
    d2 = _sq_dists(points, points[chosen]).min(axis=1)
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(n, p=d2 / total))
        else:
            # all points coincide with a centre; pick any unused index
            free = np.setdiff1d(np.arange(n), chosen)
            nxt = int(rng.choice(free))
        chosen.append(nxt)
        d2 = np.minimum(d2, _sq_dists(points, points[nxt:nxt + 1])[:, 0])
    return points[chosen].copy()


def kmeans(features, k: int, seed: int = 0) -> Vocabulary:
    """Lloyd's algorithm from a seeded k-means++ start.

    Stops after 100 iterations, when assignments stop changing, or when
    the relative inertia change drops below 1e-6. An empty cluster is
    moved onto the point farthest from its current centroid.
    """
    points = np.asarray(getattr(features, "rows", features), dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    n = points.shape[0]
    if k < 1 or n < k:
        raise ValueError(f"cannot form {k} clusters from {n} frames")
    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp(points, k, rng)
    labels = None
    history = []
    n_iter = 0
    for n_iter in range(1, MAX_ITER + 1):
        d2 = _sq_dists(points, centroids)
        new_labels = d2.argmin(axis=1)
        inertia = float(d2[np.arange(n), new_labels].sum())
        history.append(inertia)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        if len(history) > 1 and history[-2] > 0 and (history[-2] - inertia) / history[-2] < REL_TOL:
            labels = new_labels
            break
        labels = new_labels
        counts = np.bincount(labels, minlength=k)
        for j in np.flatnonzero(counts == 0):
            own = np.where(counts[labels] > 1, d2[np.arange(n), labels], -1.0)
            far = int(own.argmax())
            counts[labels[far]] -= 1
            labels[far] = j
            counts[j] = 1
            d2[far, j] = 0.0
        for j in range(k):
            centroids[j] = points[labels == j].mean(axis=0)
    d2 = _sq_dists(points, centroids)
    final = float(d2.min(axis=1).sum())
    if final < history[-1]:
        history.append(final)
    return Vocabulary(centroids, seed, history[-1], tuple(history), n_iter)


def assign_words(features, vocab: Vocabulary) -> WordSequence:
    """Map each frame to its nearest centroid; ties go to the lower index."""
    rows = np.asarray(getattr(features, "rows", features), dtype=np.float64)
    if rows.ndim == 1:
        rows = rows[:, None]
    if rows.shape[1] != vocab.centroids.shape[1]:
        raise ValueError(
            f"feature dimension {rows.shape[1]} != vocabulary dimension {vocab.centroids.shape[1]}")
    ids = _sq_dists(rows, vocab.centroids).argmin(axis=1)
    if isinstance(features, FeatureMatrix):
        starts, frame_s = features.frame_start_times, features.frame_spec.frame_s
    else:
        starts, frame_s = np.arange(rows.shape[0], dtype=np.float64), 1.0
    return WordSequence(ids, np.asarray(starts, dtype=np.float64), frame_s)


def segment_sentences(words: WordSequence, sentence_size: int) -> list[Sentence]:
    """Cut the word stream into consecutive blocks of `sentence_size`.

    A shorter trailing block is kept. A sentence spans from the start of
    its first frame to the end of its last frame.
    """
    if len(words) == 0:
        raise ValueError("cannot segment an empty word sequence")
    if sentence_size < 1:
        raise ValueError("sentence_size must be positive")
    out = []
    for i, lo in enumerate(range(0, len(words), sentence_size)):
        hi = min(lo + sentence_size, len(words))
        span = TimeInterval(float(words.frame_start_times[lo]),
                            float(words.frame_start_times[hi - 1] + words.frame_s))
        out.append(Sentence(i, words.word_ids[lo:hi], span))
    return out


def weigh(sentences: Sequence, k: int, scheme: str = "raw") -> TermSentenceMatrix:
    """Build the k x N term-sentence matrix under one weighting scheme.

    raw counts, binary presence, tf * ln(N/df), or the dampened variant
    (1 + ln tf) * ln(N/df).
    """
    if scheme not in WEIGHTINGS:
        raise ValueError(f"unknown weighting {scheme!r}; expected one of {WEIGHTINGS}")
    n = len(sentences)
    tf = np.zeros((k, n))
    for j, s in enumerate(sentences):
        ids = np.asarray(getattr(s, "word_ids", s), dtype=np.int64)
        if ids.size and (ids.min() < 0 or ids.max() >= k):
            raise ValueError(f"sentence {j} has word ids outside [0, {k})")
        tf[:, j] = np.bincount(ids, minlength=k)
    if scheme == "raw":
        return TermSentenceMatrix(tf, scheme)
    if scheme == "binary":
        return TermSentenceMatrix((tf > 0).astype(np.float64), scheme)
    df = np.count_nonzero(tf, axis=1)
    idf = np.where(df > 0, np.log(n / np.maximum(df, 1)), 0.0)
    if scheme == "tfidf":
        local = tf
    else:
        local = np.zeros_like(tf)
        present = tf > 0
        local[present] = 1.0 + np.log(tf[present])
    return TermSentenceMatrix(local * idf[:, None], scheme)


def cosine(u, v) -> float:
    """Cosine similarity; 0 when either vector is all zero."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.size} vs {v.size}")
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        return 0.0
    return float(np.clip(u @ v / (nu * nv), -1.0, 1.0))


def cosine_matrix(vectors: np.ndarray) -> np.ndarray:
    """Pairwise cosine between the rows of `vectors` (zero rows give 0)."""
    x = np.asarray(vectors, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1)
    nz = norms > 0
    unit = np.zeros_like(x)
    unit[nz] = x[nz] / norms[nz, None]
    sim = unit @ unit.T
    sim = np.clip((sim + sim.T) / 2.0, -1.0, 1.0)
    idx = np.flatnonzero(nz)
    sim[idx, idx] = 1.0
    return sim
