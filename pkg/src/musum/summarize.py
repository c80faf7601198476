"""Average Similarity, MMR, LexRank and LSA summarizers.

Indices are 0-based throughout. Every selector breaks ties toward the
lowest index.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .audio_io import AudioClip, TimeInterval, splice
from .lexicon import cosine_matrix

ALGORITHMS = ("avgsim", "mmr", "lexrank", "lsa")

# scores closer than this are treated as ties (lowest index wins)
TIE_TOL = 1e-12


@dataclass(frozen=True)
class LexRankConfig:
    d: float = 0.85
    epsilon: float = 1e-4
    edge_threshold: float = 0.0
    weighted: bool = True
    max_iter: int = 10_000

    def __post_init__(self):
        if not 0 < self.d < 1:
            raise ValueError(f"damping must lie in (0, 1), got {self.d}")
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if not 0 <= self.edge_threshold < 1:
            raise ValueError("edge_threshold must lie in [0, 1)")


@dataclass(frozen=True)
class SummarySelection:
    algorithm: str
    selected: tuple
    intervals: tuple
    params: dict = field(default_factory=dict)
    target_s: float = 30.0
    achieved_s: float = 0.0
    shortfall: bool = False

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "params": self.params,
            "selected": [int(i) for i in self.selected],
            "intervals": [[iv.start_s, iv.end_s] for iv in self.intervals],
            "target_s": self.target_s,
            "achieved_s": self.achieved_s,
            "shortfall": self.shortfall,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _values(m) -> np.ndarray:
    return np.asarray(getattr(m, "values", m), dtype=np.float64)


def _first_max(scores: np.ndarray) -> int:
    return int(np.flatnonzero(scores >= scores.max() - TIE_TOL)[0])


def _rank_desc(scores: np.ndarray) -> np.ndarray:
    return np.argsort(-np.asarray(scores, dtype=np.float64), kind="stable")


# -- Average Similarity ---------------------------------------------------

def frame_similarity_matrix(features) -> np.ndarray:
    rows = _values(getattr(features, "rows", features))
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise ValueError("a similarity matrix needs at least 2 frames")
    return cosine_matrix(rows)


def avg_similarity_scores(S, L: int) -> np.ndarray:
    """Q_L for every full window of L frames, i = 0 .. N - L."""
    S = _values(S)
    n = S.shape[0]
    if not 1 <= L < n:
        raise ValueError(f"window length L={L} must satisfy 1 <= L < N={n}")
    row_sums = S.sum(axis=1)
    windows = np.lib.stride_tricks.sliding_window_view(row_sums, L).sum(axis=1)
    return windows / (n * L)


def avg_similarity_pick(S, L: int) -> int:
    """Start frame of the L-frame segment most similar to the whole song."""
    return _first_max(avg_similarity_scores(S, L))


def frames_for_duration(target, frame, hop) -> int:
    """Smallest frame count whose span covers `target`.

    Units only need to agree; pass samples to avoid hop rounding drift.
    """
    if target <= frame:
        return 1
    return int(math.ceil((target - frame) / hop - 1e-9)) + 1


# -- MMR ------------------------------------------------------------------

def mmr_select(M, lam: float, n_target: int, sim: np.ndarray | None = None) -> list[int]:
    """Greedy MMR against the centroid query.

    score(i) = lam * cos(s_i, centroid) - (1 - lam) * max_j cos(s_i, s_j)
    over already selected j; the max over nothing is 0. `sim` may carry a
    precomputed sentence-by-sentence cosine matrix.
    """
    X = _values(M)
    n = X.shape[1]
    if n < 1:
        raise ValueError("MMR needs at least one sentence")
    if not 0 <= n_target <= n:
        raise ValueError(f"n_target={n_target} exceeds the {n} available sentences")
    if not 0.0 <= lam <= 1.0:
        raise ValueError("lambda must lie in [0, 1]")
    cols = X.T
    query = cols.mean(axis=0)
    relevance = cosine_matrix(np.vstack([query, cols]))[0, 1:]
    if sim is None:
        sim = cosine_matrix(cols)
    redundancy = None
    available = np.ones(n, dtype=bool)
    order = []
    for _ in range(n_target):
        score = lam * relevance
        if redundancy is not None:
            score = score - (1.0 - lam) * redundancy
        score[~available] = -np.inf
        pick = _first_max(score)
        order.append(pick)
        available[pick] = False
        col = sim[:, pick]
        redundancy = col.copy() if redundancy is None else np.maximum(redundancy, col)
    return order


# -- LexRank --------------------------------------------------------------

def lexrank_iterate(sim, cfg: LexRankConfig = LexRankConfig()) -> np.ndarray:
    """Damped power iteration on a sentence similarity graph.

    Edges join i != j whenever sim(i, j) > cfg.edge_threshold. Starts from
    1/N and stops once no vertex moves by cfg.epsilon or more. Vertices
    without edges keep (1 - d) / N.
    """
    S = _values(sim)
    n = S.shape[0]
    if S.shape != (n, n) or n < 1:
        raise ValueError("similarity matrix must be square and non-empty")
    W = np.where(S > cfg.edge_threshold, S, 0.0)
    np.fill_diagonal(W, 0.0)
    if not cfg.weighted:
        W = (W > 0).astype(np.float64)
    norm = W.sum(axis=0)
    P = np.divide(W, norm[None, :], out=np.zeros_like(W), where=norm[None, :] > 0)
    base = (1.0 - cfg.d) / n
    scores = np.full(n, 1.0 / n)
    for _ in range(cfg.max_iter):
        nxt = base + cfg.d * (P @ scores)
        done = np.max(np.abs(nxt - scores)) < cfg.epsilon
        scores = nxt
        if done:
            break
    return scores


def lexrank_scores(M, cfg: LexRankConfig = LexRankConfig()) -> np.ndarray:
    X = _values(M)
    if X.ndim != 2 or X.shape[1] < 1:
        raise ValueError("term-sentence matrix must be 2-D with at least one sentence")
    return lexrank_iterate(cosine_matrix(X.T), cfg)


def lexrank_select(scores, n_target: int) -> list[int]:
    scores = np.asarray(scores, dtype=np.float64)
    if not 0 <= n_target <= scores.size:
        raise ValueError(f"n_target={n_target} exceeds the {scores.size} available sentences")
    return [int(i) for i in _rank_desc(scores)[:n_target]]


# -- LSA ------------------------------------------------------------------

def lsa_rank(sigma: np.ndarray) -> int:
    """Largest K with sigma_i >= sigma_{i-1} / 2 for every 2 <= i <= K."""
    k = 1
    while k < sigma.size and sigma[k] > 0 and sigma[k] >= 0.5 * sigma[k - 1]:
        k += 1
    return k


def lsa_decompose(M):
    """Thin SVD of the term-sentence matrix plus the retained rank K."""
    X = _values(M)
    if X.ndim != 2 or X.size == 0:
        raise ValueError("term-sentence matrix must be 2-D and non-empty")
    if not np.any(X):
        raise ValueError("LSA is undefined for an all-zero term-sentence matrix")
    U, sigma, Vt = np.linalg.svd(X, full_matrices=False)
    return U, sigma, Vt, lsa_rank(sigma)


def lsa_scores(M) -> np.ndarray:
    """Sentence score sqrt(sum_{i<=K} v_ij^2 sigma_i^2)."""
    _, sigma, Vt, k = lsa_decompose(M)
    weighted = Vt[:k] * sigma[:k, None]
    return np.sqrt((weighted ** 2).sum(axis=0))


def lsa_select(scores, n_target: int) -> list[int]:
    return lexrank_select(scores, n_target)


# -- assembly -------------------------------------------------------------

def _truncate(clip: AudioClip, intervals: list, target_s: float):
    """Splice intervals and cut the result to exactly target_s when possible."""
    sr = clip.sample_rate
    budget = int(round(target_s * sr))
    kept, used = [], 0
    for iv in intervals:
        lo, hi = iv.sample_bounds(sr)
        take = min(hi - lo, budget - used)
        if take <= 0:
            break
        kept.append(iv if take == hi - lo else TimeInterval(iv.start_s, (lo + take) / sr))
        used += take
    audio = splice(clip, kept)
    if len(audio) > budget:
        audio = AudioClip(audio.samples[:budget], sr, clip.source_id)
    return kept, audio, len(audio) < budget


def assemble(selection: Sequence[int], sentences: Sequence, clip: AudioClip, target_s: float = 30.0,
             algorithm: str = "mmr", params: dict | None = None):
    """Accumulate ranked sentences until target_s is covered, then splice.

    Sentences are taken in ranking order, played back in temporal order and
    the audio is cut at the sample level to exactly target_s. If the ranking
    runs out first, everything gathered is returned with `shortfall` set.
    """
    if len(selection) == 0:
        raise ValueError("cannot assemble an empty selection")
    sr = clip.sample_rate
    budget = int(round(target_s * sr))
    chosen, total = [], 0
    for idx in selection:
        if not 0 <= idx < len(sentences) or idx in chosen:
            raise ValueError(f"invalid or repeated sentence index {idx}")
        chosen.append(int(idx))
        lo, hi = sentences[idx].span.sample_bounds(sr)
        total += hi - lo
        if total >= budget:
            break
    ordered = sorted(chosen, key=lambda i: (sentences[i].span.start_s, i))
    intervals = [sentences[i].span for i in ordered]
    kept, audio, short = _truncate(clip, intervals, target_s)
    summary = SummarySelection(algorithm, tuple(chosen), tuple(kept), dict(params or {}),
                               float(target_s), len(audio) / sr, short)
    return summary, audio


def assemble_avgsim(start: int, n_frames: int, features, clip: AudioClip, target_s: float = 30.0,
                    params: dict | None = None):
    """One contiguous segment covering frames [start, start + n_frames)."""
    if n_frames < 1:
        raise ValueError("empty frame range")
    starts = features.frame_start_times
    last = start + n_frames - 1
    end = min(float(starts[last] + features.frame_spec.frame_s), clip.duration)
    kept, audio, short = _truncate(clip, [TimeInterval(float(starts[start]), end)], target_s)
    summary = SummarySelection("avgsim", tuple(range(start, start + n_frames)), tuple(kept),
                               dict(params or {}), float(target_s), len(audio) / clip.sample_rate, short)
    return summary, audio
