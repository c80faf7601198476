import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from musum.lexicon import (
    Vocabulary,
    WordSequence,
    assign_words,
    cosine,
    kmeans,
    segment_sentences,
    weigh,
)
from musum.spectral import FeatureMatrix, FrameSpec


def best_partition(points, k):
    """Exhaustive search over all labelings into k non-empty clusters."""
    best = (math.inf, None)
    for labels in itertools.product(range(k), repeat=len(points)):
        if len(set(labels)) < k:
            continue
        groups = [[p for p, l in zip(points, labels) if l == j] for j in range(k)]
        cents = [sum(g) / len(g) for g in groups]
        cost = sum((p - cents[l]) ** 2 for p, l in zip(points, labels))
        if cost < best[0]:
            best = (cost, sorted(cents))
    return best


def test_kmeans_two_clusters_matches_exhaustive():
    pts = [0.0, 1.0, 10.0, 11.0]
    cost, cents = best_partition(pts, 2)
    assert (cost, cents) == (1.0, [0.5, 10.5])
    for seed in range(10):
        v = kmeans(np.array(pts)[:, None], 2, seed)
        assert sorted(v.centroids[:, 0]) == cents
        assert v.inertia == cost


def test_kmeans_k_equals_n():
    pts = np.random.default_rng(0).normal(size=(7, 3))
    v = kmeans(pts, 7, seed=1)
    assert v.inertia == 0.0
    assert sorted(map(tuple, v.centroids)) == sorted(map(tuple, pts))


def test_kmeans_k_one_is_mean():
    pts = np.random.default_rng(1).normal(size=(20, 2))
    v = kmeans(pts, 1)
    assert np.allclose(v.centroids[0], pts.mean(axis=0))


def test_kmeans_duplicate_points():
    pts = np.zeros((5, 2))
    v = kmeans(pts, 3)
    assert v.inertia == 0.0 and np.all(np.isfinite(v.centroids))


def test_kmeans_too_few_frames():
    with pytest.raises(ValueError):
        kmeans(np.zeros((3, 2)), 4)


def test_kmeans_seeded_determinism_and_monotone():
    pts = np.random.default_rng(2).normal(size=(200, 4))
    a, b = kmeans(pts, 10, seed=5), kmeans(pts, 10, seed=5)
    assert np.array_equal(a.centroids, b.centroids)
    h = np.array(a.inertia_history)
    assert np.all(np.diff(h) <= 1e-9 * h[0])


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_kmeans_never_beats_exhaustive(seed, k):
    pts = list(np.random.default_rng(seed).integers(0, 20, size=8).astype(float))
    k = min(k, len(set(pts)))
    cost, _ = best_partition(pts, k) if k <= 3 else (0.0, None)
    v = kmeans(np.array(pts)[:, None], k, seed)
    assert v.inertia >= cost - 1e-9


def vocab(*cents):
    return Vocabulary(np.array(cents, dtype=float)[:, None], 0, 0.0)


def test_assign_nearest_and_ties():
    v = vocab(0.5, 10.5)
    assert assign_words(np.array([[0.4]]), v).word_ids.tolist() == [0]
    assert assign_words(np.array([[5.5]]), v).word_ids.tolist() == [0]
    assert assign_words(np.array([[0.5], [10.5]]), v).word_ids.tolist() == [0, 1]


def test_assign_dimension_mismatch():
    with pytest.raises(ValueError):
        assign_words(np.zeros((2, 3)), vocab(0.0, 1.0))


def test_assign_carries_frame_times():
    fm = FeatureMatrix(np.zeros((3, 1)), FrameSpec(0.5, 0.25), np.array([0.0, 0.25, 0.5]))
    w = assign_words(fm, vocab(0.0))
    assert w.frame_s == 0.5 and w.frame_start_times.tolist() == [0.0, 0.25, 0.5]


def words(n, frame_s=0.5, hop_s=0.5):
    return WordSequence(np.arange(n) % 3, np.arange(n) * hop_s, frame_s)


def test_sentence_sizes():
    assert [len(s.word_ids) for s in segment_sentences(words(12), 5)] == [5, 5, 2]
    assert [len(s.word_ids) for s in segment_sentences(words(10), 5)] == [5, 5]


def test_sentence_span_with_overlap():
    s = segment_sentences(words(10, 0.5, 0.25), 5)
    assert (s[0].span.start_s, s[0].span.end_s) == (0.0, 1.5)
    assert s[1].span.start_s == 1.25


def test_sentences_tile_the_song():
    s = segment_sentences(words(23, 0.5, 0.25), 5)
    assert s[0].span.start_s == 0.0
    assert s[-1].span.end_s == 22 * 0.25 + 0.5
    for a, b in zip(s, s[1:]):
        assert b.span.start_s >= a.span.start_s
        assert a.span.end_s - b.span.start_s <= 0.25 + 1e-12


def test_sentence_empty():
    with pytest.raises(ValueError):
        segment_sentences(WordSequence(np.zeros(0, int), np.zeros(0), 0.5), 5)


def test_weigh_raw_binary():
    m = weigh([[0, 0, 1]], 2, "raw").values
    assert m[:, 0].tolist() == [2, 1]
    assert weigh([[0, 0, 1]], 2, "binary").values[:, 0].tolist() == [1, 1]


def test_weigh_tfidf_collapses_ubiquitous_term():
    m = weigh([[0, 1], [0, 0], [0, 2]], 3, "tfidf").values
    assert np.all(m[0] == 0)
    assert m[1, 0] == pytest.approx(math.log(3))


def test_weigh_damptf_hand_values():
    m = weigh([[0, 0], [1]], 2, "damptf").values
    assert m[0, 0] == pytest.approx((1 + math.log(2)) * math.log(2))
    assert m[0, 0] == pytest.approx(1.1737, abs=1e-4)
    assert m[1, 1] == pytest.approx(math.log(2))
    assert m[0, 1] == 0 and m[1, 0] == 0


def test_weigh_rejects_out_of_range():
    with pytest.raises(ValueError):
        weigh([[0, 5]], 3)
    with pytest.raises(ValueError):
        weigh([[0]], 3, "bm25")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.lists(st.integers(0, 5), min_size=1, max_size=8), min_size=1, max_size=10))
def test_weigh_properties(sents):
    raw = weigh(sents, 6, "raw").values
    assert raw.sum(axis=0).tolist() == [len(s) for s in sents]
    assert np.array_equal(weigh(sents, 6, "binary").values, (raw > 0).astype(float))
    for scheme in ("tfidf", "damptf"):
        m = weigh(sents, 6, scheme).values
        assert np.all(m >= 0)
        df = (raw > 0).sum(axis=1)
        nz = (raw > 0) & (df[:, None] < len(sents))
        assert np.all(m[nz] > 0)


def test_cosine_values():
    assert cosine([1, 2], [1, 2]) == pytest.approx(1.0)
    assert cosine([1, 0], [0, 1]) == 0.0
    expected = 32 / math.sqrt(14 * 77)
    assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(expected, abs=1e-12)
    assert cosine([1, 2, 3], [4, 5, 6]) == pytest.approx(0.974632, abs=1e-6)
    assert cosine([0, 0], [1, 1]) == 0.0
    with pytest.raises(ValueError):
        cosine([1, 2], [1, 2, 3])


@settings(max_examples=50)
@given(st.lists(st.floats(0, 10), min_size=3, max_size=3),
       st.lists(st.floats(0, 10), min_size=3, max_size=3),
       st.floats(0.01, 100))
def test_cosine_symmetric_scale_invariant(u, v, a):
    assert cosine(u, v) == pytest.approx(cosine(v, u), abs=1e-12)
    assert cosine(np.multiply(a, u), v) == pytest.approx(cosine(u, v), abs=1e-9)
