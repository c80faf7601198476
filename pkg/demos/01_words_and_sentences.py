"""
From audio to musical words and sentences
=========================================

A synthetic clip is cut into MFCC frames, the frames are clustered into a
per-song vocabulary, and the resulting word stream is grouped into
fixed-size sentences that can be weighted like a text collection.
"""

import numpy as np

from musum import synthetic
from musum.lexicon import assign_words, kmeans, segment_sentences, weigh
from musum.spectral import FrameSpec, mfcc

clip = synthetic.string_like(40.0, np.random.default_rng(0))
print(f"clip: {clip.duration:.1f} s at {clip.sample_rate} Hz")

# half-second frames with 50% overlap, 12 coefficients per frame
features = mfcc(clip, FrameSpec(0.5, 0.25), 12)
print("feature matrix:", features.rows.shape)

# a 25-word vocabulary for this song only
vocab = kmeans(features, 25, seed=0)
print(f"k-means converged in {vocab.n_iter} iterations, inertia {vocab.inertia:.1f}")

words = assign_words(features, vocab)
print("first 20 words:", words.word_ids[:20].tolist())

sentences = segment_sentences(words, 5)
print(f"{len(sentences)} sentences; first spans",
      [(s.span.start_s, s.span.end_s) for s in sentences[:3]])

# the same sentences under the four weighting schemes
for scheme in ("raw", "binary", "tfidf", "damptf"):
    m = weigh(sentences, vocab.k, scheme)
    print(f"{scheme:>7}: shape {m.values.shape}, nonzero {np.count_nonzero(m.values)}, "
          f"max {m.values.max():.3f}")
