"""Extractive summarization of music.

Audio is discretized into musical words (K-means over MFCC frames) and
fixed-size sentences, then summarized with Average Similarity, MMR,
LexRank or LSA. Summaries are judged extrinsically with a linear SVM
genre classifier under k-fold cross-validation.
"""

from .audio_io import AudioClip, TimeInterval, load_wav, save_wav, extract_section, splice
from .spectral import FrameSpec, FeatureMatrix, mfcc, rms_energy, band_spectrogram, rhythmic_features
from .lexicon import kmeans, assign_words, segment_sentences, weigh, cosine
from .summarize import (
    LexRankConfig,
    SummarySelection,
    avg_similarity_pick,
    mmr_select,
    lexrank_scores,
    lexrank_select,
    lsa_scores,
    lsa_select,
)
from .genreclf import song_features, train, predict, cross_validate

__version__ = "0.1.0"

__all__ = [
    "AudioClip",
    "TimeInterval",
    "load_wav",
    "save_wav",
    "extract_section",
    "splice",
    "FrameSpec",
    "FeatureMatrix",
    "mfcc",
    "rms_energy",
    "band_spectrogram",
    "rhythmic_features",
    "kmeans",
    "assign_words",
    "segment_sentences",
    "weigh",
    "cosine",
    "LexRankConfig",
    "SummarySelection",
    "avg_similarity_pick",
    "mmr_select",
    "lexrank_scores",
    "lexrank_select",
    "lsa_scores",
    "lsa_select",
    "song_features",
    "train",
    "predict",
    "cross_validate",
]
