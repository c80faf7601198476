"""
Four summarizers on one clip
============================

Average Similarity picks one contiguous stretch; MMR, LexRank and LSA
rank sentences and splice the winners back together in temporal order.
Summaries are written next to this script's working directory.
"""

from pathlib import Path

import numpy as np

from musum import synthetic
from musum.audio_io import save_wav
from musum.harness import summarize_clip

out = Path("demo_summaries")
out.mkdir(exist_ok=True)

clip = synthetic.string_like(90.0, np.random.default_rng(1))
params = {"frame_s": 0.5, "hop_s": 0.5, "vocab": 50, "sentence": 5,
          "weighting": "damptf", "lambda": 0.7, "target_s": 30.0}

for algo in ("avgsim", "mmr", "lexrank", "lsa"):
    selection, audio = summarize_clip(clip, algo, params, seed=0)
    save_wav(audio, out / f"{algo}.wav")
    spans = ", ".join(f"{iv.start_s:.1f}-{iv.end_s:.1f}" for iv in selection.intervals[:6])
    more = " ..." if len(selection.intervals) > 6 else ""
    print(f"{algo:>8}: {selection.achieved_s:.2f} s from {len(selection.intervals)} piece(s): {spans}{more}")

# the JSON record of the last run
print(selection.to_json())
