"""
Judging summaries with a genre classifier
=========================================

A small two-class corpus is generated, the begin/middle/end 30 s
sections are scored as baselines and a slice of the LexRank grid is
scored on summaries. Expect a few minutes of runtime.
"""

import tempfile

from musum import harness, synthetic

workdir = tempfile.mkdtemp(prefix="musum-demo-")
manifest = synthetic.make_corpus(workdir, n_per_class=10, duration_s=60.0, seed=3)
print(f"{len(manifest)} clips in {workdir}")

baselines = []
for position in ("begin", "middle", "end"):
    clips, labels, _ = harness.make_baselines(manifest, position, 30.0)
    baselines.append(harness.evaluate_clips(clips, labels, k_folds=5, seed=0,
                                            params={"position": position}))

grid = harness.paper_grid("lexrank", frame_hop=[[0.5, 0.5]], vocab_sizes=[25, 50],
                          sentence_sizes=[5], weightings=["binary", "damptf"])
rows = harness.run_experiment(manifest, grid, k_folds=5, seed=0, cache_dir=f"{workdir}/cache")

print(harness.report(rows, baselines))
harness.write_results_csv(rows, f"{workdir}/results.csv")
