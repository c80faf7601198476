"""Command line entry point: summarize, baseline, features, experiment, report."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import harness
from .audio_io import load_wav, save_wav
from .genreclf import FEATURE_NAMES, song_features
from .lexicon import WEIGHTINGS
from .summarize import ALGORITHMS


def _summarize(args):
    params = {
        "frame_s": args.frame_s,
        "hop_s": args.hop_s,
        "n_mfcc": args.n_mfcc,
        "vocab": args.vocab,
        "sentence": args.sentence,
        "weighting": args.weighting,
        "lambda": args.lam,
        "target_s": args.target_s,
    }
    sel, audio = harness.summarize_song(args.input, args.algo, params, args.seed)
    save_wav(audio, args.out)
    if args.meta:
        Path(args.meta).write_text(sel.to_json() + "\n")
    if sel.shortfall:
        print(f"warning: song shorter than target; summary is {sel.achieved_s:.3f} s", file=sys.stderr)
    return 0


def _baseline(args):
    manifest = harness.load_manifest(args.manifest)
    clips, labels, skipped = harness.make_baselines(manifest, args.position, args.duration_s, args.out_dir)
    print(f"{len(clips)} clip(s) written to {args.out_dir}; {skipped} skipped")
    if args.evaluate_out:
        row = harness.evaluate_clips(clips, labels, args.folds, args.seed, args.C,
                                     params={"position": args.position, "duration_s": args.duration_s})
        existing = harness.read_results_csv(args.evaluate_out) if Path(args.evaluate_out).exists() else []
        existing = [r for r in existing if r.params.get("position") != args.position]
        harness.write_results_csv(existing + [row], args.evaluate_out)
        print(f"baseline {args.position}: {100 * row.mean_accuracy:.1f}%")
    return 0


def _features(args):
    vec = song_features(load_wav(args.input))
    payload = {"source": str(args.input), "names": list(FEATURE_NAMES), "values": [float(v) for v in vec]}
    Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def _experiment(args):
    manifest = harness.load_manifest(args.manifest)
    grid = harness.GridConfig.from_json(Path(args.grid).read_text())
    rows = harness.run_experiment(manifest, grid, args.folds, args.seed, args.cache_dir, args.workers)
    harness.write_results_csv(rows, args.out)
    print(harness.report(rows))
    return 0


def _report(args):
    rows = harness.read_results_csv(args.results)
    baselines = harness.read_results_csv(args.baselines) if args.baselines else []
    print(harness.report(rows, baselines))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="musum", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summarize", help="summarize one WAV file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--algo", choices=ALGORITHMS, required=True)
    p.add_argument("--frame-s", type=float, default=0.5)
    p.add_argument("--hop-s", type=float, default=0.5)
    p.add_argument("--mfcc", dest="n_mfcc", type=int, default=12)
    p.add_argument("--vocab", type=int, default=50)
    p.add_argument("--sentence", type=int, default=5)
    p.add_argument("--weighting", choices=WEIGHTINGS, default="raw")
    p.add_argument("--lambda", dest="lam", type=float, default=0.7)
    p.add_argument("--target-s", type=float, default=30.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--meta")
    p.set_defaults(func=_summarize)

    p = sub.add_parser("baseline", help="cut begin/middle/end sections of every song")
    p.add_argument("--manifest", required=True)
    p.add_argument("--position", choices=("begin", "middle", "end"), required=True)
    p.add_argument("--duration-s", type=float, default=30.0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--evaluate-out", help="also cross-validate the sections and record the row in this CSV")
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--C", type=float, default=1.0)
    p.set_defaults(func=_baseline)

    p = sub.add_parser("features", help="32-dimensional classifier features of a WAV file")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_features)

    p = sub.add_parser("experiment", help="summarize + classify over a parameter grid")
    p.add_argument("--manifest", required=True)
    p.add_argument("--grid", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True)
    p.add_argument("--cache-dir")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=_experiment)

    p = sub.add_parser("report", help="format a results table")
    p.add_argument("--results", required=True)
    p.add_argument("--baselines")
    p.set_defaults(func=_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, OSError, harness.PipelineError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
