"""End-to-end experiment driver.

Songs listed in a manifest are summarized under every combination of a
parameter grid, the summaries are turned into 32-dimensional feature
vectors and scored with stratified k-fold cross-validation.
"""

from __future__ import annotations

import csv
import hashlib
import itertools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .audio_io import AudioClip, TimeInterval, extract_section, load_wav, save_wav
from .genreclf import cross_validate, song_features
from .lexicon import WEIGHTINGS, assign_words, kmeans, segment_sentences, weigh
from .spectral import FrameSpec, mfcc
from .summarize import (
    ALGORITHMS,
    LexRankConfig,
    SummarySelection,
    assemble,
    assemble_avgsim,
    avg_similarity_pick,
    frame_similarity_matrix,
    frames_for_duration,
    lexrank_scores,
    lexrank_select,
    lsa_scores,
    lsa_select,
    mmr_select,
)

log = logging.getLogger(__name__)

POSITIVE_LABELS = {"fado", "pos", "+1", "1"}
NEGATIVE_LABELS = {"nonfado", "neg", "-1"}
MAX_FAILED_FRACTION = 0.05

DEFAULT_PARAMS = {
    "frame_s": 0.5,
    "hop_s": 0.5,
    "n_mfcc": 12,
    "vocab": 50,
    "sentence": 5,
    "weighting": "raw",
    "lambda": 0.7,
    "target_s": 30.0,
}
GENERIC_KEYS = ("frame_s", "hop_s", "n_mfcc", "vocab", "sentence", "weighting", "target_s")
PARAM_KEYS = {
    "avgsim": ("frame_s", "hop_s", "n_mfcc", "target_s"),
    "mmr": GENERIC_KEYS + ("lambda",),
    "lexrank": GENERIC_KEYS,
    "lsa": GENERIC_KEYS,
}


class PipelineError(RuntimeError):
    def __init__(self, stage: str, exc: Exception):
        super().__init__(f"{stage}: {exc}")
        self.stage = stage


# -- manifests ------------------------------------------------------------

@dataclass
class DatasetManifest:
    entries: list
    name: str = "dataset"

    def __post_init__(self):
        paths = [p for p, _ in self.entries]
        if len(set(paths)) != len(paths):
            raise ValueError("manifest paths must be unique")

    @property
    def labels(self) -> np.ndarray:
        return np.array([label_value(lab) for _, lab in self.entries])

    def __len__(self):
        return len(self.entries)


def label_value(label: str) -> int:
    key = str(label).strip().lower()
    if key in POSITIVE_LABELS:
        return 1
    if key in NEGATIVE_LABELS:
        return -1
    raise ValueError(f"unknown label {label!r}; use fado/nonfado or pos/neg")


def load_manifest(path) -> DatasetManifest:
    """Two-column CSV `path,label`; relative paths resolve against the CSV's folder."""
    path = Path(path)
    entries = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].startswith("#") or row[0].strip().lower() == "path":
                continue
            p = Path(row[0].strip())
            if not p.is_absolute():
                p = path.parent / p
            label = row[1].strip()
            label_value(label)
            entries.append((str(p), label))
    return DatasetManifest(entries, path.stem)


def write_manifest(manifest: DatasetManifest, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["path", "label"])
        writer.writerows(manifest.entries)


# -- grids ----------------------------------------------------------------

@dataclass
class GridConfig:
    algorithm: str
    frame_hop: list = field(default_factory=lambda: [[0.5, 0.5], [0.5, 0.25]])
    mfcc_dims: list = field(default_factory=lambda: [12])
    vocab_sizes: list = field(default_factory=list)
    sentence_sizes: list = field(default_factory=list)
    weightings: list = field(default_factory=list)
    lambdas: list = field(default_factory=list)
    target_s: float = 30.0
    seed: int = 0
    C: float = 1.0

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        for frame_s, hop_s in self.frame_hop:
            FrameSpec(frame_s, hop_s)
        generic = self.algorithm != "avgsim"
        if not generic and (self.vocab_sizes or self.sentence_sizes or self.weightings):
            raise ValueError("avgsim grids take only frame/hop pairs and MFCC sizes")
        if generic and not (self.vocab_sizes and self.sentence_sizes and self.weightings):
            raise ValueError(f"{self.algorithm} grids need vocab sizes, sentence sizes and weightings")
        if (self.algorithm == "mmr") != bool(self.lambdas):
            raise ValueError("lambdas are required for mmr and meaningless otherwise")
        bad = set(self.weightings) - set(WEIGHTINGS)
        if bad:
            raise ValueError(f"unknown weightings {sorted(bad)}")

    def combinations(self) -> list[dict]:
        """Parameter records in lexicographic order of
        (frame/hop, MFCC size, vocab, sentence, weighting, lambda)."""
        axes = [self.frame_hop, self.mfcc_dims]
        if self.algorithm != "avgsim":
            axes += [self.vocab_sizes, self.sentence_sizes, self.weightings]
        if self.algorithm == "mmr":
            axes.append(self.lambdas)
        out = []
        for combo in itertools.product(*axes):
            (frame_s, hop_s), n_mfcc, *rest = combo
            rec = {"frame_s": float(frame_s), "hop_s": float(hop_s), "n_mfcc": int(n_mfcc)}
            if rest:
                rec.update(vocab=int(rest[0]), sentence=int(rest[1]), weighting=rest[2])
            if len(rest) == 4:
                rec["lambda"] = float(rest[3])
            rec["target_s"] = float(self.target_s)
            out.append(rec)
        return out

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2)

    @classmethod
    def from_json(cls, text: str) -> "GridConfig":
        return cls(**json.loads(text))


def paper_grid(algorithm: str, **overrides) -> GridConfig:
    """The parameter grids of the original experiments."""
    if algorithm == "avgsim":
        frame_hop = [[f, h] for f in (0.25, 0.5, 1.0) for h in (f, f / 2)]
        cfg = dict(frame_hop=frame_hop, mfcc_dims=[12, 24])
    else:
        cfg = dict(frame_hop=[[0.5, 0.5], [0.5, 0.25]], mfcc_dims=[12],
                   vocab_sizes=[25, 50, 100], sentence_sizes=[5, 10, 20],
                   weightings=["raw", "binary", "tfidf", "damptf"])
        if algorithm == "mmr":
            cfg["lambdas"] = [0.3, 0.5, 0.7]
        if algorithm == "lsa":
            cfg["weightings"] = ["raw", "binary"]
    cfg.update(overrides)
    return GridConfig(algorithm, **cfg)


# -- summarization pipeline -----------------------------------------------

def resolve_params(algorithm: str, params: dict | None) -> dict:
    if algorithm not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
    merged = {**DEFAULT_PARAMS, **(params or {})}
    return {k: merged[k] for k in PARAM_KEYS[algorithm]}


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except Exception as exc:
        raise PipelineError(name, exc) from exc


def summarize_clip(clip: AudioClip, algorithm: str, params: dict | None = None, seed: int = 0,
                   lexrank: LexRankConfig = LexRankConfig()):
    """Run one summarizer over a clip; returns (SummarySelection, AudioClip)."""
    p = resolve_params(algorithm, params)
    spec = FrameSpec(p["frame_s"], p["hop_s"])
    target = p["target_s"]
    feats = _stage("mfcc", mfcc, clip, spec, p["n_mfcc"])
    record = {**p, "seed": seed}

    if algorithm == "avgsim":
        n = feats.n_frames
        frame_n, hop_n = spec.in_samples(clip.sample_rate)
        L = frames_for_duration(round(target * clip.sample_rate), frame_n, hop_n)
        if L >= n:
            start, L = 0, n
        else:
            S = _stage("similarity", frame_similarity_matrix, feats)
            start = _stage("avgsim", avg_similarity_pick, S, L)
        return _stage("assemble", assemble_avgsim, start, L, feats, clip, target, record)

    vocab = _stage("kmeans", kmeans, feats, p["vocab"], seed)
    words = _stage("words", assign_words, feats, vocab)
    sentences = _stage("sentences", segment_sentences, words, p["sentence"])
    M = _stage("weigh", weigh, sentences, vocab.k, p["weighting"])
    n = len(sentences)
    if algorithm == "mmr":
        ranking = _stage("mmr", mmr_select, M, p["lambda"], n)
    elif algorithm == "lexrank":
        ranking = _stage("lexrank", lambda: lexrank_select(lexrank_scores(M, lexrank), n))
    else:
        ranking = _stage("lsa", lambda: lsa_select(lsa_scores(M), n))
    return _stage("assemble", assemble, ranking, sentences, clip, target, algorithm, record)


def cache_key(path, algorithm: str, params: dict, seed: int) -> str:
    h = hashlib.sha256(Path(path).read_bytes())
    h.update(json.dumps([algorithm, params, seed], sort_keys=True).encode())
    return h.hexdigest()[:32]


def summarize_song(path, algorithm: str, params: dict | None = None, seed: int = 0,
                   cache_dir=None):
    """Load a WAV file and summarize it, optionally through an on-disk cache."""
    p = resolve_params(algorithm, params)
    if cache_dir is not None:
        cache_dir = Path(cache_dir)
        key = cache_key(path, algorithm, p, seed)
        wav, meta = cache_dir / f"{key}.wav", cache_dir / f"{key}.json"
        if wav.exists() and meta.exists():
            d = json.loads(meta.read_text())
            sel = SummarySelection(d["algorithm"], tuple(d["selected"]),
                                   tuple(TimeInterval(*iv) for iv in d["intervals"]),
                                   d["params"], d["target_s"], d["achieved_s"], d["shortfall"])
            return sel, load_wav(wav)
    clip = _stage("load", load_wav, path)
    sel, audio = summarize_clip(clip, algorithm, p, seed)
    if cache_dir is not None:
        cache_dir.mkdir(parents=True, exist_ok=True)
        save_wav(audio, wav)
        meta.write_text(sel.to_json())
    return sel, audio


# -- baselines & experiments ----------------------------------------------

def make_baselines(manifest: DatasetManifest, position: str, duration_s: float = 30.0,
                   out_dir=None):
    """Cut a begin/middle/end section from every song.

    Returns (clips, labels, skipped) where clips[i] is the AudioClip of
    manifest entry kept i. When `out_dir` is given, sections are written
    there together with a derived manifest.csv.
    """
    clips, labels, kept = [], [], []
    skipped = 0
    for path, label in manifest.entries:
        clip = load_wav(path)
        if clip.duration + 0.5 / clip.sample_rate < duration_s:
            skipped += 1
            continue
        section = extract_section(clip, position, duration_s)
        clips.append(section)
        labels.append(label_value(label))
        if out_dir is not None:
            out = Path(out_dir)
            out.mkdir(parents=True, exist_ok=True)
            dest = out / f"{Path(path).stem}_{position}.wav"
            save_wav(section, dest)
            kept.append((dest.name, label))
    if skipped:
        log.warning("%d song(s) shorter than %.1f s skipped", skipped, duration_s)
    if out_dir is not None:
        write_manifest(DatasetManifest(kept, f"{manifest.name}_{position}"),
                       Path(out_dir) / "manifest.csv")
    return clips, np.array(labels), skipped


@dataclass
class ResultRow:
    algorithm: str
    params: dict
    mean_accuracy: float
    fold_accuracies: tuple
    n_songs: int = 0
    n_failed: int = 0
    valid: bool = True


def evaluate_features(X, y, algorithm: str, params: dict, k_folds: int, seed: int,
                      C: float = 1.0, n_failed: int = 0) -> ResultRow:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    total = y.size + n_failed
    valid = total > 0 and n_failed <= MAX_FAILED_FRACTION * total
    if y.size < k_folds or np.unique(y).size < 2:
        return ResultRow(algorithm, params, float("nan"), (), total, n_failed, False)
    rep = cross_validate(X, y, k_folds, seed, C)
    return ResultRow(algorithm, params, rep.mean_accuracy, rep.fold_accuracies, total, n_failed, valid)


def evaluate_clips(clips: Sequence[AudioClip], labels, k_folds: int = 5, seed: int = 0, C: float = 1.0,
                   algorithm: str = "baseline", params: dict | None = None) -> ResultRow:
    X = np.array([song_features(c) for c in clips])
    return evaluate_features(X, labels, algorithm, dict(params or {}), k_folds, seed, C)


def _song_vector(args):
    path, algorithm, params, seed, cache_dir = args
    try:
        _, audio = summarize_song(path, algorithm, params, seed, cache_dir)
        return _stage("features", song_features, audio), None
    except Exception as exc:  # a bad song degrades the row instead of aborting the grid
        return None, f"{path}: {exc}"


def run_experiment(manifest: DatasetManifest, grid: GridConfig, k_folds: int = 5, seed: int | None = None,
                   cache_dir=None, workers: int = 1) -> list[ResultRow]:
    seed = grid.seed if seed is None else seed
    labels = manifest.labels
    rows = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for params in grid.combinations():
            jobs = [(path, grid.algorithm, params, seed, cache_dir) for path, _ in manifest.entries]
            results = list(pool.map(_song_vector, jobs) if pool else map(_song_vector, jobs))
            ok = [i for i, (vec, _) in enumerate(results) if vec is not None]
            for _, err in results:
                if err:
                    log.warning("%s %s", grid.algorithm, err)
            X = np.array([results[i][0] for i in ok]).reshape(len(ok), -1)
            rows.append(evaluate_features(X, labels[ok], grid.algorithm, params, k_folds, seed,
                                          grid.C, n_failed=len(results) - len(ok)))
    finally:
        if pool:
            pool.shutdown()
    return rows


# -- results I/O and reporting --------------------------------------------

CSV_PARAMS = ("position", "frame_s", "hop_s", "n_mfcc", "vocab", "sentence", "weighting",
              "lambda", "target_s", "duration_s")
CSV_FIELDS = ("algorithm",) + CSV_PARAMS + ("mean_accuracy", "fold_accuracies", "n_songs",
                                            "n_failed", "valid")
_INT_PARAMS = {"n_mfcc", "vocab", "sentence"}
_STR_PARAMS = {"position", "weighting"}


def write_results_csv(rows: Iterable[ResultRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, CSV_FIELDS)
        writer.writeheader()
        for r in rows:
            rec = {k: r.params.get(k, "") for k in CSV_PARAMS}
            rec.update(
                algorithm=r.algorithm,
                mean_accuracy=repr(float(r.mean_accuracy)),
                fold_accuracies=";".join(repr(float(a)) for a in r.fold_accuracies),
                n_songs=r.n_songs,
                n_failed=r.n_failed,
                valid=int(r.valid),
            )
            writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in rec.items()})


def read_results_csv(path) -> list[ResultRow]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.DictReader(fh):
            params = {}
            for k in CSV_PARAMS:
                v = rec.get(k, "")
                if v == "":
                    continue
                params[k] = v if k in _STR_PARAMS else int(v) if k in _INT_PARAMS else float(v)
            folds = tuple(float(a) for a in rec["fold_accuracies"].split(";") if a)
            rows.append(ResultRow(rec["algorithm"], params, float(rec["mean_accuracy"]), folds,
                                  int(rec["n_songs"]), int(rec["n_failed"]), bool(int(rec["valid"]))))
    return rows


def _cell(value, fmt="{}"):
    return "-" if value is None or value == "" else fmt.format(value)


def report(rows: Sequence[ResultRow], baselines: Sequence[ResultRow] = ()) -> str:
    """Plain-text table in the layout Frame/Hop/Vocab/Sentence/Weighting/lambda/Accuracy.

    Each summary row is annotated with its difference to the best baseline.
    """
    if not rows:
        raise ValueError("nothing to report")
    best = max((b.mean_accuracy for b in baselines if not math.isnan(b.mean_accuracy)), default=None)
    header = ["Algorithm", "Frame Size", "Hop Size", "Vocab Size", "Sentence Size",
              "Weighting", "λ", "Accuracy", "Δ best baseline"]
    lines = []
    for r in rows:
        p = r.params
        acc = "n/a" if math.isnan(r.mean_accuracy) else f"{100 * r.mean_accuracy:.1f}%"
        delta = "-" if best is None or math.isnan(r.mean_accuracy) else f"{100 * (r.mean_accuracy - best):+.1f}"
        name = r.algorithm + ("" if r.valid else " (invalid)")
        lines.append([name, _cell(p.get("frame_s")), _cell(p.get("hop_s")), _cell(p.get("vocab")),
                      _cell(p.get("sentence")), _cell(p.get("weighting")), _cell(p.get("lambda")),
                      acc, delta])
    for b in baselines:
        acc = "n/a" if math.isnan(b.mean_accuracy) else f"{100 * b.mean_accuracy:.1f}%"
        pos = b.params.get("position", "")
        lines.append([f"baseline {pos}".strip(), "-", "-", "-", "-", "-", "-", acc, ""])
    widths = [max(len(str(c)) for c in col) for col in zip(header, *lines)]
    fmt = lambda cells: " | ".join(str(c).ljust(w) for c, w in zip(cells, widths))
    sep = "-+-".join("-" * w for w in widths)
    return "\n".join([fmt(header), sep] + [fmt(l) for l in lines])
