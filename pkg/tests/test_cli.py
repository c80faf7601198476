import json
import subprocess
import sys

import numpy as np
import pytest

from musum import synthetic
from musum.audio_io import save_wav
from musum.cli import main
from musum.harness import paper_grid, read_results_csv


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    d = tmp_path_factory.mktemp("cli")
    rng = np.random.default_rng(2)
    lines = ["path,label"]
    for i in range(3):
        for label, make in (("pos", synthetic.string_like), ("neg", synthetic.percussive)):
            save_wav(make(8.0, rng), d / f"{label}{i}.wav")
            lines.append(f"{label}{i}.wav,{label}")
    (d / "manifest.csv").write_text("\n".join(lines) + "\n")
    return d


def test_summarize_writes_wav_and_meta(files):
    out, meta = files / "s.wav", files / "s.json"
    rc = main(["summarize", "--in", str(files / "pos0.wav"), "--algo", "mmr", "--vocab", "10",
               "--weighting", "damptf", "--lambda", "0.5", "--target-s", "4", "--seed", "1",
               "--out", str(out), "--meta", str(meta)])
    assert rc == 0
    d = json.loads(meta.read_text())
    assert d["algorithm"] == "mmr" and d["params"]["lambda"] == 0.5 and d["achieved_s"] == 4.0


def test_summarize_bad_input_reports_error(files, capsys):
    (files / "junk.wav").write_bytes(b"junk")
    rc = main(["summarize", "--in", str(files / "junk.wav"), "--algo", "lsa", "--out", str(files / "x.wav")])
    assert rc == 1 and "load" in capsys.readouterr().err


def test_features(files):
    out = files / "f.json"
    assert main(["features", "--in", str(files / "neg1.wav"), "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert len(d["values"]) == 32 and len(d["names"]) == 32


def test_baseline_experiment_report(files, capsys):
    bdir = files / "begin"
    assert main(["baseline", "--manifest", str(files / "manifest.csv"), "--position", "begin",
                 "--duration-s", "5", "--out-dir", str(bdir), "--evaluate-out", str(files / "b.csv"),
                 "--folds", "3"]) == 0
    assert len(list(bdir.glob("*.wav"))) == 6
    assert read_results_csv(files / "b.csv")[0].params["position"] == "begin"

    grid = paper_grid("lsa", frame_hop=[[0.5, 0.5]], vocab_sizes=[10], sentence_sizes=[5],
                      weightings=["binary"], target_s=4.0)
    (files / "grid.json").write_text(grid.to_json())
    assert main(["experiment", "--manifest", str(files / "manifest.csv"), "--grid", str(files / "grid.json"),
                 "--folds", "3", "--seed", "0", "--out", str(files / "r.csv")]) == 0
    assert len(read_results_csv(files / "r.csv")) == 1
    capsys.readouterr()
    assert main(["report", "--results", str(files / "r.csv"), "--baselines", str(files / "b.csv")]) == 0
    out = capsys.readouterr().out
    assert "Vocab Size" in out and "baseline begin" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "musum", "--help"], capture_output=True, text=True)
    assert res.returncode == 0
    for cmd in ("summarize", "baseline", "features", "experiment", "report"):
        assert cmd in res.stdout
