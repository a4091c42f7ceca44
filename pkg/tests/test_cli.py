"""Command-line interface: artifacts, defaults, parity and exit codes."""

import csv
import json

import numpy as np
import pytest

from nlconfirm.cli import main
from nlconfirm.corpus import parse_manifest
from nlconfirm.learn import load_model

FAST_SVM = ["--svm-c", "1", "--svm-eps", "0.1", "--svm-gamma", "0.05"]


def run(*argv) -> int:
    return main([str(a) for a in argv])


@pytest.fixture(scope="module")
def corpus_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli_corpus")
    code = run("synth-corpus", "--out", out, "--speakers", 3,
               "--segments-per-speaker", 6, "--confirmation-rate", 0.34, "--seed", 5)
    assert code == 0
    return out


@pytest.fixture(scope="module")
def model_dir(tmp_path_factory, corpus_dir):
    out = tmp_path_factory.mktemp("cli_model")
    code = run("train", "--manifest", corpus_dir / "manifest.csv",
               "--features", "stacked_formants", "--out", out, "--seed", 1)
    assert code == 0
    return out


def test_synth_corpus_artifacts(corpus_dir):
    assert (corpus_dir / "manifest.csv").exists()
    assert (corpus_dir / "meta.json").exists()
    assert (corpus_dir / "run_metadata.json").exists()
    assert len(parse_manifest(corpus_dir / "manifest.csv")) == 18


def test_extract_writes_matrices(corpus_dir, tmp_path):
    out = tmp_path / "feats"
    assert run("extract", "--manifest", corpus_dir / "manifest.csv",
               "--features", "mfcc", "--out", out) == 0
    sidecar = json.loads((out / "features.json").read_text())
    assert sidecar["config"]["kind"] == "mfcc"
    assert sidecar["config"]["raw_dimension"] == 13
    first = sidecar["segments"][0]
    with (out / first["file"]).open() as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == [f"f{i}" for i in range(13)]
    assert len(rows) - 1 == first["rows"]


def test_train_records_shipped_defaults(model_dir):
    bundle = load_model(model_dir / "model.nlcm")
    assert bundle.feature_config.kind.value == "stacked_formants"
    assert bundle.hyperparams.C == 1.0
    assert bundle.hyperparams.eps == 0.5
    assert bundle.hyperparams.gamma == 0.05
    assert (model_dir / "model.nlcm.json").exists()


def test_grid_search_scores_sixteen_points(corpus_dir, tmp_path):
    out = tmp_path / "grid"
    assert run("grid-search", "--manifest", corpus_dir / "manifest.csv",
               "--features", "formant_sd", "--out", out, "--seed", 2) == 0
    table = json.loads((out / "grid_formant_sd.json").read_text())
    assert len(table["points"]) == 16
    combos = {(p["params"]["C"], p["params"]["eps"], p["params"]["gamma"])
              for p in table["points"]}
    assert len(combos) == 16
    assert table["best"]["C"] in (1.0, 5.0)


def test_evaluate_writes_reports(corpus_dir, tmp_path):
    out = tmp_path / "eval"
    code = run("evaluate", "--manifest", corpus_dir / "manifest.csv",
               "--features", "stacked_formants", "--train-fraction", 0.6,
               "--seed", 3, "--out", out, *FAST_SVM)
    assert code == 0
    report = json.loads((out / "eval_stacked_formants.json").read_text())
    assert report["raw_dimension"] == 30
    assert 0.0 <= report["roc_auc"] <= 1.0
    roc_rows = (out / "roc_stacked_formants.csv").read_text().strip().splitlines()
    assert roc_rows[0] == "fpr,tpr"
    assert roc_rows[1] == "0,0"
    assert roc_rows[-1] == "1,1"


def test_classify_then_listen_parity(corpus_dir, model_dir, tmp_path):
    classify_out = tmp_path / "cls"
    assert run("classify", "--manifest", corpus_dir / "manifest.csv",
               "--model", model_dir / "model.nlcm", "--out", classify_out) == 0
    with (classify_out / "segment_decisions.csv").open() as fh:
        decisions = {row["segment_id"]: row for row in csv.DictReader(fh)}
    assert decisions

    listen_out = tmp_path / "lst"
    wav = corpus_dir / "wavs" / "spk00.wav"
    assert run("listen", "--wav", wav, "--model", model_dir / "model.nlcm",
               "--manifest", corpus_dir / "manifest.csv", "--out", listen_out) == 0
    triggered = set()
    with (listen_out / "triggers.ndjson").open() as fh:
        for line in fh:
            triggered.add(json.loads(line)["segment_id"])
    for segment_id, row in decisions.items():
        if segment_id.startswith("spk00"):
            assert (row["decided_label"] == "confirmation") == (segment_id in triggered)

    meta = json.loads((listen_out / "run_metadata.json").read_text())
    assert meta["real_time_factor"] < 1.0


def test_listen_with_vad(corpus_dir, model_dir, tmp_path):
    out = tmp_path / "vad_listen"
    wav = corpus_dir / "wavs" / "spk01.wav"
    assert run("listen", "--wav", wav, "--model", model_dir / "model.nlcm",
               "--out", out) == 0
    assert (out / "triggers.ndjson").exists()


def test_exit_code_data_error(tmp_path):
    manifest = tmp_path / "bad.csv"
    manifest.write_text("wav_path,speaker_id,start_ms,end_ms,label\nx.wav,s,0,500,yes\n")
    assert run("train", "--manifest", manifest, "--features", "mfcc",
               "--out", tmp_path / "o") == 3


def test_exit_code_config_error(corpus_dir, tmp_path):
    assert run("train", "--manifest", corpus_dir / "manifest.csv",
               "--features", "cepstrum", "--out", tmp_path / "o") == 2


def test_exit_code_missing_file(tmp_path):
    assert run("classify", "--manifest", tmp_path / "nope.csv",
               "--model", tmp_path / "nope.nlcm", "--out", tmp_path / "o") == 3


def test_config_file_defaults_and_override(corpus_dir, tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("features = mfcc\nseed = 9  # comment\n")
    out = tmp_path / "feats"
    assert run("extract", "--manifest", corpus_dir / "manifest.csv",
               "--features", "pitch", "--config", config, "--out", out) == 0
    sidecar = json.loads((out / "features.json").read_text())
    assert sidecar["config"]["kind"] == "pitch"  # flag wins over file
    meta = json.loads((out / "run_metadata.json").read_text())
    assert meta["config"]["seed"] == 9  # file fills the unset default


def test_config_file_unknown_key(corpus_dir, tmp_path):
    config = tmp_path / "run.conf"
    config.write_text("armchair = 3\n")
    assert run("extract", "--manifest", corpus_dir / "manifest.csv",
               "--features", "pitch", "--config", config, "--out", tmp_path / "o") == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run("--version")
    assert exc.value.code == 0


def test_evaluate_with_test_manifest_and_segment_roc(corpus_dir, tmp_path):
    out = tmp_path / "eval2"
    code = run("evaluate", "--manifest", corpus_dir / "manifest.csv",
               "--test-manifest", corpus_dir / "manifest.csv",
               "--features", "formant_sd", "--segment-roc",
               "--seed", 4, "--out", out, *FAST_SVM)
    assert code == 0
    report = json.loads((out / "eval_formant_sd.json").read_text())
    assert report["segment_roc_auc"] is not None
    assert 0.0 <= report["segment_roc_auc"] <= 1.0


def test_train_no_normalize_identity_stats(corpus_dir, tmp_path):
    out = tmp_path / "nonorm"
    assert run("train", "--manifest", corpus_dir / "manifest.csv",
               "--features", "formant_sd", "--no-normalize",
               "--out", out, *FAST_SVM) == 0
    bundle = load_model(out / "model.nlcm")
    assert np.array_equal(bundle.normalizer.mean, np.zeros(2))
    assert np.array_equal(bundle.normalizer.std, np.ones(2))
