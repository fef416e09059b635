"""Command-line entry point wiring all toolkit stages.

Subcommands: mix, train-vad, train-clf, candidates, detect, evaluate,
pr-curve, confusion, ablate, serve, features. Every run is deterministic
under --seed and writes a resolved-config JSON next to its primary output.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .audio import AudioError, load_wav
from .candidates import export_candidate_clips, generate_candidates, load_candidate_manifest
from .classifier import (
    FeatureSource,
    LabelSet,
    confusion_counts,
    load_classifier,
    load_training_records,
    save_classifier,
    train_event_classifier,
    train_frame_classifier,
)
from .config import ConfigError, load_config
from .evaluation import confusion_matrix, event_metrics, pr_curve, report_to_json, segment_metrics
from .features import FeatureError, FrameSeries, MelConfig, load_feature_file, log_mel, save_feature_file
from .nnet import TrainConfig, TrainingError, load_model, save_model
from .pipeline import candidate_time, detect_avc, detect_vc, load_events_csv, write_events_csv
from .synth import (
    SnrRanges,
    SourceSet,
    SynthError,
    generate_corpus,
    generate_detection_corpus,
    make_classifier_corpus,
    make_noise_pool,
    make_speech_pool,
)
from .transcripts import TranscriptError, parse_transcript
from .vad import activations_to_intervals, frame_precision_recall, train_vad, vad_infer

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


def _write_resolved_config(out_path, subcommand: str, resolved: dict) -> None:
    """Drop <output>.config.json next to the run's primary output."""
    path = Path(str(out_path) + ".config.json")
    doc = {"subcommand": subcommand, "config": {k: resolved[k] for k in sorted(resolved)}, "version": __version__}
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _wav_paths(directory) -> tuple[str, ...]:
    paths = sorted(str(p) for p in Path(directory).glob("*.wav"))
    if not paths:
        raise SynthError(f"no WAV files in {directory}")
    return tuple(paths)


# --- subcommand implementations ----------------------------------------------

def cmd_mix(args, cfg) -> int:
    out = Path(args.out)
    seed = args.seed
    if args.auto_sources:
        src = out / "sources"
        train_sources = SourceSet(
            speech=tuple(make_speech_pool(src / "train_speech", args.auto_pool, seed)),
            noise=tuple(make_noise_pool(src / "train_noise", max(4, args.auto_pool // 4), seed)),
        )
        test_sources = SourceSet(
            speech=tuple(make_speech_pool(src / "test_speech", max(2, args.auto_pool // 4), seed + 1)),
            noise=tuple(make_noise_pool(src / "test_noise", max(2, args.auto_pool // 8), seed + 1)),
        )
    else:
        if not (args.train_speech and args.train_noise and args.test_speech and args.test_noise):
            print("mix: supply --auto-sources or all four source directories", file=sys.stderr)
            return EXIT_USAGE
        train_sources = SourceSet(
            speech=_wav_paths(args.train_speech),
            noise=_wav_paths(args.train_noise),
            music=_wav_paths(args.train_music) if args.train_music else (),
        )
        test_sources = SourceSet(
            speech=_wav_paths(args.test_speech),
            noise=_wav_paths(args.test_noise),
            music=_wav_paths(args.test_music) if args.test_music else (),
        )
    manifest = generate_corpus(
        out,
        n_train=args.n_train,
        n_test=args.n_test,
        train_sources=train_sources,
        test_sources=test_sources,
        snr=SnrRanges(),
        seed=seed,
        jobs=args.jobs,
    )
    _write_resolved_config(
        manifest,
        "mix",
        {"n_train": args.n_train, "n_test": args.n_test, "seed": seed, "auto_sources": args.auto_sources},
    )
    print(f"wrote {manifest}")
    return EXIT_OK


def cmd_synth_detection(args, cfg) -> int:
    corpus = generate_detection_corpus(args.out, n_episodes=args.episodes, seed=args.seed)
    _write_resolved_config(corpus, "synth-detection", {"episodes": args.episodes, "seed": args.seed})
    print(f"wrote {corpus}")
    return EXIT_OK


def cmd_synth_candidates(args, cfg) -> int:
    manifest = make_classifier_corpus(args.out, n_per_class=args.per_class, seed=args.seed)
    _write_resolved_config(manifest, "synth-candidates", {"per_class": args.per_class, "seed": args.seed})
    print(f"wrote {manifest}")
    return EXIT_OK


def cmd_train_vad(args, cfg) -> int:
    tc = TrainConfig(
        lr=args.lr,
        batch_size=args.batch_size,
        epochs=args.epochs,
        loss="binary_cross_entropy",
        seed=args.seed,
        early_stop_patience=args.patience,
    )
    summary = train_vad(args.manifest, tc)
    save_model(summary.model, args.out, meta={"kind": "vad", "n_mels": 64})
    curve_path = Path(str(args.out) + ".losses.json")
    with open(curve_path, "w", encoding="utf-8") as fh:
        json.dump(
            {"train": summary.train_losses, "val": summary.val_losses, "examples": summary.n_examples},
            fh,
            indent=2,
            sort_keys=True,
        )
        fh.write("\n")
    _write_resolved_config(
        args.out,
        "train-vad",
        {"manifest": str(args.manifest), "lr": args.lr, "batch_size": args.batch_size, "epochs": args.epochs, "seed": args.seed},
    )
    if args.report_test:
        p, r = frame_precision_recall(summary.model, args.manifest, split="test")
        print(f"test frame precision={p:.4f} recall={r:.4f}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_train_clf(args, cfg) -> int:
    records = load_training_records(args.manifest)
    label_set = LabelSet.from_name(args.label_set)
    source = FeatureSource(kind=args.features, feature_dir=args.feature_dir)
    tc = TrainConfig(lr=args.lr, batch_size=args.batch_size, epochs=args.epochs, seed=args.seed)
    if args.variant == "event":
        clf = train_event_classifier(records, label_set, tc, source)
    else:
        clf = train_frame_classifier(records, label_set, tc, source)
    save_classifier(clf, args.out)
    _write_resolved_config(
        args.out,
        "train-clf",
        {
            "manifest": str(args.manifest),
            "variant": args.variant,
            "label_set": args.label_set,
            "features": args.features,
            "lr": args.lr,
            "batch_size": args.batch_size,
            "epochs": args.epochs,
            "seed": args.seed,
        },
    )
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_candidates(args, cfg) -> int:
    clip = load_wav(args.audio)
    transcript = parse_transcript(args.transcript, format=args.format)
    vad_model, _ = load_model(args.vad_model)
    feats = log_mel(clip)
    acts = vad_infer(vad_model, feats)
    speech = activations_to_intervals(acts, threshold=args.vad_threshold)
    gaps = generate_candidates(speech, transcript)
    episode = Path(args.audio).stem
    records = export_candidate_clips(clip, episode, gaps, args.out)
    manifest = Path(args.out) / "candidates.csv"
    _write_resolved_config(
        manifest,
        "candidates",
        {"audio": str(args.audio), "transcript": str(args.transcript), "vad_threshold": args.vad_threshold},
    )
    print(f"{len(records)} candidates -> {manifest}")
    return EXIT_OK


def cmd_detect(args, cfg) -> int:
    clip = load_wav(args.audio)
    vad_model, _ = load_model(args.vad_model)
    clf = load_classifier(args.clf_model)
    clf_features = None
    if clf.feature_kind == "external":
        if not args.features_file:
            print("detect: classifier expects external features; pass --features-file", file=sys.stderr)
            return EXIT_USAGE
        clf_features = load_feature_file(args.features_file)
    if args.mode == "avc":
        if not args.transcript:
            print("detect: --mode avc requires --transcript (use --mode vc without one)", file=sys.stderr)
            return EXIT_USAGE
        transcript = parse_transcript(args.transcript, format=args.format)
        result = detect_avc(
            clip,
            transcript,
            vad_model,
            clf,
            vad_threshold=args.vad_threshold,
            clf_threshold=args.clf_threshold,
            clf_features=clf_features,
        )
    else:
        result = detect_vc(
            clip,
            vad_model,
            clf,
            vad_threshold=args.vad_threshold,
            clf_threshold=args.clf_threshold,
            clf_features=clf_features,
        )
    write_events_csv(args.out, result.events)
    if args.likelihoods:
        save_feature_file(args.likelihoods, result.frame_likelihoods)
    _write_resolved_config(
        args.out,
        "detect",
        {
            "mode": args.mode,
            "audio": str(args.audio),
            "transcript": str(args.transcript) if args.transcript else None,
            "vad_threshold": args.vad_threshold,
            "clf_threshold": args.clf_threshold,
            "seed": args.seed,
        },
    )
    print(f"{len(result.events)} events -> {args.out}")
    return EXIT_OK


def cmd_evaluate(args, cfg) -> int:
    ref = load_events_csv(args.ref)
    pred = load_events_csv(args.pred)
    total = args.total_dur
    if total is None:
        ends = [e.end for e in ref + pred]
        total = float(np.ceil(max(ends))) if ends else 1.0
    reports = {
        "event": event_metrics(ref, pred, collar=args.collar),
        "segment": segment_metrics(ref, pred, total_dur=total, segment_len=args.segment_len),
    }
    report_to_json(args.report, reports)
    _write_resolved_config(
        args.report,
        "evaluate",
        {"collar": args.collar, "segment_len": args.segment_len, "total_dur": total},
    )
    for name, rep in reports.items():
        o = rep.overall().as_dict()
        print(f"{name}: P={o['precision']:.4f} R={o['recall']:.4f} F1={o['f1']:.4f}")
    return EXIT_OK


def cmd_pr_curve(args, cfg) -> int:
    ref = load_events_csv(args.ref)
    series = load_feature_file(args.likelihoods)
    thresholds = [float(t) for t in args.thresholds.split(",")]
    points = pr_curve(ref, series.data[:, 0], thresholds)
    doc = {"thresholds": thresholds, "points": [{"threshold": t, "precision": p, "recall": r} for t, p, r in points]}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_resolved_config(args.out, "pr-curve", {"thresholds": thresholds})
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_confusion(args, cfg) -> int:
    clf = load_classifier(args.clf_model)
    records = load_training_records(args.manifest)
    source = FeatureSource(kind=args.features, feature_dir=args.feature_dir)
    refs, preds = confusion_counts(clf, records, source)
    labels, counts, normalized = confusion_matrix(refs, preds, labels=list(clf.label_set.labels))
    doc = {
        "labels": labels,
        "counts": counts.tolist(),
        "row_normalized": [[round(v, 6) for v in row] for row in normalized.tolist()],
    }
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_resolved_config(args.out, "confusion", {"manifest": str(args.manifest)})
    print(f"wrote {args.out}")
    return EXIT_OK


def _load_corpus_rows(corpus_path) -> list[dict]:
    import csv as _csv

    with open(corpus_path, newline="", encoding="utf-8") as fh:
        rows = list(_csv.DictReader(fh))
    if not rows:
        raise SynthError(f"empty corpus {corpus_path}")
    return rows


def ablate_vad_threshold(corpus_rows, vad_model, clf, thresholds, pr_grid=None) -> list[dict]:
    """Sweep the VAD activation threshold across a detection corpus.

    For each threshold: total raw gap time (theorem-monotone in the
    threshold), kept candidate totals after duration filtering, and a
    corpus-level frame PR curve from the pooled likelihood grids.
    """
    from .evaluation import rasterize_reference

    pr_grid = pr_grid or [i / 20.0 for i in range(1, 20)]
    # features and transcripts do not depend on the threshold; load once
    episodes = []
    for row in corpus_rows:
        clip = load_wav(row["audio_path"])
        episodes.append(
            {
                "clip": clip,
                "features": log_mel(clip),
                "transcript": parse_transcript(row["transcript_path"]),
                "ref": load_events_csv(row["ref_path"]),
            }
        )
    report = []
    for thr in thresholds:
        raw_total = 0.0
        kept_total = 0.0
        kept_count = 0
        truths = []
        liks = []
        for ep in episodes:
            raw, kept, count = candidate_time(
                ep["clip"], ep["transcript"], vad_model, thr, features=ep["features"]
            )
            raw_total += raw
            kept_total += kept
            kept_count += count
            result = detect_avc(
                ep["clip"], ep["transcript"], vad_model, clf, vad_threshold=thr, vad_features=ep["features"]
            )
            lik = result.frame_likelihoods.data[:, 0]
            truths.append(rasterize_reference(ep["ref"], len(lik)))
            liks.append(lik)
        truth = np.concatenate(truths)
        lik = np.concatenate(liks)
        points = []
        for t in pr_grid:
            pred = lik >= t
            tp = int(np.sum(pred & truth))
            fp = int(np.sum(pred & ~truth))
            fn = int(np.sum(~pred & truth))
            p = tp / (tp + fp) if tp + fp else 0.0
            r = tp / (tp + fn) if tp + fn else 0.0
            points.append({"threshold": t, "precision": p, "recall": r})
        report.append(
            {
                "vad_threshold": thr,
                "raw_candidate_time_s": raw_total,
                "kept_candidate_time_s": kept_total,
                "kept_candidate_count": kept_count,
                "pr_curve": points,
            }
        )
    return report


def compare_backbones(
    train_records,
    corpus_rows,
    vad_model,
    seed: int = 0,
    epochs: int = 15,
    label_set_name: str = "desk3",
    clip_feature_dir=None,
    episode_feature_dir=None,
    vad_threshold: float = 0.1,
    clf_threshold: float = 0.5,
) -> list[dict]:
    """Train every (variant x feature) classifier with one shared seed and
    score each through both pipelines: 2 x 2 training runs, 8 result rows.

    External features must be precomputed (make_pseudo_embeddings does at
    desk scale what a pretrained encoder does in production).
    """
    label_set = LabelSet.from_name(label_set_name)
    episodes = []
    for row in corpus_rows:
        clip = load_wav(row["audio_path"])
        episodes.append(
            {
                "clip": clip,
                "features": log_mel(clip),
                "transcript": parse_transcript(row["transcript_path"]),
                "ref": load_events_csv(row["ref_path"]),
                "stem": Path(row["audio_path"]).stem,
            }
        )
    results = []
    for feature_kind in ("logmel", "external"):
        source = FeatureSource(kind=feature_kind, feature_dir=clip_feature_dir)
        tc = TrainConfig(lr=1e-3, batch_size=32, epochs=epochs, seed=seed)
        for variant in ("event", "frame"):
            trainer = train_event_classifier if variant == "event" else train_frame_classifier
            clf = trainer(train_records, label_set, tc, source)
            for mode in ("avc", "vc"):
                tp = fp = fn = 0
                for ep in episodes:
                    clf_features = None
                    if feature_kind == "external":
                        clf_features = load_feature_file(Path(episode_feature_dir) / f"{ep['stem']}.feat")
                    if mode == "avc":
                        res = detect_avc(
                            ep["clip"],
                            ep["transcript"],
                            vad_model,
                            clf,
                            vad_threshold=vad_threshold,
                            clf_threshold=clf_threshold,
                            vad_features=ep["features"],
                            clf_features=clf_features,
                        )
                    else:
                        res = detect_vc(
                            ep["clip"],
                            vad_model,
                            clf,
                            vad_threshold=vad_threshold,
                            clf_threshold=clf_threshold,
                            vad_features=ep["features"],
                            clf_features=clf_features,
                        )
                    rep = event_metrics(ep["ref"], _as_filler_events(res.events))
                    overall = rep.overall()
                    tp += overall.tp
                    fp += overall.fp
                    fn += overall.fn
                p = tp / (tp + fp) if tp + fp else 0.0
                r = tp / (tp + fn) if tp + fn else 0.0
                f1 = 2 * p * r / (p + r) if p + r else 0.0
                results.append(
                    {
                        "variant": variant,
                        "features": feature_kind,
                        "pipeline": mode,
                        "precision": p,
                        "recall": r,
                        "f1": f1,
                    }
                )
    return results


def _as_filler_events(events):
    """Fold granular uh/um predictions into the filler class for scoring."""
    from .classifier import Event

    return [
        Event(e.start, e.end, "filler", e.confidence) if e.label in ("uh", "um") else e
        for e in events
    ]


def cmd_ablate(args, cfg) -> int:
    if args.target == "vad-threshold":
        if not args.clf_model:
            print("ablate vad-threshold: --clf-model required", file=sys.stderr)
            return EXIT_USAGE
        return cmd_ablate_vad_threshold(args, cfg)
    rows = _load_corpus_rows(args.corpus)
    vad_model, _ = load_model(args.vad_model)
    if not args.train_manifest:
        print("ablate backbones: --train-manifest required", file=sys.stderr)
        return EXIT_USAGE
    records = load_training_records(args.train_manifest)
    clip_feature_dir = args.feature_dir
    episode_feature_dir = args.episode_feature_dir
    if not clip_feature_dir or not episode_feature_dir:
        print("ablate backbones: --feature-dir and --episode-feature-dir required", file=sys.stderr)
        return EXIT_USAGE
    results = compare_backbones(
        records,
        rows,
        vad_model,
        seed=args.seed,
        epochs=args.epochs,
        label_set_name=args.label_set,
        clip_feature_dir=clip_feature_dir,
        episode_feature_dir=episode_feature_dir,
    )
    doc = {"rows": results, "seed": args.seed}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_resolved_config(args.out, "ablate", {"target": "backbones", "seed": args.seed})
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_ablate_vad_threshold(args, cfg) -> int:
    rows = _load_corpus_rows(args.corpus)
    vad_model, _ = load_model(args.vad_model)
    clf = load_classifier(args.clf_model)
    thresholds = [float(t) for t in args.thresholds.split(",")]
    report = ablate_vad_threshold(rows, vad_model, clf, thresholds)
    doc = {"thresholds": thresholds, "rows": report}
    with open(args.out, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_resolved_config(args.out, "ablate", {"target": "vad-threshold", "thresholds": thresholds})
    print(f"wrote {args.out}")
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.command is None:
        parser.print_help()
        return EXIT_USAGE
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = load_config(args.config)
        except (OSError, ConfigError) as exc:
            print(f"config error: {exc}", file=sys.stderr)
            return EXIT_DATA
    if args.verbose:
        print(f"fillerkit {__version__}: {args.command} {vars(args)}", file=sys.stderr)
    try:
        return args.func(args, cfg)
    except TrainingError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (
        AudioError,
        FeatureError,
        TranscriptError,
        SynthError,
        FileNotFoundError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fillerkit", description=__doc__)
    parser.set_defaults(command=None)
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", help="key = value config file overlaying defaults")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=1, help="file-level parallelism where supported")
        p.add_argument("--verbose", action="store_true")

    p = sub.add_parser("mix", help="generate a VAD mixture corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--n-train", type=int, default=100)
    p.add_argument("--n-test", type=int, default=20)
    p.add_argument("--auto-sources", action="store_true", help="synthesize token/noise source pools")
    p.add_argument("--auto-pool", type=int, default=24, help="speech tracks per auto split")
    p.add_argument("--train-speech")
    p.add_argument("--train-noise")
    p.add_argument("--train-music")
    p.add_argument("--test-speech")
    p.add_argument("--test-noise")
    p.add_argument("--test-music")
    common(p)
    p.set_defaults(func=cmd_mix)

    p = sub.add_parser("synth-detection", help="generate an episode corpus with oracle transcripts")
    p.add_argument("--out", required=True)
    p.add_argument("--episodes", type=int, default=50)
    common(p)
    p.set_defaults(func=cmd_synth_detection)

    p = sub.add_parser("synth-candidates", help="generate a labeled candidate corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--per-class", type=int, default=60)
    common(p)
    p.set_defaults(func=cmd_synth_candidates)

    p = sub.add_parser("train-vad", help="train the VAD on a mixture manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--epochs", type=int, default=12)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--patience", type=int, default=0)
    p.add_argument("--report-test", action="store_true", help="print test-split frame P/R after training")
    common(p)
    p.set_defaults(func=cmd_train_vad)

    p = sub.add_parser("train-clf", help="train a filler classifier on a candidate manifest")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--variant", choices=["event", "frame"], default="event")
    p.add_argument("--label-set", default="coarse5")
    p.add_argument("--features", choices=["logmel", "external"], default="logmel")
    p.add_argument("--feature-dir")
    p.add_argument("--epochs", type=int, default=25)
    p.add_argument("--lr", type=float, default=1e-3)
    p.add_argument("--batch-size", type=int, default=32)
    common(p)
    p.set_defaults(func=cmd_train_clf)

    p = sub.add_parser("candidates", help="generate and export filler candidates")
    p.add_argument("--audio", required=True)
    p.add_argument("--transcript", required=True)
    p.add_argument("--format", choices=["jsonl", "ctm"], default="jsonl")
    p.add_argument("--vad-model", required=True)
    p.add_argument("--vad-threshold", type=float, default=0.1)
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_candidates)

    p = sub.add_parser("detect", help="run a detection pipeline on one recording")
    p.add_argument("--mode", choices=["avc", "vc"], required=True)
    p.add_argument("--audio", required=True)
    p.add_argument("--transcript")
    p.add_argument("--format", choices=["jsonl", "ctm"], default="jsonl")
    p.add_argument("--vad-model", required=True)
    p.add_argument("--clf-model", required=True)
    p.add_argument("--vad-threshold", type=float, default=0.1)
    p.add_argument("--clf-threshold", type=float, default=0.5)
    p.add_argument("--out", required=True)
    p.add_argument("--likelihoods", help="write 10 Hz filler likelihoods as a feature file")
    p.add_argument("--features-file", help="precomputed features for external-feature classifiers")
    common(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("evaluate", help="segment- and event-based metrics")
    p.add_argument("--ref", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--collar", type=float, default=0.2)
    p.add_argument("--segment-len", type=float, default=1.0)
    p.add_argument("--total-dur", type=float)
    p.add_argument("--report", required=True)
    common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("pr-curve", help="frame-level PR curve from likelihoods")
    p.add_argument("--ref", required=True)
    p.add_argument("--likelihoods", required=True)
    p.add_argument("--thresholds", default="0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_pr_curve)

    p = sub.add_parser("confusion", help="confusion matrix over labeled candidates")
    p.add_argument("--manifest", required=True)
    p.add_argument("--clf-model", required=True)
    p.add_argument("--features", choices=["logmel", "external"], default="logmel")
    p.add_argument("--feature-dir")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_confusion)

    p = sub.add_parser("ablate", help="threshold/backbone sweeps")
    p.add_argument("target", choices=["vad-threshold", "backbones"])
    p.add_argument("--corpus", required=True)
    p.add_argument("--vad-model", required=True)
    p.add_argument("--clf-model", help="trained classifier (vad-threshold sweep)")
    p.add_argument("--thresholds", default="0.1,0.3,0.5,0.7,0.9")
    p.add_argument("--train-manifest", help="candidate manifest (backbones sweep)")
    p.add_argument("--label-set", default="desk3")
    p.add_argument("--epochs", type=int, default=15)
    p.add_argument("--feature-dir", help="external features for candidate clips")
    p.add_argument("--episode-feature-dir", help="external features for corpus episodes")
    p.add_argument("--out", required=True)
    common(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("serve", help="serve candidates to annotators over HTTP")
    p.add_argument("--manifest", required=True)
    p.add_argument("--port", type=int, default=8080)
    p.add_argument("--ui-dir")
    p.add_argument("--log", default="labels.jsonl")
    common(p)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("features", help="compute log-mel features for a WAV")
    p.add_argument("--audio", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--n-mels", type=int, default=64)
    common(p)
    p.set_defaults(func=cmd_features)

    return parser


def cmd_serve(args, cfg) -> int:
    from .annotation import AnnotationStore
    from .server import serve_forever

    records = load_candidate_manifest(args.manifest)
    store = AnnotationStore(records, log_path=args.log)
    serve_forever(store, port=args.port, ui_dir=args.ui_dir)
    return EXIT_OK


def cmd_features(args, cfg) -> int:
    clip = load_wav(args.audio)
    series = log_mel(clip, MelConfig(n_mels=args.n_mels))
    save_feature_file(args.out, series)
    _write_resolved_config(args.out, "features", {"audio": str(args.audio), "n_mels": args.n_mels})
    print(f"wrote {args.out} ({series.n_frames} frames x {series.dims})")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
