"""Frame-level voice activity detection at 100 Hz.

The model is a convolutional stack that pools only over frequency, so one
sigmoid activation comes out per 10 ms input frame. Long recordings are
scored in overlapping 1 s windows whose activations are averaged.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .audio import load_wav
from .features import FrameSeries, MelConfig, log_mel
from .intervals import IntervalSet
from .nnet import (
    BatchNorm,
    Conv2d,
    Dense,
    MaxPoolFreq,
    ModelGraph,
    Relu,
    ToTimeMajor,
    TrainConfig,
    sigmoid,
    train,
)
from .synth import load_frame_labels

WINDOW_FRAMES = 100
HOP_FRAMES = 50

SpeechIntervals = IntervalSet


def build_vad_model(n_mels: int = 64, channels=(16, 32, 64), seed: int = 0) -> ModelGraph:
    """Conv blocks (3x3, batch norm, relu, frequency-only 4x pooling) that
    collapse the mel axis to 1, then a per-frame dense sigmoid head.

    Frequency pooling must annihilate the mel axis: with 64 mels the three
    4x pools end at 1.
    """
    rng = np.random.default_rng(seed)
    layers = []
    c_prev = 1
    f = n_mels
    for i, c in enumerate(channels):
        layers += [
            Conv2d(c_prev, c, kernel=(3, 3), stride=(1, 1), use_bias=False, name=f"conv{i}", rng=rng),
            BatchNorm(c, name=f"bn{i}"),
            Relu(name=f"relu{i}"),
            MaxPoolFreq(4, name=f"pool{i}"),
        ]
        c_prev = c
        f //= 4
    if f != 1:
        raise ValueError(f"n_mels {n_mels} does not pool down to 1 (got {f})")
    layers += [ToTimeMajor(name="ttm"), Dense(c_prev, 1, name="head", rng=rng)]
    return ModelGraph(layers)


def vad_infer(model: ModelGraph, features: FrameSeries, batch_windows: int = 64) -> FrameSeries:
    """Per-frame speech probabilities for a 100 Hz, 64-dim feature series.

    Evaluation slides 1 s windows with a 0.5 s hop; overlapping window
    activations are averaged. Series shorter than one window are padded
    symmetrically and cropped back, so N frames in always yield N
    activations out.
    """
    data = features.data
    n = data.shape[0]
    if n < WINDOW_FRAMES:
        pad = WINDOW_FRAMES - n
        data = np.pad(data, ((pad // 2, pad - pad // 2), (0, 0)), mode="symmetric")
    starts = list(range(0, data.shape[0] - WINDOW_FRAMES + 1, HOP_FRAMES))
    if starts[-1] != data.shape[0] - WINDOW_FRAMES:
        starts.append(data.shape[0] - WINDOW_FRAMES)
    sums = np.zeros(data.shape[0])
    counts = np.zeros(data.shape[0])
    for lo in range(0, len(starts), batch_windows):
        chunk = starts[lo : lo + batch_windows]
        batch = np.stack([data[s : s + WINDOW_FRAMES].T[None] for s in chunk])  # (B,1,F,T)
        logits = model.forward(batch, train=False)[:, :, 0]  # (B,T)
        probs = sigmoid(logits)
        for s, p in zip(chunk, probs):
            sums[s : s + WINDOW_FRAMES] += p
            counts[s : s + WINDOW_FRAMES] += 1.0
    acts = sums / counts
    if n < WINDOW_FRAMES:
        off = (WINDOW_FRAMES - n) // 2
        acts = acts[off : off + n]
    return FrameSeries(data=acts[:, None], frame_rate=features.frame_rate, origin_offset=features.origin_offset)


def activations_to_intervals(
    act: FrameSeries,
    threshold: float = 0.1,
    min_gap_s: float = 0.0,
    min_dur_s: float = 0.0,
) -> SpeechIntervals:
    """Threshold activations into speech intervals.

    Frames with activation >= threshold are active; a run i..j becomes
    [i/rate, (j+1)/rate]. Gaps shorter than min_gap_s are merged first,
    then intervals shorter than min_dur_s are dropped.
    """
    if not (0.0 < threshold < 1.0):
        raise ValueError(f"threshold must be in (0,1), got {threshold}")
    rate = act.frame_rate
    active = act.data[:, 0] >= threshold
    intervals: list[tuple[float, float]] = []
    start = None
    for i, flag in enumerate(active):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            intervals.append((start / rate, i / rate))
            start = None
    if start is not None:
        intervals.append((start / rate, len(active) / rate))
    if min_gap_s > 0 and intervals:
        merged = [intervals[0]]
        for s, e in intervals[1:]:
            if s - merged[-1][1] < min_gap_s:
                merged[-1] = (merged[-1][0], e)
            else:
                merged.append((s, e))
        intervals = merged
    if min_dur_s > 0:
        intervals = [(s, e) for s, e in intervals if e - s >= min_dur_s]
    return IntervalSet(tuple(intervals))


# --- training on mixture corpora ---------------------------------------------

@dataclass(frozen=True)
class VadTrainSummary:
    model: ModelGraph
    train_losses: list[float]
    val_losses: list[float]
    n_examples: int


def load_mixture_manifest(manifest_path, split: str | None = None) -> list[dict]:
    rows = []
    with open(manifest_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            if split is None or row["split"] == split:
                rows.append(row)
    return rows


def _windows_from_mixture(wav_path, label_path, mel: MelConfig):
    feats = log_mel(load_wav(wav_path), mel)
    labels = load_frame_labels(label_path).speech.astype(np.float64)
    n = min(feats.n_frames, len(labels))
    xs, ys = [], []
    for s in range(0, n - WINDOW_FRAMES + 1, HOP_FRAMES):
        xs.append(feats.data[s : s + WINDOW_FRAMES].T[None])
        ys.append(labels[s : s + WINDOW_FRAMES])
    if not xs and n >= 1:  # short mixture: single padded window
        pad = WINDOW_FRAMES - n
        x = np.pad(feats.data[:n], ((0, pad), (0, 0)), mode="symmetric")
        y = np.pad(labels[:n], (0, pad), mode="edge")
        xs.append(x.T[None])
        ys.append(y)
    return xs, ys


def vad_dataset_from_manifest(manifest_path, split: str, mel: MelConfig = MelConfig()):
    """Stack fixed 1 s windows and frame targets from a mixture manifest."""
    xs, ys = [], []
    for row in load_mixture_manifest(manifest_path, split):
        x, y = _windows_from_mixture(row["path"], row["label_path"], mel)
        xs += x
        ys += y
    if not xs:
        raise ValueError(f"no {split} examples in {manifest_path}")
    return np.stack(xs), np.stack(ys)


def train_vad(
    manifest_path,
    cfg: TrainConfig = TrainConfig(lr=1e-3, epochs=12, batch_size=32, loss="binary_cross_entropy"),
    mel: MelConfig = MelConfig(),
    val_fraction: float = 0.1,
    model: ModelGraph | None = None,
) -> VadTrainSummary:
    """Train the VAD on a mixture corpus manifest (train split only)."""
    x, y = vad_dataset_from_manifest(manifest_path, "train", mel)
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(x))
    n_val = max(1, int(len(x) * val_fraction)) if val_fraction > 0 else 0
    val_idx, train_idx = order[:n_val], order[n_val:]
    model = model or build_vad_model(n_mels=mel.n_mels, seed=cfg.seed)
    # dense head emits (N,T,1); flatten targets to match
    result = train(
        model,
        (x[train_idx], y[train_idx][:, :, None]),
        cfg,
        val=(x[val_idx], y[val_idx][:, :, None]) if n_val else None,
    )
    return VadTrainSummary(
        model=model,
        train_losses=result.train_losses,
        val_losses=result.val_losses,
        n_examples=len(train_idx),
    )


def frame_precision_recall(model: ModelGraph, manifest_path, split: str = "test", threshold: float = 0.5, mel: MelConfig = MelConfig()) -> tuple[float, float]:
    """Frame-level P/R of thresholded activations against label files."""
    tp = fp = fn = 0
    for row in load_mixture_manifest(manifest_path, split):
        feats = log_mel(load_wav(row["path"]), mel)
        ref = load_frame_labels(row["label_path"]).speech
        acts = vad_infer(model, feats).data[:, 0]
        n = min(len(ref), len(acts))
        pred = acts[:n] >= threshold
        truth = ref[:n]
        tp += int(np.sum(pred & truth))
        fp += int(np.sum(pred & ~truth))
        fn += int(np.sum(~pred & truth))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return precision, recall
