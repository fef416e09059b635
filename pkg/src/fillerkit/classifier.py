"""Filler classification: label sets, temporal-conv backbones, training on
labeled candidate clips, and frame-to-event grouping.

Two model variants share a backbone of temporal convolutions with residual
blocks (about 100k parameters): the event classifier collapses time and
labels a whole 1 s clip, the frame classifier emits 10 labels per second
through an LSTM head.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .audio import load_wav
from .candidates import CandidateClip, load_candidate_manifest
from .features import FrameSeries, MelConfig, load_feature_file, log_mel, spec_augment
from .nnet import (
    AvgPoolTime,
    BatchNorm,
    Conv1dTemporal,
    Dense,
    Lstm,
    ModelGraph,
    Relu,
    ResidualBlock,
    ToTimeMajor,
    TrainConfig,
    load_model,
    save_model,
    softmax,
    train,
)

FILLER_LABELS = ("uh", "um", "you_know", "like", "other")
NON_FILLER_LABELS = (
    "laughter",
    "breath",
    "agreement_sound",
    "regular_words",
    "repetitions",
    "simultaneous_speakers",
    "music",
    "noise",
)
ANNOTATION_LABELS = FILLER_LABELS + NON_FILLER_LABELS

# consolidation used for classifier training: rare labels are dropped,
# uh+um collapse to one filler class (kept apart in the granular set)
_COARSE_MAP = {
    "uh": "filler",
    "um": "filler",
    "regular_words": "words",
    "repetitions": "words",
    "laughter": "laughter",
    "music": "music",
    "breath": "breath",
}
_GRANULAR_MAP = {**_COARSE_MAP, "uh": "uh", "um": "um"}


class LabelSetError(ValueError):
    pass


@dataclass(frozen=True)
class LabelSet:
    """Classification target labels plus the annotation-label consolidation
    that feeds them."""

    name: str
    labels: tuple[str, ...]
    mapping: dict[str, str] = field(default_factory=dict)

    def __post_init__(self):
        if len(set(self.labels)) != len(self.labels):
            raise LabelSetError(f"duplicate labels in {self.name}")
        for src, dst in self.mapping.items():
            if src not in ANNOTATION_LABELS:
                raise LabelSetError(f"mapping source {src!r} not an annotation label")
            if dst not in self.labels:
                raise LabelSetError(f"mapping target {dst!r} not in label set {self.name}")

    def index(self, label: str) -> int:
        return self.labels.index(label)

    @staticmethod
    def coarse5() -> "LabelSet":
        return LabelSet("coarse5", ("filler", "words", "laughter", "music", "breath"), dict(_COARSE_MAP))

    @staticmethod
    def granular6() -> "LabelSet":
        return LabelSet("granular6", ("uh", "um", "words", "laughter", "music", "breath"), dict(_GRANULAR_MAP))

    @staticmethod
    def annotation13() -> "LabelSet":
        return LabelSet("annotation13", ANNOTATION_LABELS, {l: l for l in ANNOTATION_LABELS})

    @staticmethod
    def desk3() -> "LabelSet":
        """Desk-scale set for synthetic corpora, where only filler/word/music
        stand-ins exist."""
        mapping = {
            "uh": "filler",
            "um": "filler",
            "regular_words": "words",
            "repetitions": "words",
            "music": "music",
        }
        return LabelSet("desk3", ("filler", "words", "music"), mapping)

    @staticmethod
    def from_name(name: str) -> "LabelSet":
        factory = {
            "coarse5": LabelSet.coarse5,
            "granular6": LabelSet.granular6,
            "annotation13": LabelSet.annotation13,
            "desk3": LabelSet.desk3,
        }.get(name)
        if factory is None:
            raise LabelSetError(f"unknown label set {name!r}")
        return factory()


def map_labels(annotation_label: str, target: LabelSet) -> str | None:
    """Consolidate an annotation-level label into the target set.

    Returns None when the label is dropped (rare classes the classifier is
    not trained on); raises on labels outside the annotation vocabulary.
    """
    if annotation_label not in ANNOTATION_LABELS:
        raise LabelSetError(f"unknown annotation label {annotation_label!r}")
    return target.mapping.get(annotation_label)


# --- backbone and model variants ---------------------------------------------

CLIP_FRAMES = 100  # 1 s of features at 100 Hz
FRAME_OUT = 10  # classifier frame rate: 10 Hz


def build_backbone(feature_dims: int, rng) -> list:
    layers = [
        Conv1dTemporal(feature_dims, 16, kernel=3, stride=1, use_bias=False, name="stem", rng=rng),
        BatchNorm(16, name="stem_bn"),
        Relu(name="stem_relu"),
        ResidualBlock(16, 24, kernel=9, stride=2, name="block1", rng=rng),
        ResidualBlock(24, 32, kernel=9, stride=2, name="block2", rng=rng),
        ResidualBlock(32, 48, kernel=9, stride=2, name="block3", rng=rng),
    ]
    return layers


def build_event_model(feature_dims: int, n_labels: int, seed: int = 0) -> ModelGraph:
    """Whole-clip classifier: backbone, global average pool, dense logits."""
    rng = np.random.default_rng(seed)
    layers = build_backbone(feature_dims, rng)
    layers += [
        AvgPoolTime(1, name="gap"),
        ToTimeMajor(name="ttm"),
        Dense(48, n_labels, name="head", rng=rng),
    ]
    return ModelGraph(layers)


def build_frame_model(feature_dims: int, n_labels: int, seed: int = 0, lstm_hidden: int = 64) -> ModelGraph:
    """Per-frame classifier: backbone, pool to 10 frames, LSTM, dense logits."""
    rng = np.random.default_rng(seed)
    layers = build_backbone(feature_dims, rng)
    layers += [
        AvgPoolTime(FRAME_OUT, name="pool10"),
        ToTimeMajor(name="ttm"),
        Lstm(48, lstm_hidden, name="lstm", rng=rng),
        Dense(lstm_hidden, n_labels, name="head", rng=rng),
    ]
    return ModelGraph(layers)


@dataclass
class ClassifierModel:
    """A trained variant plus the bookkeeping inference needs."""

    variant: str  # event | frame
    graph: ModelGraph
    label_set: LabelSet
    feature_dims: int
    feature_kind: str = "logmel"  # logmel | external

    def __post_init__(self):
        if self.variant not in ("event", "frame"):
            raise ValueError(f"unknown classifier variant {self.variant!r}")


def save_classifier(model: ClassifierModel, path) -> None:
    save_model(
        model.graph,
        path,
        meta={
            "variant": model.variant,
            "label_set": model.label_set.name,
            "labels": list(model.label_set.labels),
            "mapping": model.label_set.mapping,
            "feature_dims": model.feature_dims,
            "feature_kind": model.feature_kind,
        },
    )


def load_classifier(path) -> ClassifierModel:
    graph, meta = load_model(path)
    label_set = LabelSet(meta["label_set"], tuple(meta["labels"]), dict(meta["mapping"]))
    return ClassifierModel(
        variant=meta["variant"],
        graph=graph,
        label_set=label_set,
        feature_dims=int(meta["feature_dims"]),
        feature_kind=meta.get("feature_kind", "logmel"),
    )


# --- inference ---------------------------------------------------------------

def classify_event(model: ClassifierModel, window: np.ndarray) -> np.ndarray:
    """Posterior vector(s) for 1 s windows.

    window: (frames, dims) or a batch (n, frames, dims) of feature frames.
    """
    if model.variant != "event":
        raise ValueError("classify_event needs an event-variant model")
    batch = window[None] if window.ndim == 2 else window
    x = np.swapaxes(batch, 1, 2)  # (N, dims, T)
    logits = model.graph.forward(x, train=False)[:, 0, :]
    post = softmax(logits)
    return post[0] if window.ndim == 2 else post


def classify_frames(model: ClassifierModel, window: np.ndarray) -> np.ndarray:
    """Per-frame posteriors at 10 Hz: (10, K) for one window, (n, 10, K) batched."""
    if model.variant != "frame":
        raise ValueError("classify_frames needs a frame-variant model")
    batch = window[None] if window.ndim == 2 else window
    x = np.swapaxes(batch, 1, 2)
    logits = model.graph.forward(x, train=False)
    post = softmax(logits)
    return post[0] if window.ndim == 2 else post


@dataclass(frozen=True)
class Event:
    start: float
    end: float
    label: str
    confidence: float = 1.0


def frames_to_events(
    posteriors: np.ndarray,
    origin: float,
    label_set: LabelSet,
    background: str = "words",
    frame_rate: float = 10.0,
    min_event_dur: float = 0.1,
) -> list[Event]:
    """Group contiguous equal-argmax frames into events.

    Frame i spans [origin + i/rate, origin + (i+1)/rate]; an event's
    confidence is the mean posterior of its label over its frames.
    Background-label events are omitted. Events shorter than min_event_dur
    cannot arise at 10 Hz but the guard stays for finer rates.
    """
    if posteriors.ndim != 2 or posteriors.shape[1] != len(label_set.labels):
        raise ValueError(f"posteriors shape {posteriors.shape} does not match {label_set.name}")
    picks = posteriors.argmax(axis=1)
    events: list[Event] = []
    i = 0
    n = len(picks)
    while i < n:
        j = i
        while j + 1 < n and picks[j + 1] == picks[i]:
            j += 1
        label = label_set.labels[picks[i]]
        if label != background:
            dur = (j + 1 - i) / frame_rate
            if dur >= min_event_dur - 1e-9:
                conf = float(posteriors[i : j + 1, picks[i]].mean())
                events.append(Event(origin + i / frame_rate, origin + (j + 1) / frame_rate, label, conf))
        i = j + 1
    return events


def rasterize_events(
    events: list[Event],
    origin: float,
    n_frames: int,
    label_set: LabelSet,
    background: str = "words",
    frame_rate: float = 10.0,
) -> np.ndarray:
    """Frame targets: the label of the event covering each frame center,
    else the background label."""
    if background not in label_set.labels:
        raise LabelSetError(f"background label {background!r} not in {label_set.name}")
    targets = np.full(n_frames, label_set.index(background), dtype=np.int64)
    for ev in events:
        if ev.label not in label_set.labels:
            raise LabelSetError(f"event label {ev.label!r} not in {label_set.name}")
        for i in range(n_frames):
            center = origin + (i + 0.5) / frame_rate
            if ev.start <= center <= ev.end:
                targets[i] = label_set.index(ev.label)
    return targets


# --- training on candidate manifests ------------------------------------------

@dataclass(frozen=True)
class FeatureSource:
    """Where classifier inputs come from: log-mel computed from audio, or
    precomputed embedding files living next to each clip."""

    kind: str = "logmel"
    mel: MelConfig = MelConfig()
    feature_dir: str | None = None

    def dims(self) -> int:
        if self.kind == "logmel":
            return self.mel.n_mels
        raise ValueError("external feature dims are known only per file")

    def series_for_clip(self, clip_path: str) -> FrameSeries:
        if self.kind == "logmel":
            return log_mel(load_wav(clip_path), self.mel)
        feat_path = self._feature_path(clip_path)
        return load_feature_file(feat_path)

    def _feature_path(self, clip_path: str) -> Path:
        stem = Path(clip_path).stem
        base = Path(self.feature_dir) if self.feature_dir else Path(clip_path).parent
        return base / f"{stem}.feat"


def _centered_window(series: FrameSeries, center_s: float) -> np.ndarray:
    """1 s window of frames centered at center_s, edge-padded when the clip
    runs out."""
    rate = series.frame_rate
    start = int(round(center_s * rate)) - CLIP_FRAMES // 2
    lo = max(0, start)
    hi = min(series.n_frames, start + CLIP_FRAMES)
    window = series.data[lo:hi]
    pad_front = lo - start
    pad_back = CLIP_FRAMES - window.shape[0] - pad_front
    if pad_front or pad_back:
        window = np.pad(window, ((pad_front, pad_back), (0, 0)), mode="edge")
    return window


def event_training_set(records: list[CandidateClip], label_set: LabelSet, source: FeatureSource):
    """(x, y) arrays: 1 s windows centered on each candidate highlight."""
    xs, ys = [], []
    for rec in records:
        if rec.status != "resolved" or not rec.label:
            continue
        target = map_labels(rec.label, label_set)
        if target is None:
            continue
        series = source.series_for_clip(rec.clip_path)
        hl = rec.highlight
        window = _centered_window(series, (hl[0] + hl[1]) / 2.0)
        xs.append(np.swapaxes(window, 0, 1))  # (dims, T)
        ys.append(label_set.index(target))
    if not xs:
        raise ValueError("no usable training examples after label mapping")
    return np.stack(xs), np.asarray(ys, dtype=np.int64)


def frame_training_set(
    records: list[CandidateClip],
    label_set: LabelSet,
    source: FeatureSource,
    seed: int = 0,
    background: str = "words",
):
    """(x, y) arrays for the frame variant: 1 s crops where the candidate can
    sit anywhere, with 10 Hz frame targets rasterized from the highlight."""
    rng = np.random.default_rng(seed)
    xs, ys = [], []
    for rec in records:
        if rec.status != "resolved" or not rec.label:
            continue
        target = map_labels(rec.label, label_set)
        if target is None:
            continue
        series = source.series_for_clip(rec.clip_path)
        hl = rec.highlight
        clip_dur = series.n_frames / series.frame_rate
        lo = max(0.0, hl[1] - 1.0)
        hi = min(hl[0], clip_dur - 1.0)
        win_start = float(rng.uniform(lo, hi)) if hi > lo else lo
        rate = series.frame_rate
        s = int(round(win_start * rate))
        s = max(0, min(s, series.n_frames - CLIP_FRAMES))
        window = series.data[s : s + CLIP_FRAMES]
        if window.shape[0] < CLIP_FRAMES:
            window = np.pad(window, ((0, CLIP_FRAMES - window.shape[0]), (0, 0)), mode="edge")
        events = [Event(hl[0], hl[1], target)]
        targets = rasterize_events(events, s / rate, FRAME_OUT, label_set, background=background)
        xs.append(np.swapaxes(window, 0, 1))
        ys.append(targets)
    if not xs:
        raise ValueError("no usable training examples after label mapping")
    return np.stack(xs), np.stack(ys)


def _check_class_coverage(y: np.ndarray, label_set: LabelSet) -> None:
    present = set(np.unique(y).tolist())
    missing = [l for i, l in enumerate(label_set.labels) if i not in present]
    if missing:
        raise ValueError(f"no training examples for classes: {missing}")


def _spec_augment_batch(xb: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Training-time SpecAugment on (N, dims, T) batches."""
    out = xb.copy()
    for i in range(len(out)):
        feats = FrameSeries(data=out[i].T.copy(), frame_rate=100.0)
        masked = spec_augment(
            feats,
            time_masks=2,
            freq_masks=2,
            max_t=20,
            max_f=min(8, feats.dims),
            rng_seed=int(rng.integers(0, 2**31 - 1)),
        )
        out[i] = masked.data.T
    return out


def train_event_classifier(
    records: list[CandidateClip],
    label_set: LabelSet,
    cfg: TrainConfig = TrainConfig(lr=1e-3, epochs=25, batch_size=32),
    source: FeatureSource = FeatureSource(),
    val_fraction: float = 0.15,
    use_spec_augment: bool = True,
) -> ClassifierModel:
    """Cross-entropy training of the whole-clip classifier; returns the
    validation-selected checkpoint."""
    x, y = event_training_set(records, label_set, source)
    _check_class_coverage(y, label_set)
    model = build_event_model(x.shape[1], len(label_set.labels), seed=cfg.seed)
    clf = ClassifierModel("event", model, label_set, x.shape[1], source.kind)
    if cfg.epochs == 0:
        return clf
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(x))
    n_val = max(1, int(len(x) * val_fraction)) if val_fraction > 0 else 0
    val_idx, train_idx = order[:n_val], order[n_val:]
    # event logits come out as (N,1,K); squeeze targets accordingly
    train(
        _SqueezeWrapper(model),
        (x[train_idx], y[train_idx]),
        cfg,
        val=(x[val_idx], y[val_idx]) if n_val else None,
        augment=_spec_augment_batch if use_spec_augment else None,
    )
    return clf


def train_frame_classifier(
    records: list[CandidateClip],
    label_set: LabelSet,
    cfg: TrainConfig = TrainConfig(lr=1e-3, epochs=25, batch_size=32),
    source: FeatureSource = FeatureSource(),
    val_fraction: float = 0.15,
    use_spec_augment: bool = True,
    background: str = "words",
) -> ClassifierModel:
    """Per-frame cross-entropy training of the 10 Hz classifier."""
    x, y = frame_training_set(records, label_set, source, seed=cfg.seed, background=background)
    _check_class_coverage(y, label_set)
    model = build_frame_model(x.shape[1], len(label_set.labels), seed=cfg.seed)
    clf = ClassifierModel("frame", model, label_set, x.shape[1], source.kind)
    if cfg.epochs == 0:
        return clf
    rng = np.random.default_rng(cfg.seed)
    order = rng.permutation(len(x))
    n_val = max(1, int(len(x) * val_fraction)) if val_fraction > 0 else 0
    val_idx, train_idx = order[:n_val], order[n_val:]
    train(
        model,
        (x[train_idx], y[train_idx]),
        cfg,
        val=(x[val_idx], y[val_idx]) if n_val else None,
        augment=_spec_augment_batch if use_spec_augment else None,
    )
    return clf


class _SqueezeWrapper:
    """Adapts the event model's (N,1,K) logits to (N,K) for the loss."""

    def __init__(self, model: ModelGraph):
        self._model = model

    def forward(self, x, train=False):
        return self._model.forward(x, train=train)[:, 0, :]

    def backward(self, dy):
        return self._model.backward(dy[:, None, :])

    def named_params(self):
        return self._model.named_params()

    def named_grads(self):
        return self._model.named_grads()

    def snapshot(self):
        return self._model.snapshot()

    def restore(self, snap):
        self._model.restore(snap)


def load_training_records(manifest_path) -> list[CandidateClip]:
    return [r for r in load_candidate_manifest(manifest_path) if r.status == "resolved"]


def confusion_counts(model: ClassifierModel, records: list[CandidateClip], source: FeatureSource):
    """Reference/predicted label pairs over resolved candidate clips."""
    x, y = event_training_set(records, model.label_set, source)
    post = classify_event(model, np.swapaxes(x, 1, 2))
    pred = post.argmax(axis=1)
    labels = [model.label_set.labels[i] for i in y]
    preds = [model.label_set.labels[i] for i in pred]
    return labels, preds
