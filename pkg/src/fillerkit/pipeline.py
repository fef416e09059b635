"""End-to-end filler detection pipelines.

Two variants: the transcript-aware one classifies VAD/transcript gap
candidates (tight boundaries straight from the gap), the transcript-free
one slides the frame classifier over voiced regions and groups frames into
events. Both also expose their evidence as a 10 Hz filler-likelihood
series for PR analysis.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .audio import AudioClip
from .candidates import generate_candidates
from .classifier import (
    CLIP_FRAMES,
    ClassifierModel,
    Event,
    classify_event,
    classify_frames,
    frames_to_events,
)
from .features import FrameSeries, MelConfig, log_mel
from .intervals import IntervalSet
from .nnet import ModelGraph
from .transcripts import Transcript
from .vad import activations_to_intervals, vad_infer

LIKELIHOOD_RATE = 10.0


class PipelineError(ValueError):
    pass


@dataclass(frozen=True)
class DetectionResult:
    events: list[Event]
    frame_likelihoods: FrameSeries  # filler posterior per 10 Hz frame
    config: dict = field(default_factory=dict)


def _filler_labels(label_set) -> list[int]:
    """Indices whose posterior mass counts as 'filler' (uh/um in granular sets)."""
    return [i for i, l in enumerate(label_set.labels) if l in ("filler", "uh", "um")]


def _likelihood_frames(duration: float) -> int:
    return max(1, int(np.ceil(duration * LIKELIHOOD_RATE)))


def _resolve_clf_features(clf: ClassifierModel, vad_feats: FrameSeries, clf_features: FrameSeries | None) -> FrameSeries:
    """The classifier reads log-mel by default; external-embedding models
    must be handed their precomputed series."""
    if clf_features is not None:
        return clf_features
    if clf.feature_kind != "logmel":
        raise PipelineError("classifier expects external features; pass clf_features")
    return vad_feats


def _window_at(feats: FrameSeries, center_s: float) -> np.ndarray:
    rate = feats.frame_rate
    start = int(round(center_s * rate)) - CLIP_FRAMES // 2
    lo = max(0, start)
    hi = min(feats.n_frames, start + CLIP_FRAMES)
    window = feats.data[lo:hi]
    pad_front = lo - start
    pad_back = CLIP_FRAMES - window.shape[0] - pad_front
    if pad_front or pad_back:
        window = np.pad(window, ((pad_front, pad_back), (0, 0)), mode="edge")
    return window


def detect_avc(
    audio: AudioClip,
    transcript: Transcript,
    vad_model: ModelGraph,
    clf: ClassifierModel,
    vad_threshold: float = 0.1,
    clf_threshold: float = 0.5,
    mel: MelConfig = MelConfig(),
    vad_features: FrameSeries | None = None,
    clf_features: FrameSeries | None = None,
) -> DetectionResult:
    """Transcript-aware detection: classify each VAD/transcript gap.

    Every candidate gap is scored with a 1 s window centered on its
    midpoint; the event keeps the gap's own boundaries and the filler
    posterior as confidence, and survives iff that posterior reaches
    clf_threshold. All candidate posteriors (kept or not) are rasterized
    onto the 10 Hz likelihood grid.
    """
    if transcript is None:
        raise PipelineError("transcript required; use detect_vc for transcript-free detection")
    vad_feats = vad_features if vad_features is not None else log_mel(audio, mel)
    feats = _resolve_clf_features(clf, vad_feats, clf_features)
    acts = vad_infer(vad_model, vad_feats)
    speech = activations_to_intervals(acts, threshold=vad_threshold)
    gaps = generate_candidates(speech, transcript)
    filler_idx = _filler_labels(clf.label_set)
    n_frames = _likelihood_frames(audio.duration)
    likelihood = np.zeros((n_frames, 1))
    events: list[Event] = []
    for gap in gaps:
        center = (gap[0] + gap[1]) / 2.0
        window = _window_at(feats, center)
        if clf.variant == "event":
            post = classify_event(clf, window)
            p_filler = float(post[filler_idx].sum())
        else:
            # frame-variant fallback: average filler posterior over the
            # frames whose centers fall inside the gap
            frames = classify_frames(clf, window)
            win_start = center - 0.5
            centers = win_start + (np.arange(frames.shape[0]) + 0.5) / LIKELIHOOD_RATE
            inside = (centers >= gap[0]) & (centers <= gap[1])
            sel = frames[inside] if inside.any() else frames
            p_filler = float(sel[:, filler_idx].sum(axis=1).mean())
        lo = int(np.floor(gap[0] * LIKELIHOOD_RATE))
        hi = int(np.ceil(gap[1] * LIKELIHOOD_RATE))
        for i in range(lo, min(hi, n_frames)):
            c = (i + 0.5) / LIKELIHOOD_RATE
            if gap[0] <= c <= gap[1]:
                likelihood[i, 0] = max(likelihood[i, 0], p_filler)
        if p_filler >= clf_threshold:
            events.append(Event(gap[0], gap[1], "filler", p_filler))
    return DetectionResult(
        events=events,
        frame_likelihoods=FrameSeries(likelihood, LIKELIHOOD_RATE, origin_offset=0.05),
        config={
            "mode": "avc",
            "vad_threshold": vad_threshold,
            "clf_threshold": clf_threshold,
            "classifier_variant": clf.variant,
        },
    )


def detect_vc(
    audio: AudioClip,
    vad_model: ModelGraph,
    clf: ClassifierModel,
    vad_threshold: float = 0.1,
    clf_threshold: float = 0.5,
    mel: MelConfig = MelConfig(),
    vad_features: FrameSeries | None = None,
    clf_features: FrameSeries | None = None,
    background: str = "words",
) -> DetectionResult:
    """Transcript-free detection over voiced regions.

    1 s windows slide at 0.5 s hops across each VAD interval; overlapping
    10 Hz posteriors are averaged, argmax runs become events, and filler
    events are kept when their mean posterior reaches clf_threshold.
    """
    vad_feats = vad_features if vad_features is not None else log_mel(audio, mel)
    feats = _resolve_clf_features(clf, vad_feats, clf_features)
    acts = vad_infer(vad_model, vad_feats)
    speech = activations_to_intervals(acts, threshold=vad_threshold)
    n_labels = len(clf.label_set.labels)
    n_frames = _likelihood_frames(audio.duration)
    post_sum = np.zeros((n_frames, n_labels))
    post_count = np.zeros(n_frames)
    for s, e in speech:
        starts = _window_starts(s, e, audio.duration)
        windows = np.stack([_window_at(feats, ws + 0.5) for ws in starts])
        if clf.variant == "frame":
            frame_posts = classify_frames(clf, windows)
        else:
            # event-variant fallback: spread the window posterior over its frames
            post = classify_event(clf, windows)
            frame_posts = np.repeat(post[:, None, :], 10, axis=1)
        for ws, fp in zip(starts, frame_posts):
            base = int(round(ws * LIKELIHOOD_RATE))
            for k in range(fp.shape[0]):
                idx = base + k
                if 0 <= idx < n_frames:
                    post_sum[idx] += fp[k]
                    post_count[idx] += 1.0
    covered = post_count > 0
    posteriors = np.zeros_like(post_sum)
    bg_idx = clf.label_set.index(background) if background in clf.label_set.labels else 0
    posteriors[~covered, bg_idx] = 1.0
    posteriors[covered] = post_sum[covered] / post_count[covered, None]
    all_events = frames_to_events(posteriors, 0.0, clf.label_set, background=background)
    filler_idx = _filler_labels(clf.label_set)
    events = []
    for ev in all_events:
        if ev.label in ("filler", "uh", "um") and ev.confidence >= clf_threshold:
            events.append(ev)
    likelihood = posteriors[:, filler_idx].sum(axis=1, keepdims=True)
    likelihood[~covered] = 0.0
    return DetectionResult(
        events=events,
        frame_likelihoods=FrameSeries(likelihood, LIKELIHOOD_RATE, origin_offset=0.05),
        config={
            "mode": "vc",
            "vad_threshold": vad_threshold,
            "clf_threshold": clf_threshold,
            "classifier_variant": clf.variant,
        },
    )


def _window_starts(s: float, e: float, duration: float) -> list[float]:
    """1 s window starts covering [s, e] at 0.5 s hops (a 3 s region gets
    5 windows at 0, 0.5, 1.0, 1.5, 2.0 relative to its start).

    Starts are snapped to the 10 Hz grid so window frames land exactly on
    global likelihood frames.
    """

    def snap(t: float) -> float:
        return round(max(0.0, min(t, max(0.0, duration - 1.0))) * LIKELIHOOD_RATE) / LIKELIHOOD_RATE

    span = e - s
    if span <= 1.0:
        return [snap((s + e) / 2.0 - 0.5)]
    starts = []
    t = s
    while t + 1.0 <= e + 1e-9:
        starts.append(snap(t))
        t += 0.5
    last = snap(e - 1.0)
    if not starts or last - starts[-1] > 1e-9:
        starts.append(last)
    return starts


def candidate_time(
    audio: AudioClip,
    transcript: Transcript,
    vad_model: ModelGraph,
    vad_threshold: float,
    mel: MelConfig = MelConfig(),
    features: FrameSeries | None = None,
) -> tuple[float, float, int]:
    """Raw and duration-filtered candidate totals at one VAD threshold.

    Returns (raw gap seconds, kept candidate seconds, kept count); the raw
    total is monotone in the threshold by construction.
    """
    from .intervals import subtract

    feats = features if features is not None else log_mel(audio, mel)
    acts = vad_infer(vad_model, feats)
    speech = activations_to_intervals(acts, threshold=vad_threshold)
    raw = subtract(speech, transcript.word_intervals())
    kept = generate_candidates(speech, transcript)
    return raw.duration(), sum(e - s for s, e in kept), len(kept)


def write_events_csv(path, events: list[Event]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["start_s", "end_s", "label", "confidence"])
        for ev in events:
            writer.writerow([repr(ev.start), repr(ev.end), ev.label, repr(ev.confidence)])


def load_events_csv(path) -> list[Event]:
    events = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            events.append(
                Event(
                    start=float(row["start_s"]),
                    end=float(row["end_s"]),
                    label=row["label"],
                    confidence=float(row.get("confidence") or 1.0),
                )
            )
    return events
