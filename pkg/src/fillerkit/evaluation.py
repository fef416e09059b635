"""Segment- and event-based detection metrics, PR curves, confusion matrices.

Event scoring: a prediction is a true positive when it can be matched
one-to-one to a same-label reference event that it overlaps, with onset
and offset each within the collar (200 ms by default). The matching is a
maximum bipartite matching (augmenting paths), so TP counts never depend
on event order and never undercount reachable pairings.

Segment scoring: the timeline is cut into fixed segments; a segment is
positive for a label iff any event with that label overlaps it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .classifier import Event


def _prf(tp: int, fp: int, fn: int) -> tuple[float, float, float]:
    """Precision/recall/F1 with 0/0 -> 0."""
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * p * r / (p + r) if p + r else 0.0
    return p, r, f1


@dataclass
class LabelCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def as_dict(self) -> dict:
        p, r, f1 = _prf(self.tp, self.fp, self.fn)
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "precision": p, "recall": r, "f1": f1}


@dataclass
class MetricsReport:
    mode: str  # event | segment
    per_label: dict[str, LabelCounts] = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    def counts(self, label: str) -> LabelCounts:
        return self.per_label.setdefault(label, LabelCounts())

    def overall(self) -> LabelCounts:
        total = LabelCounts()
        for c in self.per_label.values():
            total.tp += c.tp
            total.fp += c.fp
            total.fn += c.fn
        return total

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "config": self.config,
            "per_label": {l: c.as_dict() for l, c in sorted(self.per_label.items())},
            "overall": self.overall().as_dict(),
        }

    def merge(self, other: "MetricsReport") -> None:
        """Accumulate counts from another report (per-file aggregation)."""
        for label, c in other.per_label.items():
            mine = self.counts(label)
            mine.tp += c.tp
            mine.fp += c.fp
            mine.fn += c.fn


def _compatible(ref: Event, pred: Event, collar: float) -> bool:
    if ref.label != pred.label:
        return False
    if min(ref.end, pred.end) <= max(ref.start, pred.start):
        return False  # no overlap
    return abs(ref.start - pred.start) <= collar and abs(ref.end - pred.end) <= collar


def _max_matching(adjacency: list[list[int]], n_right: int) -> int:
    """Maximum bipartite matching size via augmenting paths."""
    match_right = [-1] * n_right

    def try_assign(left: int, seen: list[bool]) -> bool:
        for right in adjacency[left]:
            if not seen[right]:
                seen[right] = True
                if match_right[right] == -1 or try_assign(match_right[right], seen):
                    match_right[right] = left
                    return True
        return False

    size = 0
    for left in range(len(adjacency)):
        if try_assign(left, [False] * n_right):
            size += 1
    return size


def event_metrics(ref: list[Event], pred: list[Event], collar: float = 0.2) -> MetricsReport:
    """Collar-based event scoring with per-label counts."""
    report = MetricsReport(mode="event", config={"collar": collar})
    labels = sorted({e.label for e in ref} | {e.label for e in pred})
    for label in labels:
        refs = sorted([e for e in ref if e.label == label], key=lambda e: (e.start, e.end))
        preds = sorted([e for e in pred if e.label == label], key=lambda e: (e.start, e.end))
        adjacency = [
            [j for j, r in enumerate(refs) if _compatible(r, p, collar)] for p in preds
        ]
        tp = _max_matching(adjacency, len(refs))
        c = report.counts(label)
        c.tp = tp
        c.fp = len(preds) - tp
        c.fn = len(refs) - tp
    return report


def segment_metrics(
    ref: list[Event],
    pred: list[Event],
    total_dur: float,
    segment_len: float = 1.0,
) -> MetricsReport:
    """Fixed-grid segment scoring; the grid covers [0, total_dur]."""
    if total_dur <= 0:
        raise ValueError("total_dur must be positive")
    n_seg = int(np.ceil(total_dur / segment_len))
    report = MetricsReport(mode="segment", config={"segment_len": segment_len, "total_dur": total_dur})
    labels = sorted({e.label for e in ref} | {e.label for e in pred})

    def active_grid(events: list[Event], label: str) -> np.ndarray:
        grid = np.zeros(n_seg, dtype=bool)
        for e in events:
            if e.label != label:
                continue
            first = int(np.floor(e.start / segment_len))
            last = int(np.ceil(e.end / segment_len))
            for s in range(max(0, first), min(n_seg, last)):
                lo, hi = s * segment_len, (s + 1) * segment_len
                if min(e.end, hi) > max(e.start, lo):  # positive-length overlap
                    grid[s] = True
        return grid

    for label in labels:
        r = active_grid(ref, label)
        p = active_grid(pred, label)
        c = report.counts(label)
        c.tp = int(np.sum(r & p))
        c.fp = int(np.sum(~r & p))
        c.fn = int(np.sum(r & ~p))
    return report


def rasterize_reference(ref: list[Event], n_frames: int, label: str = "filler", frame_rate: float = 10.0) -> np.ndarray:
    """Frame-center rasterization of reference events for PR analysis."""
    grid = np.zeros(n_frames, dtype=bool)
    centers = (np.arange(n_frames) + 0.5) / frame_rate
    for e in ref:
        if e.label == label:
            grid |= (centers >= e.start) & (centers <= e.end)
    return grid


def pr_curve(
    ref: list[Event],
    likelihoods: np.ndarray,
    thresholds: list[float],
    label: str = "filler",
    frame_rate: float = 10.0,
) -> list[tuple[float, float, float]]:
    """Frame-level precision/recall at each threshold.

    likelihoods: 1-D array of per-frame filler posteriors in [0, 1].
    """
    lik = np.asarray(likelihoods, dtype=np.float64).reshape(-1)
    if lik.size and (lik.min() < 0 or lik.max() > 1):
        raise ValueError("likelihoods must lie in [0, 1]")
    truth = rasterize_reference(ref, len(lik), label=label, frame_rate=frame_rate)
    out = []
    for thr in thresholds:
        pred = lik >= thr
        tp = int(np.sum(pred & truth))
        fp = int(np.sum(pred & ~truth))
        fn = int(np.sum(~pred & truth))
        p, r, _ = _prf(tp, fp, fn)
        out.append((float(thr), p, r))
    return out


def confusion_matrix(ref_labels: list[str], pred_labels: list[str], labels: list[str] | None = None):
    """Counts matrix (rows = reference, columns = prediction).

    Returns (labels, counts, row_normalized).
    """
    if len(ref_labels) != len(pred_labels):
        raise ValueError(f"length mismatch: {len(ref_labels)} refs vs {len(pred_labels)} predictions")
    if labels is None:
        labels = sorted(set(ref_labels) | set(pred_labels))
    index = {l: i for i, l in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for r, p in zip(ref_labels, pred_labels):
        counts[index[r], index[p]] += 1
    row_sums = counts.sum(axis=1, keepdims=True)
    normalized = np.divide(counts, row_sums, out=np.zeros(counts.shape, dtype=np.float64), where=row_sums > 0)
    return list(labels), counts, normalized


def report_to_json(path, reports: dict[str, MetricsReport]) -> None:
    doc = {name: rep.as_dict() for name, rep in reports.items()}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
