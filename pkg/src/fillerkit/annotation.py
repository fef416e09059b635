"""Annotation workflow: dispatch, label storage, and 2-of-3 resolution.

Every candidate is labeled by two annotators, or three when the first two
disagree; two matching labels resolve it, three distinct labels park it as
unresolved for expert review. Labels land in an append-only JSONL log;
replaying the log reconstructs the exact store state.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .candidates import CandidateClip, write_candidate_manifest
from .classifier import ANNOTATION_LABELS

NEEDS_FIRST = "needs_first"
NEEDS_SECOND = "needs_second"
NEEDS_THIRD = "needs_third"
RESOLVED = "resolved"
UNRESOLVED = "unresolved"

DEFAULT_LEASE_S = 600.0


class AnnotationError(ValueError):
    pass


@dataclass(frozen=True)
class AnnotationRecord:
    candidate_id: str
    annotator_id: str
    label: str
    timestamp: float


def resolve(labels: list[str]) -> tuple[str, str | None]:
    """State of a candidate given its chronological labels.

    Returns (state, final_label or None).
    """
    if len(labels) == 0:
        return NEEDS_FIRST, None
    if len(labels) == 1:
        return NEEDS_SECOND, None
    if len(labels) == 2:
        if labels[0] == labels[1]:
            return RESOLVED, labels[0]
        return NEEDS_THIRD, None
    if len(labels) == 3:
        if labels[2] == labels[0] or labels[2] == labels[1]:
            return RESOLVED, labels[2]
        return UNRESOLVED, None
    raise AnnotationError(f"candidate has {len(labels)} records; more than 3 should be impossible")


@dataclass
class _CandidateState:
    clip: CandidateClip
    records: list[AnnotationRecord] = field(default_factory=list)

    @property
    def labels(self) -> list[str]:
        return [r.label for r in self.records]

    @property
    def annotators(self) -> set[str]:
        return {r.annotator_id for r in self.records}

    def state(self) -> tuple[str, str | None]:
        return resolve(self.labels)


class AnnotationStore:
    """In-memory state over an append-only label log.

    Not thread-safe by itself: the HTTP server serializes all mutations
    through one lock.
    """

    def __init__(
        self,
        candidates: list[CandidateClip],
        log_path=None,
        lease_timeout: float = DEFAULT_LEASE_S,
        clock=time.time,
    ):
        self._states: dict[str, _CandidateState] = {}
        self._order: list[str] = []
        for clip in candidates:
            if clip.id in self._states:
                raise AnnotationError(f"duplicate candidate id {clip.id}")
            self._states[clip.id] = _CandidateState(clip=clip)
            self._order.append(clip.id)
        self._log_path = Path(log_path) if log_path else None
        self._lease_timeout = lease_timeout
        self._clock = clock
        self._leases: dict[str, tuple[str, float]] = {}
        if self._log_path and self._log_path.exists():
            self._replay(self._log_path)

    # -- log handling --

    def _replay(self, path: Path) -> None:
        for line_no, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                record = AnnotationRecord(
                    candidate_id=rec["candidate_id"],
                    annotator_id=rec["annotator_id"],
                    label=rec["label"],
                    timestamp=float(rec.get("timestamp", 0.0)),
                )
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise AnnotationError(f"{path}:{line_no}: bad log line ({exc})") from None
            self._apply(record)

    def _append_log(self, record: AnnotationRecord) -> None:
        if not self._log_path:
            return
        entry = {
            "candidate_id": record.candidate_id,
            "annotator_id": record.annotator_id,
            "label": record.label,
            "timestamp": record.timestamp,
        }
        with open(self._log_path, "a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")

    def _apply(self, record: AnnotationRecord) -> tuple[str, str | None]:
        state = self._states.get(record.candidate_id)
        if state is None:
            raise AnnotationError(f"unknown candidate {record.candidate_id}")
        if record.label not in ANNOTATION_LABELS:
            raise AnnotationError(f"invalid label {record.label!r}")
        for prev in state.records:
            if prev.annotator_id == record.annotator_id:
                if prev.label == record.label:
                    return state.state()  # idempotent resubmission
                raise AnnotationError(
                    f"annotator {record.annotator_id} already labeled {record.candidate_id} "
                    f"as {prev.label!r}"
                )
        current, _ = state.state()
        if current in (RESOLVED, UNRESOLVED):
            raise AnnotationError(f"candidate {record.candidate_id} is already {current}")
        state.records.append(record)
        return state.state()

    # -- public API --

    def next_candidate(self, annotator_id: str) -> CandidateClip | None:
        """Lease the highest-priority candidate this annotator can label.

        Priority: needs_third > needs_second > needs_first, manifest order
        within a tier; candidates leased to someone else are skipped until
        the lease expires.
        """
        if not annotator_id:
            raise AnnotationError("annotator id required")
        now = self._clock()
        ranked = {NEEDS_THIRD: 0, NEEDS_SECOND: 1, NEEDS_FIRST: 2}
        best = None
        best_rank = None
        for cid in self._order:
            state = self._states[cid]
            status, _ = state.state()
            if status not in ranked:
                continue
            if annotator_id in state.annotators:
                continue
            lease = self._leases.get(cid)
            if lease and lease[0] != annotator_id and lease[1] > now:
                continue
            if best_rank is None or ranked[status] < best_rank:
                best, best_rank = cid, ranked[status]
                if best_rank == 0:
                    break
        if best is None:
            return None
        self._leases[best] = (annotator_id, now + self._lease_timeout)
        return self._states[best].clip

    def submit_label(self, candidate_id: str, annotator_id: str, label: str) -> tuple[str, str | None]:
        """Record a label; returns the candidate's new (state, final_label).

        Rejected when the candidate is leased to someone else (and the
        lease is still live), already resolved, or when the annotator
        resubmits a different label.
        """
        if candidate_id not in self._states:
            raise AnnotationError(f"unknown candidate {candidate_id}")
        now = self._clock()
        lease = self._leases.get(candidate_id)
        if lease and lease[0] != annotator_id and lease[1] > now:
            raise AnnotationError(f"candidate {candidate_id} is leased to another annotator")
        record = AnnotationRecord(candidate_id, annotator_id, label, timestamp=now)
        before = len(self._states[candidate_id].records)
        result = self._apply(record)
        if len(self._states[candidate_id].records) > before:
            self._append_log(record)
        self._leases.pop(candidate_id, None)
        return result

    def candidate_state(self, candidate_id: str) -> tuple[str, str | None]:
        if candidate_id not in self._states:
            raise AnnotationError(f"unknown candidate {candidate_id}")
        return self._states[candidate_id].state()

    def get_clip(self, candidate_id: str) -> CandidateClip:
        if candidate_id not in self._states:
            raise AnnotationError(f"unknown candidate {candidate_id}")
        return self._states[candidate_id].clip

    def stats(self) -> dict:
        by_state: dict[str, int] = {s: 0 for s in (NEEDS_FIRST, NEEDS_SECOND, NEEDS_THIRD, RESOLVED, UNRESOLVED)}
        for cid in self._order:
            status, _ = self._states[cid].state()
            by_state[status] += 1
        return {
            "total": len(self._order),
            "by_state": by_state,
            "records": sum(len(s.records) for s in self._states.values()),
        }

    def agreement_stats(self) -> dict:
        """Share of resolved candidates settled by the first two annotators,
        overall and per final label."""
        total = 0
        first_two = 0
        per_label: dict[str, dict[str, int]] = {}
        for state in self._states.values():
            status, label = state.state()
            if status != RESOLVED:
                continue
            total += 1
            entry = per_label.setdefault(label, {"resolved": 0, "first_two": 0})
            entry["resolved"] += 1
            if state.labels[0] == state.labels[1]:
                first_two += 1
                entry["first_two"] += 1
        out = {
            "resolved": total,
            "resolved_by_first_two": first_two,
            "agreement_rate": first_two / total if total else 0.0,
            "per_label": {
                label: {
                    **entry,
                    "agreement_rate": entry["first_two"] / entry["resolved"],
                }
                for label, entry in sorted(per_label.items())
            },
        }
        return out

    def export_labeled_dataset(self, manifest_path, stats_path=None) -> dict:
        """Write resolved candidates (final labels) as a candidate manifest;
        unresolved and incomplete candidates are excluded."""
        rows = []
        for cid in self._order:
            state = self._states[cid]
            status, label = state.state()
            if status != RESOLVED:
                continue
            clip = state.clip
            rows.append(
                CandidateClip(
                    id=clip.id,
                    episode=clip.episode,
                    gap=clip.gap,
                    window=clip.window,
                    clip_path=clip.clip_path,
                    status="resolved",
                    label=label,
                )
            )
        write_candidate_manifest(manifest_path, rows)
        stats = self.agreement_stats()
        if stats_path:
            with open(stats_path, "w", encoding="utf-8") as fh:
                json.dump(stats, fh, indent=2, sort_keys=True)
                fh.write("\n")
        return stats
