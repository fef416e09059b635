"""Filler-candidate generation and context-clip export.

A candidate is a stretch of time where the VAD hears voice but the
transcript has no word: candidates = speech_intervals minus word intervals,
kept when the gap lasts between 0.15 s and 2 s (bounds inclusive). Each
kept gap is exported as a 5 s context clip with the gap starting 3 s in,
shifted (never shrunk) at file edges.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

from .audio import AudioClip, write_wav
from .intervals import IntervalSet, subtract
from .transcripts import Transcript

MIN_GAP_DUR = 0.15
MAX_GAP_DUR = 2.0
CONTEXT_BEFORE = 3.0
CONTEXT_LEN = 5.0

CANDIDATE_FIELDS = [
    "id",
    "episode",
    "gap_start_s",
    "gap_end_s",
    "clip_path",
    "highlight_start_s",
    "highlight_end_s",
    "status",
    "label",
]


@dataclass(frozen=True)
class CandidateClip:
    """A transcript gap plus its exported context window."""

    id: str
    episode: str
    gap: tuple[float, float]
    window: tuple[float, float]
    clip_path: str = ""
    status: str = "unlabeled"
    label: str = ""

    @property
    def highlight(self) -> tuple[float, float]:
        """Gap position expressed in clip-local time."""
        return (self.gap[0] - self.window[0], self.gap[1] - self.window[0])


def generate_candidates(
    speech: IntervalSet,
    transcript: Transcript,
    min_dur: float = MIN_GAP_DUR,
    max_dur: float = MAX_GAP_DUR,
) -> list[tuple[float, float]]:
    """Gaps where VAD is active but nothing was transcribed, duration-filtered.

    Bounds are inclusive; a 1e-9 tolerance keeps borderline float durations
    from flapping.
    """
    gaps = subtract(speech, transcript.word_intervals())
    kept = []
    for s, e in gaps:
        dur = e - s
        if dur >= min_dur - 1e-9 and dur <= max_dur + 1e-9:
            kept.append((s, e))
    return kept


def candidate_id(episode: str, gap: tuple[float, float]) -> str:
    return f"{episode}_{int(round(gap[0] * 1000))}_{int(round(gap[1] * 1000))}"


def place_context_window(gap: tuple[float, float], episode_dur: float) -> tuple[float, float]:
    """Position the 5 s context window: gap start at 3.0 s, shifted to stay
    inside the episode; extended only if the gap itself outgrows the tail."""
    start = gap[0] - CONTEXT_BEFORE
    end = start + CONTEXT_LEN
    if start < 0.0:
        start, end = 0.0, min(CONTEXT_LEN, episode_dur)
    elif end > episode_dur:
        end = episode_dur
        start = max(0.0, end - CONTEXT_LEN)
    if gap[1] > end:  # gap longer than the context tail: grow, don't cut
        end = min(gap[1], episode_dur)
    return (start, end)


def export_candidate_clips(
    episode_audio: AudioClip,
    episode: str,
    gaps: list[tuple[float, float]],
    out_dir,
) -> list[CandidateClip]:
    """Write one context WAV per gap and return the candidate records.

    The manifest (candidates.csv) maps each clip back to episode time; the
    highlight offsets are clip-local so a UI can draw them directly.
    """
    out = Path(out_dir)
    clips_dir = out / "clips"
    clips_dir.mkdir(parents=True, exist_ok=True)
    sr = episode_audio.sample_rate
    records = []
    for gap in gaps:
        if gap[1] > episode_audio.duration + 1e-9:
            raise ValueError(f"gap {gap} exceeds episode duration {episode_audio.duration}")
        window = place_context_window(gap, episode_audio.duration)
        lo = int(round(window[0] * sr))
        hi = int(round(window[1] * sr))
        clip = AudioClip(samples=episode_audio.samples[lo:hi], sample_rate=sr)
        cid = candidate_id(episode, gap)
        clip_path = clips_dir / f"{cid}.wav"
        write_wav(clip_path, clip)
        records.append(
            CandidateClip(id=cid, episode=episode, gap=gap, window=window, clip_path=str(clip_path))
        )
    write_candidate_manifest(out / "candidates.csv", records)
    return records


def write_candidate_manifest(path, records: list[CandidateClip]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=CANDIDATE_FIELDS)
        writer.writeheader()
        for rec in records:
            hl = rec.highlight
            writer.writerow(
                {
                    "id": rec.id,
                    "episode": rec.episode,
                    "gap_start_s": repr(rec.gap[0]),
                    "gap_end_s": repr(rec.gap[1]),
                    "clip_path": rec.clip_path,
                    "highlight_start_s": repr(hl[0]),
                    "highlight_end_s": repr(hl[1]),
                    "status": rec.status,
                    "label": rec.label,
                }
            )


def load_candidate_manifest(path) -> list[CandidateClip]:
    """Read candidates.csv back into records.

    The window is reconstructed from the highlight offsets; its end is
    nominal (start + 5 s) since consumers take the true clip length from
    the WAV itself.
    """
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            hl_start = float(row["highlight_start_s"])
            gap = (float(row["gap_start_s"]), float(row["gap_end_s"]))
            window_start = gap[0] - hl_start
            records.append(
                CandidateClip(
                    id=row["id"],
                    episode=row["episode"],
                    gap=gap,
                    window=(window_start, window_start + CONTEXT_LEN),
                    clip_path=row["clip_path"],
                    status=row["status"] or "unlabeled",
                    label=row["label"] or "",
                )
            )
    return records
