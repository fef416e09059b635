"""Word-level transcript parsing.

Two formats are accepted:

* JSON lines, one word per line: ``{"w": "hello", "s": 12.4, "e": 12.71, "c": 0.98}``
  (``c`` optional).
* CTM: ``<utt> <channel> <start_s> <dur_s> <word> [conf]``.

Word confidence is carried through but nothing downstream uses it; candidate
generation only cares about which time ranges were transcribed at all.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .intervals import IntervalSet


class TranscriptError(ValueError):
    """Raised on malformed transcript input; carries the 1-based line number."""

    def __init__(self, path, line_no: int, message: str):
        super().__init__(f"{path}:{line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class Word:
    text: str
    start: float
    end: float
    confidence: float | None = None


@dataclass(frozen=True)
class Transcript:
    """Ordered word records; sorted by start time."""

    words: tuple[Word, ...]

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self):
        return iter(self.words)

    def word_intervals(self) -> IntervalSet:
        """Time ranges covered by any word (overlaps merged)."""
        return IntervalSet.from_pairs((w.start, w.end) for w in self.words)


def _parse_jsonl_line(line: str):
    rec = json.loads(line)
    return Word(
        text=str(rec["w"]),
        start=float(rec["s"]),
        end=float(rec["e"]),
        confidence=float(rec["c"]) if "c" in rec and rec["c"] is not None else None,
    )


def _parse_ctm_line(line: str):
    parts = line.split()
    if len(parts) not in (5, 6):
        raise ValueError(f"expected 5 or 6 fields, got {len(parts)}")
    start = float(parts[2])
    dur = float(parts[3])
    conf = float(parts[5]) if len(parts) == 6 else None
    return Word(text=parts[4], start=start, end=start + dur, confidence=conf)


def parse_transcript(path, format: str = "jsonl") -> Transcript:
    """Parse a transcript file into a sorted Transcript.

    Blank lines and (for CTM) ``;;`` comment lines are skipped. Zero- or
    negative-duration words are malformed and raise TranscriptError with
    the offending line number.
    """
    if format not in ("jsonl", "ctm"):
        raise ValueError(f"unknown transcript format: {format!r}")
    words: list[Word] = []
    text = Path(path).read_text(encoding="utf-8")
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or (format == "ctm" and stripped.startswith(";;")):
            continue
        try:
            word = _parse_jsonl_line(stripped) if format == "jsonl" else _parse_ctm_line(stripped)
        except (ValueError, KeyError, TypeError) as exc:
            raise TranscriptError(path, line_no, f"unparseable {format} line: {exc}") from None
        if not (word.start < word.end):
            raise TranscriptError(path, line_no, f"word {word.text!r} has non-positive duration")
        words.append(word)
    words.sort(key=lambda w: (w.start, w.end, w.text))
    return Transcript(tuple(words))


def write_transcript_jsonl(path, transcript: Transcript) -> None:
    """Serialize a transcript in the JSONL format parse_transcript reads."""
    with open(path, "w", encoding="utf-8") as fh:
        for w in transcript.words:
            rec = {"w": w.text, "s": w.start, "e": w.end}
            if w.confidence is not None:
                rec["c"] = w.confidence
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
