"""Interval-set algebra on the real timeline.

An IntervalSet is a sorted list of disjoint (start, end) pairs in seconds.
Union / intersection / difference are computed with a sweep over endpoint
boundaries so that no arithmetic is ever performed on the endpoints
themselves; pieces of the inputs are only kept or discarded, which keeps
the duration-conservation identity

    duration(a - b) + duration(a & b) == duration(a)

exact up to float summation error.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

# Endpoints closer than this are considered equal when normalizing.
EPS = 1e-9


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint collection of half-open time intervals [start, end)."""

    intervals: tuple[tuple[float, float], ...] = field(default_factory=tuple)

    @staticmethod
    def from_pairs(pairs: Iterable[Sequence[float]]) -> "IntervalSet":
        """Build a valid IntervalSet from arbitrary (start, end) pairs.

        Overlapping or touching input intervals are merged; empty or
        inverted pairs raise ValueError.
        """
        items = [(float(s), float(e)) for s, e in pairs]
        for s, e in items:
            if not (s < e):
                raise ValueError(f"invalid interval ({s}, {e}): start must be < end")
        items.sort()
        merged: list[tuple[float, float]] = []
        for s, e in items:
            if merged and s <= merged[-1][1] + EPS:
                prev_s, prev_e = merged[-1]
                merged[-1] = (prev_s, max(prev_e, e))
            else:
                merged.append((s, e))
        return IntervalSet(tuple(merged))

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    def duration(self) -> float:
        return sum(e - s for s, e in self.intervals)

    def contains(self, t: float) -> bool:
        return any(s <= t < e for s, e in self.intervals)

    def clip(self, lo: float, hi: float) -> "IntervalSet":
        """Restrict the set to [lo, hi]."""
        out = []
        for s, e in self.intervals:
            s2, e2 = max(s, lo), min(e, hi)
            if s2 < e2:
                out.append((s2, e2))
        return IntervalSet(tuple(out))


def _boundaries(a: IntervalSet, b: IntervalSet) -> list[float]:
    pts = sorted({p for s, e in list(a) + list(b) for p in (s, e)})
    return pts


def _sweep(a: IntervalSet, b: IntervalSet, keep) -> IntervalSet:
    """Cut both sets at every boundary and keep pieces where keep(in_a, in_b)."""
    pts = _boundaries(a, b)
    out: list[tuple[float, float]] = []
    ai = bi = 0
    aiv, biv = list(a), list(b)
    for lo, hi in zip(pts, pts[1:]):
        if lo >= hi:
            continue
        while ai < len(aiv) and aiv[ai][1] <= lo:
            ai += 1
        while bi < len(biv) and biv[bi][1] <= lo:
            bi += 1
        in_a = ai < len(aiv) and aiv[ai][0] <= lo
        in_b = bi < len(biv) and biv[bi][0] <= lo
        if keep(in_a, in_b):
            if out and out[-1][1] == lo:
                out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
    return IntervalSet(tuple(out))


def subtract(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Set difference a \\ b."""
    return _sweep(a, b, lambda in_a, in_b: in_a and not in_b)


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Set intersection a & b."""
    return _sweep(a, b, lambda in_a, in_b: in_a and in_b)


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Set union a | b."""
    return _sweep(a, b, lambda in_a, in_b: in_a or in_b)
