"""Disjoint byte-range bookkeeping shared by the transport receive buffer,
the fragment map, and coverage trackers in tests and experiments."""

import bisect
from dataclasses import dataclass, field
from enum import Enum


class InsertOutcome(Enum):
    """How an inserted range related to what was already held."""

    NEW = "new"
    EXTENDED_FRONT = "extended_front"
    EXTENDED_BACK = "extended_back"
    MERGED_HOLE = "merged_hole"
    DUPLICATE = "duplicate"


class DataMismatch(Exception):
    """Overlapping bytes disagreed; cannot happen with an honest substrate."""


@dataclass
class _Span:
    start: int
    data: bytearray

    @property
    def end(self) -> int:
        return self.start + len(self.data)


class RangeData:
    """Sorted, disjoint, non-adjacent spans of a byte stream with contents.

    Adjacent or overlapping inserts are merged immediately; bytes present in
    both the stored span and the insert must match.
    """

    def __init__(self):
        self._spans: list[_Span] = []
        self._starts: list[int] = []

    def __len__(self) -> int:
        return len(self._spans)

    def total_bytes(self) -> int:
        return sum(len(s.data) for s in self._spans)

    def spans(self) -> list[tuple[int, int]]:
        return [(s.start, s.end) for s in self._spans]

    def insert(self, start: int, data: bytes) -> InsertOutcome:
        """Add ``data`` at ``start``; merge with neighbours; classify the change.

        A merge of two or more previously separate spans is MERGED_HOLE.
        Extending a single span reports EXTENDED_FRONT when any bytes were
        added before its old start (front takes precedence if both ends grew).
        """
        if not data:
            raise ValueError("empty insert")
        end = start + len(data)

        # Candidate neighbours: spans overlapping or adjacent to [start, end).
        lo = bisect.bisect_left(self._starts, start)
        if lo > 0 and self._spans[lo - 1].end >= start:
            lo -= 1
        hi = lo
        while hi < len(self._spans) and self._spans[hi].start <= end:
            hi += 1
        touched = self._spans[lo:hi]

        if not touched:
            self._spans.insert(lo, _Span(start, bytearray(data)))
            self._starts.insert(lo, start)
            return InsertOutcome.NEW

        if len(touched) == 1 and touched[0].start <= start and end <= touched[0].end:
            span = touched[0]
            off = start - span.start
            if bytes(span.data[off:off + len(data)]) != data:
                raise DataMismatch(f"duplicate bytes differ at offset {start}")
            return InsertOutcome.DUPLICATE

        new_start = min(start, touched[0].start)
        new_end = max(end, touched[-1].end)
        merged = bytearray(new_end - new_start)
        filled = RangeSet()
        for span in touched:
            merged[span.start - new_start:span.end - new_start] = span.data
            filled.add(span.start, span.end)
        # Verify overlap equality before overwriting.
        for o_start, o_end in filled.intersect(start, end):
            if merged[o_start - new_start:o_end - new_start] != data[o_start - start:o_end - start]:
                raise DataMismatch(f"duplicate bytes differ in [{o_start},{o_end})")
        merged[start - new_start:end - new_start] = data

        del self._spans[lo:hi]
        del self._starts[lo:hi]
        self._spans.insert(lo, _Span(new_start, merged))
        self._starts.insert(lo, new_start)

        if len(touched) >= 2:
            return InsertOutcome.MERGED_HOLE
        old = touched[0]
        if new_start < old.start:
            return InsertOutcome.EXTENDED_FRONT
        return InsertOutcome.EXTENDED_BACK

    def span_containing(self, offset: int) -> tuple[int, int] | None:
        i = bisect.bisect_right(self._starts, offset) - 1
        if i >= 0 and self._spans[i].end > offset:
            return (self._spans[i].start, self._spans[i].end)
        return None

    def read(self, start: int, end: int) -> bytes:
        """Bytes of [start, end); the whole interval must be held."""
        i = bisect.bisect_right(self._starts, start) - 1
        if i < 0 or self._spans[i].end < end:
            raise KeyError(f"[{start},{end}) not fully held")
        span = self._spans[i]
        return bytes(span.data[start - span.start:end - span.start])

    def contiguous_from(self, base: int) -> int:
        """End of the span starting at or covering ``base``; ``base`` if absent."""
        found = self.span_containing(base)
        return found[1] if found else base

    def prune_below(self, cutoff: int) -> None:
        """Discard bytes below ``cutoff``."""
        while self._spans and self._spans[0].start < cutoff:
            span = self._spans[0]
            if span.end <= cutoff:
                self._spans.pop(0)
                self._starts.pop(0)
            else:
                span.data = span.data[cutoff - span.start:]
                span.start = cutoff
                self._starts[0] = cutoff
                break


class RangeSet:
    """Sorted disjoint half-open intervals without payload."""

    def __init__(self):
        self._ivals: list[list[int]] = []

    def __len__(self) -> int:
        return len(self._ivals)

    def __bool__(self) -> bool:
        return bool(self._ivals)

    def intervals(self) -> list[tuple[int, int]]:
        return [(a, b) for a, b in self._ivals]

    def total(self) -> int:
        return sum(b - a for a, b in self._ivals)

    def add(self, start: int, end: int) -> None:
        if start >= end:
            return
        ivals = self._ivals
        lo = bisect.bisect_left(ivals, [start])
        if lo > 0 and ivals[lo - 1][1] >= start:
            lo -= 1
        hi = lo
        while hi < len(ivals) and ivals[hi][0] <= end:
            start = min(start, ivals[hi][0])
            end = max(end, ivals[hi][1])
            hi += 1
        ivals[lo:hi] = [[start, end]]

    def covers(self, start: int, end: int) -> bool:
        i = bisect.bisect_right(self._ivals, [start, float("inf")]) - 1
        return i >= 0 and self._ivals[i][0] <= start and self._ivals[i][1] >= end

    def contains(self, point: int) -> bool:
        return self.covers(point, point + 1)

    def intersect(self, start: int, end: int) -> list[tuple[int, int]]:
        out = []
        for a, b in self._ivals:
            lo, hi = max(a, start), min(b, end)
            if lo < hi:
                out.append((lo, hi))
            if a >= end:
                break
        return out

    def gaps(self, start: int, end: int) -> list[tuple[int, int]]:
        """Sub-intervals of [start, end) not covered."""
        out = []
        cursor = start
        for lo, hi in self.intersect(start, end):
            if lo > cursor:
                out.append((cursor, lo))
            cursor = max(cursor, hi)
        if cursor < end:
            out.append((cursor, end))
        return out

    def prune_below(self, cutoff: int) -> None:
        ivals = self._ivals
        while ivals and ivals[0][0] < cutoff:
            if ivals[0][1] <= cutoff:
                ivals.pop(0)
            else:
                ivals[0][0] = cutoff
                break
