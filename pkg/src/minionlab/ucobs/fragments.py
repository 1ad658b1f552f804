"""Receiver-side reassembly of stream fragments and record extraction.

Fragments are maximal contiguous received byte ranges of the sender's
stream, keyed by 0-based stream offset. A record is a pair of 0x00 markers
inside one fragment surrounding a zero-free, hole-free interior; interiors
decode via COBS. Duplicate suppression is keyed by the record's stream byte
range, so the at-least-once substrate underneath never causes double
delivery.
"""

from dataclasses import dataclass

from ..ranges import InsertOutcome, RangeData
from .cobs import CobsError, cobs_decode

MARKER = 0


@dataclass
class DecodedRecord:
    start: int      # stream offset of the interior's first byte
    end: int        # stream offset just past the interior
    payload: bytes


class FragmentMap:
    def __init__(self):
        self._data = RangeData()
        self.delivered_record_ranges: set[tuple[int, int]] = set()
        self.malformed_records = 0

    @property
    def cum_point(self) -> int:
        """Offset below which the stream is hole-free."""
        return self._data.contiguous_from(0)

    def fragments(self) -> list[tuple[int, int]]:
        return self._data.spans()

    def insert(self, offset: int, data: bytes) -> InsertOutcome:
        """Add received bytes; overlaps must agree with what is held."""
        return self._data.insert(offset, data)

    def scan(self, changed_start: int, changed_end: int) -> list[DecodedRecord]:
        """Extract records made complete by a change to [changed_start, changed_end).

        Newly deliverable records always include at least one changed byte,
        so scanning is bounded by the nearest markers around the changed
        range within its fragment. Malformed interiors are consumed and
        counted; zero-length interiors (back-to-back frames) are skipped.
        """
        span = self._data.span_containing(changed_start)
        if span is None:
            return []
        frag_start, frag_end = span
        window = self._data.read(frag_start, frag_end)

        rel_a = changed_start - frag_start
        rel_b = min(changed_end, frag_end) - frag_start
        scan_lo = window.rfind(MARKER, 0, rel_a)
        if scan_lo < 0:
            scan_lo = 0
        scan_hi = window.find(MARKER, rel_b)
        scan_hi = len(window) if scan_hi < 0 else scan_hi + 1

        out = []
        m1 = window.find(MARKER, scan_lo, scan_hi)
        while m1 >= 0:
            m2 = window.find(MARKER, m1 + 1, scan_hi)
            if m2 < 0:
                break
            if m2 > m1 + 1:
                key = (frag_start + m1 + 1, frag_start + m2)
                if key not in self.delivered_record_ranges:
                    self.delivered_record_ranges.add(key)
                    try:
                        payload = cobs_decode(window[m1 + 1:m2])
                    except CobsError:
                        self.malformed_records += 1
                    else:
                        out.append(DecodedRecord(key[0], key[1], payload))
            m1 = m2
        return out

    def insert_and_scan(self, offset: int, data: bytes) -> tuple[InsertOutcome, list[DecodedRecord]]:
        outcome = self.insert(offset, data)
        if outcome is InsertOutcome.DUPLICATE:
            return outcome, []
        return outcome, self.scan(offset, offset + len(data))


def fixed_frame_boundary(frame_size: int, fragment_start: int) -> int:
    """Bytes into a fragment at which the next fixed-length frame begins.

    Uses the non-negative modulus, so a fragment starting exactly on a
    boundary yields 0.
    """
    if frame_size < 1:
        raise ValueError("frame size must be >= 1")
    if fragment_start < 0:
        raise ValueError("fragment start must be >= 0")
    return frame_size - ((fragment_start - 1) % frame_size) - 1
