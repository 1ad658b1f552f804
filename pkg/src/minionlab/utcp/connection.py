"""Reliable byte-stream endpoint with two API extensions: immediate
out-of-order receive delivery with offset metadata, and priority/squash
insertion into the untransmitted send queue. Wire behavior (sequence
numbers, ACKs, SACKs, window) is identical whether the extensions are
enabled or not.

The endpoint is a pure state machine: callers feed segments and the current
time, and collect segments to transmit. It never reads a clock and holds no
I/O, so a simulator or a tunnel can drive it equally well.
"""

from collections import deque

from ..ranges import RangeData, RangeSet
from .types import (
    CcState,
    CongestionState,
    ConnStats,
    DeliveryUnit,
    FLAG_OUT_OF_ORDER,
    FLAG_SQUASH,
    Segment,
    SendEntry,
)

_HUGE = 1 << 60


class ConnectionClosed(Exception):
    pass


class Connection:
    def __init__(
        self,
        *,
        mss: int = 1448,
        isn_local: int = 1,
        isn_remote: int = 1,
        recv_capacity: int = 256 * 1024,
        unordered_recv: bool = False,
        unordered_send: bool = False,
        initial_cwnd_segments: int = 10,
    ):
        self.mss = mss
        self.isn_local = isn_local
        self.isn_remote = isn_remote
        self.recv_capacity = recv_capacity
        self.mode_unordered_recv = unordered_recv
        self.mode_unordered_send = unordered_send
        self.closed = False
        self.stats = ConnStats()

        # --- send side ---
        self.send_queue: list[SendEntry] = []
        self.snd_una = isn_local
        self.snd_nxt = isn_local
        self.peer_wnd = 64 * 1024
        self._wire = bytearray()          # transmitted bytes awaiting ack
        self._wire_base = isn_local
        self._seg_bounds: dict[int, int] = {}    # original seq start -> length
        self._send_times: dict[int, int] = {}    # seq start -> first send time
        self._ever_retx = RangeSet()              # seq ranges ever retransmitted
        self._retx_queue: deque[int] = deque()    # seq starts to retransmit now
        self.cc = CongestionState(mss=mss, cwnd=initial_cwnd_segments * mss, ssthresh=_HUGE)
        self._ca_acked = 0
        self._in_recovery = False
        self._recover = isn_local
        self._retx_done: set[int] = set()
        self._sacked = RangeSet()
        self._rto_deadline: int | None = None
        self._rto_backoff = 1

        # --- receive side ---
        self._rcv = RangeData()
        self.rcv_cum = isn_remote
        self._consumed = 0                # in-order stream offset consumed by reads
        self._sack_recent: deque[int] = deque(maxlen=8)
        self.deliveries: deque[DeliveryUnit] = deque()

    # ------------------------------------------------------------------ modes

    def enable_unordered_recv(self) -> None:
        self.mode_unordered_recv = True

    def enable_unordered_send(self) -> None:
        self.mode_unordered_send = True

    # ------------------------------------------------------------------ write

    def write(self, data: bytes, flags: int = 0, tag: int = 0) -> None:
        """Queue one application write.

        In unordered-send mode the entry is inserted before the first
        lower-priority entry that has never been transmitted (lower tag value
        = higher priority; FIFO among equal tags); it is never inserted ahead
        of data transmitted in whole or in part. SQUASH first discards queued
        untransmitted entries carrying exactly the same tag.
        """
        if self.closed:
            raise ConnectionClosed("write on closed connection")
        if not data:
            raise ValueError("zero-length write")
        entry = SendEntry(tag=tag, flags=flags, data=bytes(data))
        if not self.mode_unordered_send:
            self.send_queue.append(entry)
            return
        if flags & FLAG_SQUASH:
            before = len(self.send_queue)
            self.send_queue = [
                e for e in self.send_queue
                if e.tag != tag or e.transmitted_bytes > 0 or e.seq_assigned is not None
            ]
            self.stats.squashed_entries += before - len(self.send_queue)
        pos = len(self.send_queue)
        for i, e in enumerate(self.send_queue):
            if e.tag > tag and e.transmitted_bytes == 0 and e.seq_assigned is None:
                pos = i
                break
        self.send_queue.insert(pos, entry)

    def close(self) -> None:
        self.closed = True

    # ------------------------------------------------------------------ read

    def read(self) -> DeliveryUnit | None:
        """Next pending delivery, or None (would-block)."""
        if not self.deliveries:
            return None
        unit = self.deliveries.popleft()
        if not unit.flags & FLAG_OUT_OF_ORDER:
            self._consumed = max(self._consumed, unit.end)
        return unit

    def adv_window(self) -> int:
        """Receive window: capacity minus in-order bytes not yet read.
        Out-of-order delivery never changes it."""
        unread = (self.rcv_cum - self.isn_remote) - self._consumed
        return max(self.recv_capacity - unread, 0)

    # ------------------------------------------------------------------ sizes

    @property
    def queued_bytes(self) -> int:
        return sum(e.remaining for e in self.send_queue)

    @property
    def flight_size(self) -> int:
        return self.snd_nxt - self.snd_una

    @property
    def next_stream_offset(self) -> int:
        """Offset the next written byte will occupy in the local stream."""
        return (self.snd_nxt - self.isn_local) + self.queued_bytes

    # ------------------------------------------------------------- transmit

    def dequeue_for_transmit(self, now: int) -> list[Segment]:
        """Segments to put on the wire now: queued retransmissions first,
        then new data as the congestion and peer windows allow. Sequence
        numbers are assigned here, in transmission order. In unordered-send
        mode a segment never spans two entries."""
        segs = []
        while self._retx_queue:
            segs.append(self._build_retransmission(self._retx_queue.popleft(), now))
        window = min(self.cc.cwnd, self.peer_wnd)
        while self.send_queue and window - self.flight_size > 0:
            take = min(self.mss, window - self.flight_size)
            payload = bytearray()
            while self.send_queue and take > 0:
                entry = self.send_queue[0]
                if entry.seq_assigned is None:
                    entry.seq_assigned = self.snd_nxt + len(payload)
                chunk = min(take, entry.remaining)
                start = entry.transmitted_bytes
                payload += entry.data[start:start + chunk]
                entry.transmitted_bytes += chunk
                take -= chunk
                if entry.remaining == 0:
                    self.send_queue.pop(0)
                if self.mode_unordered_send:
                    break  # never mix entries in one segment
            if not payload:
                break
            seq = self.snd_nxt
            self.snd_nxt += len(payload)
            self._wire += payload
            self._seg_bounds[seq] = len(payload)
            self._send_times[seq] = now
            segs.append(self._stamp(Segment(seq=seq, payload=bytes(payload), ack=0, wnd=0)))
            self.stats.segments_sent += 1
        if segs and self.flight_size > 0 and self._rto_deadline is None:
            self._rto_deadline = now + self.cc.rto * self._rto_backoff
        return segs

    def make_ack(self, trigger_seq: int | None = None) -> Segment:
        blocks: list[tuple[int, int]] = []
        seen: set[tuple[int, int]] = set()
        probes = ([] if trigger_seq is None else [trigger_seq]) + list(self._sack_recent)
        for probe in probes:
            span = self._rcv.span_containing(probe)
            if span and span[0] > self.rcv_cum and span not in seen:
                seen.add(span)
                blocks.append(span)
                if len(blocks) == 3:
                    break
        return self._stamp(Segment(seq=self.snd_nxt, payload=b"", ack=0, wnd=0, sack=tuple(blocks)))

    def _stamp(self, seg: Segment) -> Segment:
        """Attach current ack/window state (piggybacked on every segment)."""
        return Segment(seq=seg.seq, payload=seg.payload, ack=self.rcv_cum,
                       wnd=self.adv_window(), sack=seg.sack)

    def _build_retransmission(self, seq: int, now: int) -> Segment:
        end = min(seq + self.mss, self.snd_nxt)
        bound = self._seg_bounds.get(seq)
        if bound is not None:
            end = min(end, seq + bound)
        else:
            for start in self._seg_bounds:
                if seq < start < end:
                    end = start
        data = bytes(self._wire[seq - self._wire_base:end - self._wire_base])
        self._ever_retx.add(seq, end)
        self.stats.segments_sent += 1
        self.stats.retransmissions += 1
        return self._stamp(Segment(seq=seq, payload=data, ack=0, wnd=0))

    # ------------------------------------------------------------ segment in

    def on_segment(self, seg: Segment, now: int) -> Segment | None:
        """Process an arriving segment; returns the ACK to send, if any.
        Deliveries are appended to ``self.deliveries``."""
        self.stats.segments_received += 1
        self.on_ack(seg, now)
        if seg.payload:
            self._process_data(seg)
            return self.make_ack(trigger_seq=seg.seq)
        return None

    # -- receive path

    def _process_data(self, seg: Segment) -> None:
        isn = self.isn_remote
        old_cum = self.rcv_cum
        if seg.end <= old_cum:
            self.stats.duplicate_segments += 1
            return
        trim = max(seg.seq, old_cum)
        self._rcv.insert(trim, seg.payload[trim - seg.seq:])
        if trim > old_cum:
            self._sack_recent.appendleft(trim)
        new_cum = self._rcv.contiguous_from(old_cum) if trim == old_cum else old_cum

        if self.mode_unordered_recv:
            flags = FLAG_OUT_OF_ORDER if seg.seq > old_cum else 0
            self.deliveries.append(DeliveryUnit(flags=flags, offset=seg.seq - isn, data=seg.payload))
            if new_cum > old_cum:
                if new_cum > seg.end:
                    # Data retained past earlier out-of-order delivery comes
                    # around again, now in order.
                    again = self._rcv.read(seg.end, new_cum)
                    self.deliveries.append(DeliveryUnit(flags=0, offset=seg.end - isn, data=again))
        else:
            if new_cum > old_cum:
                data = self._rcv.read(old_cum, new_cum)
                self.deliveries.append(DeliveryUnit(flags=0, offset=old_cum - isn, data=data))
        if new_cum > old_cum:
            self.rcv_cum = new_cum
            self._rcv.prune_below(new_cum)

    # -- ack path

    def on_ack(self, seg: Segment, now: int) -> None:
        """Apply the ack/sack/window information a segment carries: slide the
        send window, take RTT samples, and run loss recovery."""
        cc = self.cc
        if seg.ack > self.snd_nxt:
            self.stats.bad_acks += 1
            return
        self.peer_wnd = seg.wnd
        for a, b in seg.sack:
            self._sacked.add(max(a, self.snd_una), b)
        newly = seg.ack - self.snd_una
        if newly > 0:
            self._ack_advance(seg.ack, now)
            if self._in_recovery:
                if seg.ack >= self._recover:
                    self._in_recovery = False
                    cc.state = CcState.CONGESTION_AVOIDANCE
                    cc.cwnd = cc.ssthresh
                else:
                    # Partial ack: the next hole is lost too.
                    cc.cwnd = max(cc.cwnd - newly + cc.mss, cc.mss)
                    self._queue_hole_retransmit(self.snd_una)
            elif cc.state == CcState.SLOW_START:
                cc.cwnd += min(newly, cc.mss)
                if cc.cwnd >= cc.ssthresh:
                    cc.state = CcState.CONGESTION_AVOIDANCE
            else:
                self._ca_acked += newly
                if self._ca_acked >= cc.cwnd:
                    self._ca_acked -= cc.cwnd
                    cc.cwnd += cc.mss
        elif seg.is_pure_ack and seg.ack == self.snd_una and self.flight_size > 0:
            cc.dupack_count += 1
            if self._in_recovery:
                cc.cwnd += cc.mss
                self._queue_next_sack_hole()
            elif cc.dupack_count == 3:
                self._enter_recovery(now)

    def _ack_advance(self, ack: int, now: int) -> None:
        cc = self.cc
        cc.dupack_count = 0
        # RTT sample from the newest fully-acked, never-retransmitted segment.
        sample = None
        for seq in sorted(self._send_times):
            length = self._seg_bounds[seq]
            if seq + length > ack:
                break
            if not self._ever_retx.intersect(seq, seq + length):
                sample = now - self._send_times[seq]
            del self._send_times[seq]
            del self._seg_bounds[seq]
        if sample is not None:
            if cc.srtt == 0:
                cc.srtt = sample
                cc.rttvar = sample // 2
            else:
                err = sample - cc.srtt
                cc.srtt += err // 8
                cc.rttvar += (abs(err) - cc.rttvar) // 4
            cc.rto = min(max(cc.srtt + max(4 * cc.rttvar, 10_000), cc.RTO_FLOOR), cc.RTO_CAP)
            self._rto_backoff = 1
        self.snd_una = ack
        del self._wire[:ack - self._wire_base]
        self._wire_base = ack
        self._sacked.prune_below(ack)
        self._ever_retx.prune_below(ack)
        self._rto_deadline = (now + cc.rto * self._rto_backoff) if self.flight_size > 0 else None

    def _enter_recovery(self, now: int) -> None:
        cc = self.cc
        cc.ssthresh = max(self.flight_size // 2, 2 * cc.mss)
        cc.cwnd = cc.ssthresh + 3 * cc.mss
        cc.state = CcState.FAST_RECOVERY
        self._in_recovery = True
        self._recover = self.snd_nxt
        self._retx_done = set()
        self.stats.fast_retransmits += 1
        self._queue_hole_retransmit(self.snd_una)

    def _queue_hole_retransmit(self, seq: int) -> None:
        if seq not in self._retx_done:
            self._retx_done.add(seq)
            self._retx_queue.append(seq)

    def _queue_next_sack_hole(self) -> None:
        for a, _b in self._sacked.gaps(self.snd_una, self._recover):
            if a not in self._retx_done:
                self._queue_hole_retransmit(a)
                return

    # ---------------------------------------------------------------- timers

    def next_timeout(self) -> int | None:
        return self._rto_deadline

    def on_timer(self, now: int) -> None:
        """Retransmission timeout: collapse the window and resend the left
        edge; backoff doubles until an ack advances."""
        if self._rto_deadline is None or now < self._rto_deadline:
            return
        if self.flight_size == 0:
            self._rto_deadline = None
            return
        cc = self.cc
        self.stats.rto_events += 1
        cc.ssthresh = max(self.flight_size // 2, 2 * cc.mss)
        cc.cwnd = cc.mss
        cc.state = CcState.SLOW_START
        cc.dupack_count = 0
        self._ca_acked = 0
        self._in_recovery = False
        self._retx_queue.clear()
        self._queue_hole_retransmit_force(self.snd_una)
        self._rto_backoff = min(self._rto_backoff * 2, 64)
        self._rto_deadline = now + cc.rto * self._rto_backoff

    def _queue_hole_retransmit_force(self, seq: int) -> None:
        self._retx_done.discard(seq)
        self._queue_hole_retransmit(seq)
