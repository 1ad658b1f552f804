"""Wire and API data types for the transport endpoint."""

from dataclasses import dataclass, field

# DeliveryUnit flag bits (receive-side metadata header)
FLAG_OUT_OF_ORDER = 0x01

# Send-side flag bits (write metadata header)
FLAG_SQUASH = 0x01


@dataclass(frozen=True)
class Segment:
    """A simulated TCP segment. ``seq`` numbers the first payload byte;
    ``ack`` is cumulative; ``sack`` carries up to three received ranges."""

    seq: int
    payload: bytes
    ack: int
    wnd: int
    sack: tuple[tuple[int, int], ...] = ()

    @property
    def end(self) -> int:
        return self.seq + len(self.payload)

    @property
    def is_pure_ack(self) -> bool:
        return not self.payload


@dataclass(frozen=True)
class DeliveryUnit:
    """Contiguous sender-stream bytes handed to the application, with the
    0-based stream offset of the first byte."""

    flags: int
    offset: int
    data: bytes

    @property
    def end(self) -> int:
        return self.offset + len(self.data)

    @property
    def out_of_order(self) -> bool:
        return bool(self.flags & FLAG_OUT_OF_ORDER)


@dataclass
class SendEntry:
    """One application write held in the send queue. Data is never split
    across entries; seq_assigned is set once, at first transmission."""

    tag: int
    flags: int
    data: bytes
    seq_assigned: int | None = None
    transmitted_bytes: int = 0

    @property
    def remaining(self) -> int:
        return len(self.data) - self.transmitted_bytes


class CcState:
    SLOW_START = "slow_start"
    CONGESTION_AVOIDANCE = "congestion_avoidance"
    FAST_RECOVERY = "fast_recovery"


@dataclass
class CongestionState:
    """Byte-counting NewReno variables. Times are integer microseconds."""

    mss: int
    cwnd: int
    ssthresh: int
    srtt: int = 0
    rttvar: int = 0
    rto: int = 1_000_000
    dupack_count: int = 0
    state: str = CcState.SLOW_START

    RTO_FLOOR = 200_000
    RTO_CAP = 60_000_000


@dataclass
class ConnStats:
    segments_sent: int = 0
    segments_received: int = 0
    retransmissions: int = 0
    fast_retransmits: int = 0
    rto_events: int = 0
    duplicate_segments: int = 0
    bad_acks: int = 0
    squashed_entries: int = 0
