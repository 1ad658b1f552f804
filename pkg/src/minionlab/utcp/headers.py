"""Byte-compatible 5-byte metadata headers.

Receive side: flags (u8) + stream offset (u32, big-endian) prepended to
delivered data. Send side: flags (u8) + priority tag (u32, big-endian)
prepended by the application to each write. Offsets and tags wrap mod 2**32
on the wire; internal bookkeeping uses unbounded integers, which is
equivalent at the scales exercised here.
"""

import struct

from .types import DeliveryUnit

_HDR = struct.Struct("!BI")

HEADER_LEN = _HDR.size  # 5


def pack_delivery(unit: DeliveryUnit) -> bytes:
    return _HDR.pack(unit.flags & 0xFF, unit.offset & 0xFFFFFFFF) + unit.data


def unpack_delivery(buf: bytes) -> DeliveryUnit:
    if len(buf) < HEADER_LEN:
        raise ValueError("short delivery header")
    flags, offset = _HDR.unpack_from(buf)
    return DeliveryUnit(flags=flags, offset=offset, data=bytes(buf[HEADER_LEN:]))


def pack_send_header(flags: int, tag: int) -> bytes:
    return _HDR.pack(flags & 0xFF, tag & 0xFFFFFFFF)


def unpack_send_header(buf: bytes) -> tuple[int, int, bytes]:
    """Returns (flags, tag, payload)."""
    if len(buf) < HEADER_LEN:
        raise ValueError("short send header")
    flags, tag = _HDR.unpack_from(buf)
    return flags, tag, bytes(buf[HEADER_LEN:])
