from .connection import Connection, ConnectionClosed
from .headers import (
    HEADER_LEN,
    pack_delivery,
    pack_send_header,
    unpack_delivery,
    unpack_send_header,
)
from .types import (
    CcState,
    CongestionState,
    DeliveryUnit,
    FLAG_OUT_OF_ORDER,
    FLAG_SQUASH,
    Segment,
    SendEntry,
)

__all__ = [
    "CcState",
    "CongestionState",
    "Connection",
    "ConnectionClosed",
    "DeliveryUnit",
    "FLAG_OUT_OF_ORDER",
    "FLAG_SQUASH",
    "HEADER_LEN",
    "Segment",
    "SendEntry",
    "pack_delivery",
    "pack_send_header",
    "unpack_delivery",
    "unpack_send_header",
]
