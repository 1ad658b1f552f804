"""Consistent-overhead byte stuffing.

Encodes arbitrary bytes into a zero-free string so that 0x00 can delimit
records in a stream; worst-case expansion is 1 + ceil(n/254) bytes.
"""


class CobsError(Exception):
    """Input is not a valid encoding (embedded zero, truncated group, empty)."""


def cobs_encode(payload: bytes) -> bytes:
    """Encode; output contains no 0x00 byte.

    Built on bytes.split for speed: each zero-separated run becomes one or
    more length-prefixed groups. A maximal 254-byte group (code 0xFF) implies
    no following zero, so a final run that ends exactly on a group boundary
    emits nothing extra.
    """
    out = bytearray()
    runs = payload.split(b"\x00")
    last = len(runs) - 1
    for i, run in enumerate(runs):
        pos = 0
        n = len(run)
        while n - pos >= 254:
            out.append(0xFF)
            out += run[pos:pos + 254]
            pos += 254
        rest = n - pos
        if rest or pos == 0 or i != last:
            out.append(rest + 1)
            out += run[pos:]
    return bytes(out)


def cobs_decode(encoded: bytes) -> bytes:
    """Inverse of cobs_encode; raises CobsError on malformed input."""
    if not encoded:
        raise CobsError("empty input")
    out = bytearray()
    i = 0
    n = len(encoded)
    while i < n:
        code = encoded[i]
        if code == 0:
            raise CobsError(f"zero code byte at {i}")
        group = encoded[i + 1:i + code]
        if len(group) != code - 1:
            raise CobsError(f"truncated group at {i}")
        if 0 in group:
            raise CobsError(f"embedded zero in group at {i}")
        out += group
        i += code
        if code != 0xFF and i < n:
            out.append(0)
    return bytes(out)


def max_encoded_len(payload_len: int) -> int:
    """Upper bound on len(cobs_encode(x)) for len(x) == payload_len."""
    return payload_len + 1 + (payload_len + 253) // 254
