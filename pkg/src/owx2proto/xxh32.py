"""Pure-Python XXH32 (32-bit xxHash)."""

import struct

PRIME1 = 0x9E3779B1
PRIME2 = 0x85EBCA77
PRIME3 = 0xC2B2AE3D
PRIME4 = 0x27D4EB2F
PRIME5 = 0x165667B1

_MASK = 0xFFFFFFFF


def _rotl(x: int, r: int) -> int:
    return ((x << r) | (x >> (32 - r))) & _MASK


def _round(acc: int, lane: int) -> int:
    acc = (acc + lane * PRIME2) & _MASK
    acc = _rotl(acc, 13)
    return (acc * PRIME1) & _MASK


def xxh32(data: bytes, seed: int = 0) -> int:
    """Return the XXH32 digest of ``data`` as an unsigned 32-bit integer."""
    data = bytes(data)
    n = len(data)
    seed &= _MASK
    pos = 0

    if n >= 16:
        v1 = (seed + PRIME1 + PRIME2) & _MASK
        v2 = (seed + PRIME2) & _MASK
        v3 = seed
        v4 = (seed - PRIME1) & _MASK
        limit = n - 16
        while pos <= limit:
            a, b, c, d = struct.unpack_from("<4I", data, pos)
            v1 = _round(v1, a)
            v2 = _round(v2, b)
            v3 = _round(v3, c)
            v4 = _round(v4, d)
            pos += 16
        h = (_rotl(v1, 1) + _rotl(v2, 7) + _rotl(v3, 12) + _rotl(v4, 18)) & _MASK
    else:
        h = (seed + PRIME5) & _MASK

    h = (h + n) & _MASK

    while pos + 4 <= n:
        (lane,) = struct.unpack_from("<I", data, pos)
        h = (h + lane * PRIME3) & _MASK
        h = (_rotl(h, 17) * PRIME4) & _MASK
        pos += 4

    while pos < n:
        h = (h + data[pos] * PRIME5) & _MASK
        h = (_rotl(h, 11) * PRIME1) & _MASK
        pos += 1

    h ^= h >> 15
    h = (h * PRIME2) & _MASK
    h ^= h >> 13
    h = (h * PRIME3) & _MASK
    h ^= h >> 16
    return h
