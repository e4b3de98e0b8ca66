"""Framing of a byte message into D x H x W bit planes."""

import numpy as np

from ..errors import CapacityError, CorruptionError, UsageError
from ..models import BitPlanes

HEADER_BITS = 32


def max_message_bytes(depth: int, height: int, width: int) -> int:
    """Largest message that fits next to the length header."""
    return max(0, (depth * height * width - HEADER_BITS) // 8)


def bits_to_planes(message: bytes, depth: int, height: int, width: int) -> BitPlanes:
    """
    Lay a message out as bit planes.

    Layout: 32-bit big-endian bit-length header, message bits MSB-first, zero
    padding up to D*H*W. Bits fill plane by plane, row by row, column by column.

    Args:
        message: Payload bytes
        depth: Bits per pixel D
        height: Image height H
        width: Image width W

    Returns:
        BitPlanes with payload_len_bits = 32 + 8 * len(message)

    Raises:
        CapacityError: If the framed message exceeds D*H*W bits
    """
    if depth < 1 or height < 1 or width < 1:
        raise UsageError(f"Plane dimensions must be positive, got {depth}x{height}x{width}")
    capacity = depth * height * width
    payload_bits = HEADER_BITS + 8 * len(message)
    if payload_bits > capacity:
        max_bytes = max_message_bytes(depth, height, width)
        raise CapacityError(
            f"Message of {len(message)} bytes exceeds capacity of {max_bytes} bytes "
            f"at D={depth}, {height}x{width}",
            max_bytes=max_bytes,
        )
    header = (8 * len(message)).to_bytes(4, "big")
    framed = np.unpackbits(np.frombuffer(header + bytes(message), dtype=np.uint8))
    bits = np.zeros(capacity, dtype=np.uint8)
    bits[:payload_bits] = framed
    return BitPlanes(
        depth=depth,
        height=height,
        width=width,
        bits=bits.reshape(depth, height, width),
        payload_len_bits=payload_bits,
    )


def planes_to_bits(planes: BitPlanes) -> bytes:
    """
    Recover the framed message from bit planes.

    Raises:
        CorruptionError: If the length header points past the plane capacity
            or is not a whole number of bytes (the usual wrong-key outcome)
    """
    flat = np.asarray(planes.bits, dtype=np.uint8).reshape(-1)
    if flat.size < HEADER_BITS:
        raise CorruptionError(f"Planes hold {flat.size} bits, fewer than the length header")
    length = int.from_bytes(np.packbits(flat[:HEADER_BITS]).tobytes(), "big")
    if length > flat.size - HEADER_BITS:
        raise CorruptionError(
            f"Length header claims {length} bits but the planes hold {flat.size - HEADER_BITS}"
        )
    if length % 8:
        raise CorruptionError(f"Length header {length} is not a whole number of bytes")
    return np.packbits(flat[HEADER_BITS:HEADER_BITS + length]).tobytes()


__all__ = ["HEADER_BITS", "max_message_bytes", "bits_to_planes", "planes_to_bits"]
