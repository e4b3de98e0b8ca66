"""Decoding accuracy and Reed-Solomon adjusted bits per pixel."""

from typing import Optional

import numpy as np

from ..errors import DimensionError, RsDecodeError, UsageError
from ..models import RsParams
from .reed_solomon import rs_decode


def decoding_accuracy(expected: np.ndarray, actual: np.ndarray) -> float:
    """
    Fraction of matching bits: 1 - popcount(expected XOR actual) / L.

    Raises:
        DimensionError: On a length mismatch or empty input
    """
    a = np.asarray(expected, dtype=np.uint8).reshape(-1)
    b = np.asarray(actual, dtype=np.uint8).reshape(-1)
    if a.size != b.size:
        raise DimensionError(f"Bit sequences differ in length: {a.size} vs {b.size}")
    if a.size == 0:
        raise DimensionError("Cannot score empty bit sequences")
    errors = int(np.count_nonzero(a ^ b))
    return 1.0 - errors / a.size


def rs_bpp(depth: int, ber: float) -> float:
    """
    Reliable payload rate D * max(0, 1 - 2p).

    Uses the code rate k/n = 1 - 2p of the shortest Reed-Solomon code that
    still corrects a bit error ratio p.
    """
    if not 0.0 <= ber <= 1.0:
        raise UsageError(f"Bit error ratio must lie in [0, 1], got {ber}")
    return depth * max(0.0, 1.0 - 2.0 * ber)


def rs_bpp_from_accuracy(depth: int, acc: float) -> float:
    """D * max(0, 2 * acc - 1)."""
    if not 0.0 <= acc <= 1.0:
        raise UsageError(f"Accuracy must lie in [0, 1], got {acc}")
    return depth * max(0.0, 2.0 * acc - 1.0)


def measured_rs_rate(
    depth: int,
    true_bits: np.ndarray,
    extracted_bits: np.ndarray,
    params: Optional[RsParams] = None,
) -> float:
    """
    Rate achieved when the observed bit errors hit real RS codewords.

    The error pattern true XOR extracted is cut into n-byte blocks (a trailing
    partial block is ignored) and each block is decoded as the all-zero
    codeword plus that error; the code is linear, so this stands for any
    codeword. The rate is D * k/n times the share of blocks that decode back
    to the sent data, i.e. exactly D * k/n when every block survives.

    Raises:
        DimensionError: On a size mismatch or planes shorter than one codeword
    """
    params = params or RsParams()
    a = np.asarray(true_bits, dtype=np.uint8).reshape(-1)
    b = np.asarray(extracted_bits, dtype=np.uint8).reshape(-1)
    if a.size != b.size:
        raise DimensionError("True and extracted planes differ in size")
    errors = np.packbits(a ^ b).tobytes()
    blocks = len(errors) // params.n
    if blocks == 0:
        raise DimensionError(f"Planes hold fewer than {params.n} bytes, no codeword fits")
    sent = bytes(params.k)
    delivered = 0
    for i in range(blocks):
        try:
            data = rs_decode(errors[i * params.n:(i + 1) * params.n], params)
        except RsDecodeError:
            continue
        if data == sent:
            delivered += 1
    return depth * (params.k / params.n) * delivered / blocks


__all__ = ["decoding_accuracy", "rs_bpp", "rs_bpp_from_accuracy", "measured_rs_rate"]
