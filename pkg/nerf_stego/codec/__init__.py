"""Message framing, Reed-Solomon coding and extraction metrics."""

from .bitplanes import HEADER_BITS, max_message_bytes, bits_to_planes, planes_to_bits
from .reed_solomon import (
    rs_encode,
    rs_decode,
    rs_encode_message,
    rs_decode_message,
    encoded_length,
)
from .metrics import decoding_accuracy, rs_bpp, rs_bpp_from_accuracy, measured_rs_rate

__all__ = [
    "HEADER_BITS",
    "max_message_bytes",
    "bits_to_planes",
    "planes_to_bits",
    "rs_encode",
    "rs_decode",
    "rs_encode_message",
    "rs_decode_message",
    "encoded_length",
    "decoding_accuracy",
    "rs_bpp",
    "rs_bpp_from_accuracy",
    "measured_rs_rate",
]
