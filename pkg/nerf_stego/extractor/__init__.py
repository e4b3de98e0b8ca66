"""Backdoor message extractor."""

from .network import (
    THRESHOLD,
    weight_shapes,
    ExtractorParams,
    init_extractor,
    extractor_forward,
    threshold_bits,
    extract_bits,
)
from .training import train_extractor

__all__ = [
    "THRESHOLD",
    "weight_shapes",
    "ExtractorParams",
    "init_extractor",
    "extractor_forward",
    "threshold_bits",
    "extract_bits",
    "train_extractor",
]
