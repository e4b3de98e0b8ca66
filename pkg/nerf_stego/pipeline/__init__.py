"""Embedding, extraction and the evaluation harness."""

from .protocol import (
    EmbedOptions,
    frame_payload,
    message_planes,
    render_secret_view,
    embed,
    check_key,
    extract_planes,
    extract_message,
)
from .evaluation import (
    DEFAULT_OFFSETS,
    AXES,
    OFFKEY_THETA,
    OFFKEY_PHI,
    View,
    offset_key,
    offkey_grid,
    attacker_sweep,
    evaluate_views,
    capacity_evaluation,
    key_tolerance,
    keyspace_bits,
)

__all__ = [
    "EmbedOptions",
    "frame_payload",
    "message_planes",
    "render_secret_view",
    "embed",
    "check_key",
    "extract_planes",
    "extract_message",
    "DEFAULT_OFFSETS",
    "AXES",
    "OFFKEY_THETA",
    "OFFKEY_PHI",
    "View",
    "offset_key",
    "offkey_grid",
    "attacker_sweep",
    "evaluate_views",
    "capacity_evaluation",
    "key_tolerance",
    "keyspace_bits",
]
