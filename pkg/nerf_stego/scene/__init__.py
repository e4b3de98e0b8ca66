"""Posed training images: NeRF-Synthetic datasets and the procedural sphere scene."""

from .dataset import load_nerf_synthetic, write_nerf_synthetic
from .procedural import (
    procedural_field,
    procedural_field_batch,
    scene_field_pair,
    sample_view_angles,
    generate_training_views,
)

__all__ = [
    "load_nerf_synthetic",
    "write_nerf_synthetic",
    "procedural_field",
    "procedural_field_batch",
    "scene_field_pair",
    "sample_view_angles",
    "generate_training_views",
]
