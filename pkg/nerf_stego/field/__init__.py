"""Radiance field model and its photometric training."""

from .network import (
    WeightSet,
    positional_encode,
    init_weight_set,
    field_eval,
    FieldParams,
    init_field_params,
)
from .training import train_field, psnr, evaluate_psnr

__all__ = [
    "WeightSet",
    "positional_encode",
    "init_weight_set",
    "field_eval",
    "FieldParams",
    "init_field_params",
    "train_field",
    "psnr",
    "evaluate_psnr",
]
