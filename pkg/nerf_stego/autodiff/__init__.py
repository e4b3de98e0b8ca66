"""Minimal dense tensors with reverse-mode autodiff and Adam."""

import numpy as np

from .tensor import Tensor, no_grad, float64_mode, default_dtype, as_tensor, backward
from .ops import (
    add,
    sub,
    mul,
    div,
    neg,
    exp,
    relu,
    sigmoid,
    reshape,
    sum,
    mean,
    cumsum,
    concat,
    matmul,
    affine,
    conv2d,
    maxpool2d,
    mse_loss,
)
from .optim import Adam, AdamState, adam_step


def uniform_init(rng, shape, fan_in: int) -> Tensor:
    """Trainable tensor drawn from U(-s, s), s = sqrt(6 / fan_in)."""
    bound = (6.0 / fan_in) ** 0.5
    return Tensor(rng.uniform(-bound, bound, size=shape), requires_grad=True)


def zeros_param(shape) -> Tensor:
    """Trainable tensor of zeros."""
    return Tensor(np.zeros(shape), requires_grad=True)


__all__ = [
    "Tensor",
    "no_grad",
    "float64_mode",
    "default_dtype",
    "as_tensor",
    "backward",
    "add",
    "sub",
    "mul",
    "div",
    "neg",
    "exp",
    "relu",
    "sigmoid",
    "reshape",
    "sum",
    "mean",
    "cumsum",
    "concat",
    "matmul",
    "affine",
    "conv2d",
    "maxpool2d",
    "mse_loss",
    "Adam",
    "AdamState",
    "adam_step",
    "uniform_init",
    "zeros_param",
]
