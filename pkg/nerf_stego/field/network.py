"""Implicit scene model: positional encoding and the coarse/fine MLPs."""

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..autodiff import Tensor, affine, concat, relu, reshape, sigmoid, uniform_init, zeros_param
from ..errors import NumericError, UsageError
from ..models import FieldConfig
from ..volume import FieldPair

# name -> trainable tensor, in evaluation order
WeightSet = dict[str, Tensor]

_DIR_TOLERANCE = 1e-6


def positional_encode(p: Union[float, np.ndarray], num_freqs: int,
                      include_raw: bool = True) -> np.ndarray:
    """
    Sinusoidal encoding applied per coordinate.

    Each coordinate emits [p, sin(2^0 pi p), cos(2^0 pi p), ...,
    sin(2^(L-1) pi p), cos(2^(L-1) pi p)] (p only when include_raw).

    Args:
        p: Scalar, (C,) vector or (..., C) batch
        num_freqs: Frequency count L
        include_raw: Prepend the raw coordinate

    Returns:
        float64 array with C * (include_raw + 2L) trailing features
    """
    p = np.asarray(p, dtype=np.float64)
    if p.ndim == 0:
        p = p.reshape(1)
    freqs = (2.0 ** np.arange(num_freqs)) * np.pi
    scaled = p[..., None] * freqs  # ..., C, L
    pairs = np.stack([np.sin(scaled), np.cos(scaled)], axis=-1)  # ..., C, L, 2
    parts = pairs.reshape(*p.shape, 2 * num_freqs)
    if include_raw:
        parts = np.concatenate([p[..., None], parts], axis=-1)
    return parts.reshape(*p.shape[:-1], -1)


def init_weight_set(config: FieldConfig, rng: np.random.Generator,
                    zero_heads: bool = False) -> WeightSet:
    """
    Fresh MLP weights: U(-s, s) with s = sqrt(6 / fan_in), zero biases.

    Args:
        config: Architecture
        rng: Random generator
        zero_heads: Zero the sigma and rgb output layers (sigma = 0, rgb = 0.5)
    """
    weights: WeightSet = {}
    fan_in = config.pos_features
    for i in range(config.depth):
        weights[f"trunk{i}.w"] = uniform_init(rng, (config.width, fan_in), fan_in)
        weights[f"trunk{i}.b"] = zeros_param((config.width,))
        fan_in = config.width
    hidden = max(config.width // 2, 1)
    if zero_heads:
        weights["sigma.w"] = zeros_param((1, config.width))
    else:
        weights["sigma.w"] = uniform_init(rng, (1, config.width), config.width)
    weights["sigma.b"] = zeros_param((1,))
    weights["feature.w"] = uniform_init(rng, (config.width, config.width), config.width)
    weights["feature.b"] = zeros_param((config.width,))
    view_in = config.width + config.dir_features
    weights["rgb_hidden.w"] = uniform_init(rng, (hidden, view_in), view_in)
    weights["rgb_hidden.b"] = zeros_param((hidden,))
    if zero_heads:
        weights["rgb.w"] = zeros_param((3, hidden))
    else:
        weights["rgb.w"] = uniform_init(rng, (3, hidden), hidden)
    weights["rgb.b"] = zeros_param((3,))
    return weights


def field_eval(weights: WeightSet, config: FieldConfig, x: np.ndarray,
               d: np.ndarray) -> tuple[Tensor, Tensor]:
    """
    Evaluate one MLP at positions x looking along unit directions d.

    sigma = relu(head(trunk(enc(x)))) depends on x only;
    rgb = sigmoid(head(relu(hidden([feature(trunk), enc(d)])))).

    Args:
        weights: One weight set (coarse or fine)
        config: Architecture the weights were built for
        x: (3,) or P x 3 positions
        d: Unit directions, same shape as x

    Returns:
        (rgb P x 3 in [0, 1], sigma P >= 0); unbatched inputs give (3,) and ()

    Raises:
        NumericError: On non-finite inputs
        UsageError: If a direction is not unit length
    """
    x = np.asarray(x, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    single = x.ndim == 1
    x, d = np.atleast_2d(x), np.atleast_2d(d)
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(d))):
        raise NumericError("field_eval received non-finite positions or directions")
    if np.any(np.abs(np.linalg.norm(d, axis=-1) - 1.0) > _DIR_TOLERANCE):
        raise UsageError("field_eval directions must be unit vectors")

    h = Tensor(positional_encode(x, config.l_pos, config.include_raw_input))
    for i in range(config.depth):
        h = relu(affine(h, weights[f"trunk{i}.w"], weights[f"trunk{i}.b"]))
    sigma = relu(affine(h, weights["sigma.w"], weights["sigma.b"]))
    feature = affine(h, weights["feature.w"], weights["feature.b"])
    view = Tensor(positional_encode(d, config.l_dir, config.include_raw_input))
    hidden = relu(affine(concat([feature, view], axis=-1),
                         weights["rgb_hidden.w"], weights["rgb_hidden.b"]))
    rgb = sigmoid(affine(hidden, weights["rgb.w"], weights["rgb.b"]))

    sigma = reshape(sigma, (rgb.shape[0],))
    if single:
        return reshape(rgb, (3,)), reshape(sigma, ())
    return rgb, sigma


@dataclass
class FieldParams:
    """Coarse and fine weight sets of one radiance field."""
    coarse: WeightSet
    fine: WeightSet
    config: FieldConfig

    def parameters(self) -> list[Tensor]:
        return list(self.coarse.values()) + list(self.fine.values())

    def named_tensors(self) -> dict[str, Tensor]:
        named = {f"coarse/{k}": v for k, v in self.coarse.items()}
        named.update({f"fine/{k}": v for k, v in self.fine.items()})
        return named

    def field_pair(self) -> FieldPair:
        config = self.config

        def _coarse(points: np.ndarray, dirs: np.ndarray) -> tuple[Tensor, Tensor]:
            return field_eval(self.coarse, config, points, dirs)

        def _fine(points: np.ndarray, dirs: np.ndarray) -> tuple[Tensor, Tensor]:
            return field_eval(self.fine, config, points, dirs)

        return FieldPair(coarse=_coarse, fine=_fine)


def init_field_params(config: FieldConfig, seed: int = 0, zero_heads: bool = False) -> FieldParams:
    """Initialize both networks from one seed."""
    rng = np.random.default_rng(seed)
    coarse = init_weight_set(config, rng, zero_heads)
    fine = init_weight_set(config, rng, zero_heads)
    return FieldParams(coarse=coarse, fine=fine, config=config)


__all__ = [
    "WeightSet",
    "positional_encode",
    "init_weight_set",
    "field_eval",
    "FieldParams",
    "init_field_params",
]
