"""Convolutional message extractor: conv -> pool -> conv -> fc -> fc -> sigmoid."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..autodiff import (
    Tensor,
    affine,
    conv2d,
    maxpool2d,
    no_grad,
    relu,
    reshape,
    sigmoid,
    uniform_init,
    zeros_param,
)
from ..errors import DimensionError
from ..models import BitPlanes, ExtractorConfig

THRESHOLD = 0.5


def weight_shapes(config: ExtractorConfig) -> dict[str, tuple[int, ...]]:
    """Tensor shapes of an extractor, in evaluation order."""
    c1, k1 = config.conv1_channels, config.conv1_kernel
    c2, k2 = config.conv2_channels, config.conv2_kernel
    return {
        "conv1.w": (c1, 3, k1, k1),
        "conv1.b": (c1,),
        "conv2.w": (c2, c1, k2, k2),
        "conv2.b": (c2,),
        "fc_hidden.w": (config.fc_hidden, config.flat_features),
        "fc_hidden.b": (config.fc_hidden,),
        "fc_out.w": (config.output_size, config.fc_hidden),
        "fc_out.b": (config.output_size,),
    }


@dataclass
class ExtractorParams:
    """Weights of one extractor plus the geometry they were built for."""
    weights: dict[str, Tensor]
    config: ExtractorConfig

    def parameters(self) -> list[Tensor]:
        return list(self.weights.values())

    def named_tensors(self) -> dict[str, Tensor]:
        return dict(self.weights)


def init_extractor(
    config: ExtractorConfig,
    seed: int = 0,
    zero_init_output: bool = False,
) -> ExtractorParams:
    """
    Fresh extractor weights, U(-s, s) with s = sqrt(6 / fan_in) and zero biases.

    Args:
        config: Extractor geometry
        seed: Initialization seed
        zero_init_output: Zero the output layer so every probability starts at 0.5
    """
    rng = np.random.default_rng(seed)
    weights = {}
    for name, shape in weight_shapes(config).items():
        if name.endswith(".b") or (zero_init_output and name == "fc_out.w"):
            weights[name] = zeros_param(shape)
        else:
            weights[name] = uniform_init(rng, shape, int(np.prod(shape[1:])))
    return ExtractorParams(weights=weights, config=config)


def extractor_forward(params: ExtractorParams, image: np.ndarray) -> Tensor:
    """
    Per-bit probabilities for one 3 x H x W image.

    Returns:
        D x H x W tensor with every value in (0, 1)

    Raises:
        DimensionError: If the image does not match the configured size
    """
    config = params.config
    image = np.asarray(image)
    expected = (3, config.height, config.width)
    if image.shape != expected:
        raise DimensionError(f"Extractor expects a {expected} image, got {image.shape}")
    w = params.weights
    h = relu(conv2d(Tensor(image), w["conv1.w"], w["conv1.b"]))
    h = maxpool2d(h, config.pool_kernel, config.pool_stride)
    h = relu(conv2d(h, w["conv2.w"], w["conv2.b"]))
    h = reshape(h, (config.flat_features,))
    h = relu(affine(h, w["fc_hidden.w"], w["fc_hidden.b"]))
    logits = affine(h, w["fc_out.w"], w["fc_out.b"])
    return reshape(sigmoid(logits), (config.depth, config.height, config.width))


def threshold_bits(probabilities: np.ndarray) -> np.ndarray:
    """1 where p >= 0.5, else 0."""
    return (np.asarray(probabilities) >= THRESHOLD).astype(np.uint8)


def extract_bits(params: ExtractorParams, image: np.ndarray,
                 payload_len_bits: Optional[int] = None) -> BitPlanes:
    """Threshold the extractor output into bit planes (ties go to 1)."""
    config = params.config
    with no_grad():
        probabilities = extractor_forward(params, image).numpy()
    capacity = config.depth * config.height * config.width
    return BitPlanes(
        depth=config.depth,
        height=config.height,
        width=config.width,
        bits=threshold_bits(probabilities),
        payload_len_bits=capacity if payload_len_bits is None else payload_len_bits,
    )


__all__ = [
    "THRESHOLD",
    "weight_shapes",
    "ExtractorParams",
    "init_extractor",
    "extractor_forward",
    "threshold_bits",
    "extract_bits",
]
