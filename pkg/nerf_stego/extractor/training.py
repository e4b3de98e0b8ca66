"""Overfitting the extractor to a single (secret image, bit planes) pair."""

import logging
import math
import time
from typing import Callable, Optional

import numpy as np

from ..autodiff import Adam, Tensor, mse_loss, no_grad
from ..errors import DimensionError, NumericError, UsageError
from ..models import BitPlanes, ExtractorConfig, TrainingTrace
from .network import ExtractorParams, extractor_forward, init_extractor, threshold_bits

logger = logging.getLogger(__name__)

# Called as progress(epoch, loss, acc)
ProgressFn = Callable[[int, float, float], None]


def train_extractor(
    secret_image: np.ndarray,
    planes: BitPlanes,
    epochs: int = 1000,
    lr: float = 1e-5,
    seed: int = 0,
    stop_at_perfect: bool = False,
    config: Optional[ExtractorConfig] = None,
    params: Optional[ExtractorParams] = None,
    zero_init_output: bool = False,
    log_every: int = 50,
    progress: Optional[ProgressFn] = None,
) -> tuple[ExtractorParams, TrainingTrace]:
    """
    Full-batch Adam on mse(extractor(secret_image), planes).

    ``trace.losses[i]`` and ``trace.accuracies[i]`` describe the weights after
    i updates, so both lists hold epochs + 1 entries unless training stops
    early. ``trace.epochs_to_perfect`` is the number of updates after which
    every thresholded bit first matched.

    Args:
        secret_image: 3 x H x W trigger image
        planes: Target bit planes (D x H x W)
        epochs: Update budget (>= 1)
        lr: Adam learning rate
        seed: Initialization seed
        stop_at_perfect: Return as soon as accuracy reaches 1.0
        config: Extractor geometry (derived from the planes if None)
        params: Warm-start weights instead of a fresh init
        zero_init_output: Start from all-0.5 outputs
        log_every: DEBUG log interval in epochs
        progress: Optional per-epoch callback

    Returns:
        (trained params, trace)

    Raises:
        UsageError: If epochs < 1
        DimensionError: If image, planes and config disagree
        NumericError: On a non-finite loss, naming the epoch
    """
    if epochs < 1:
        raise UsageError(f"epochs must be >= 1, got {epochs}")
    if params is None:
        config = config or ExtractorConfig.for_resolution(planes.depth, planes.height, planes.width)
        params = init_extractor(config, seed, zero_init_output)
    config = params.config
    if (config.depth, config.height, config.width) != planes.bits.shape:
        raise DimensionError(
            f"Extractor outputs {config.depth}x{config.height}x{config.width} "
            f"but the planes are {'x'.join(map(str, planes.bits.shape))}"
        )

    target_bits = planes.bits.astype(np.uint8)
    target = Tensor(target_bits.astype(np.float64))
    optimizer = Adam(params.parameters(), lr=lr)
    trace = TrainingTrace()
    start = time.perf_counter()

    def _record(epoch: int, probs: np.ndarray, loss: float) -> bool:
        if not math.isfinite(loss):
            raise NumericError(f"Extractor training diverged at epoch {epoch} (loss={loss})")
        acc = float(np.mean(threshold_bits(probs) == target_bits))
        trace.losses.append(loss)
        trace.accuracies.append(acc)
        if progress is not None:
            progress(epoch, loss, acc)
        if log_every and epoch % log_every == 0:
            logger.debug("extractor epoch %d loss %.6f acc %.6f", epoch, loss, acc)
        if acc == 1.0 and trace.epochs_to_perfect is None:
            trace.epochs_to_perfect = epoch
            trace.time_to_perfect = time.perf_counter() - start
        return acc == 1.0

    for epoch in range(epochs):
        probs = extractor_forward(params, secret_image)
        loss = mse_loss(probs, target)
        perfect = _record(epoch, probs.numpy(), loss.item())
        if perfect and stop_at_perfect:
            break
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
    else:
        with no_grad():
            probs = extractor_forward(params, secret_image)
            loss = mse_loss(probs, target)
        _record(epochs, probs.numpy(), loss.item())

    trace.total_time = time.perf_counter() - start
    logger.info(
        "Extractor D=%d: %d epochs in %.1fs, first perfect epoch %s",
        config.depth, len(trace.losses) - 1, trace.total_time, trace.epochs_to_perfect,
    )
    return params, trace


__all__ = ["train_extractor"]
