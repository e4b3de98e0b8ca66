"""Photometric training of the coarse and fine networks."""

import logging
import math
import time
from typing import Callable, Optional, Sequence

import numpy as np

from ..autodiff import Adam, Tensor, mse_loss
from ..errors import NumericError, UsageError
from ..models import FieldConfig, PosedImage, TrainingTrace
from ..volume import WHITE, render_pose, render_rays
from .network import FieldParams, init_field_params

logger = logging.getLogger(__name__)

# Called as progress(iteration, loss) after each step
ProgressFn = Callable[[int, float], None]


def _pixel_rays(
    views: Sequence[PosedImage],
    view_idx: np.ndarray,
    rows: np.ndarray,
    cols: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Origins and unit directions for (view, row, col) triples."""
    c2w = np.stack([views[i].camera_to_world for i in view_idx])
    focal = np.array([views[i].focal_px for i in view_idx])
    heights = np.array([views[i].height for i in view_idx])
    widths = np.array([views[i].width for i in view_idx])
    dirs_cam = np.stack(
        [
            (cols + 0.5 - widths / 2.0) / focal,
            -(rows + 0.5 - heights / 2.0) / focal,
            -np.ones(len(view_idx)),
        ],
        axis=-1,
    )
    dirs = np.einsum("bij,bj->bi", c2w[:, :3, :3], dirs_cam)
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    return c2w[:, :3, 3].copy(), dirs


def train_field(
    dataset: Sequence[PosedImage],
    config: Optional[FieldConfig] = None,
    iters: int = 20000,
    batch_rays: int = 1024,
    lr: float = 5e-4,
    seed: int = 0,
    n_coarse: int = 64,
    n_fine: int = 64,
    near: float = 2.0,
    far: float = 6.0,
    background: Sequence[float] = WHITE,
    log_every: int = 500,
    progress: Optional[ProgressFn] = None,
    params: Optional[FieldParams] = None,
) -> tuple[FieldParams, TrainingTrace]:
    """
    Fit the coarse and fine networks to posed images.

    Every iteration draws ``batch_rays`` random pixels across the dataset,
    renders them with both networks and takes one Adam step on
    mse(C_coarse, C) + mse(C_fine, C), i.e. the summed coarse and fine
    photometric error averaged over rays and channels.

    Args:
        dataset: Posed training images
        config: Architecture (desk defaults if None)
        iters: Optimization steps (>= 1)
        batch_rays: Rays per step
        lr: Adam learning rate
        seed: Seed for initialization, pixel draws and jitter
        n_coarse: Stratified samples per ray
        n_fine: Importance samples per ray
        near: Ray start
        far: Ray end
        background: Background color
        log_every: DEBUG log interval in iterations
        progress: Optional per-iteration callback
        params: Continue training these weights instead of a fresh init

    Returns:
        (trained FieldParams, per-iteration loss trace)

    Raises:
        UsageError: On an empty dataset or iters < 1
        NumericError: If the loss becomes non-finite
    """
    if not dataset:
        raise UsageError("train_field needs at least one posed image")
    if iters < 1:
        raise UsageError(f"iters must be >= 1, got {iters}")
    config = config or FieldConfig()
    params = params or init_field_params(config, seed)
    rng = np.random.default_rng((seed, 1))
    optimizer = Adam(params.parameters(), lr=lr)
    fields = params.field_pair()

    sizes = np.array([v.height * v.width for v in dataset])
    offsets = np.concatenate([[0], np.cumsum(sizes)])
    trace = TrainingTrace()
    start = time.perf_counter()

    for it in range(iters):
        flat = rng.integers(0, offsets[-1], size=batch_rays)
        view_idx = np.searchsorted(offsets, flat, side="right") - 1
        local = flat - offsets[view_idx]
        widths = np.array([dataset[i].width for i in view_idx])
        rows, cols = local // widths, local % widths
        origins, dirs = _pixel_rays(dataset, view_idx, rows, cols)
        target = np.stack([dataset[i].image[:, r, c] for i, r, c in zip(view_idx, rows, cols)])

        result = render_rays(
            fields, origins, dirs, near, far, n_coarse, n_fine, background,
            coarse_jitter=rng.random((batch_rays, n_coarse)),
            fine_uniforms=rng.random((batch_rays, n_fine)) if n_fine else None,
        )
        target_t = Tensor(target)
        loss = mse_loss(result.rgb_coarse, target_t) + mse_loss(result.rgb_fine, target_t)
        value = loss.item()
        if not math.isfinite(value):
            raise NumericError(f"Field training diverged at iteration {it} (loss={value})")

        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
        trace.losses.append(value)

        if progress is not None:
            progress(it, value)
        if log_every and (it + 1) % log_every == 0:
            logger.debug("field iter %d/%d loss %.6f", it + 1, iters, value)

    trace.total_time = time.perf_counter() - start
    logger.info("Trained field for %d iterations in %.1fs (final loss %.6f)",
                iters, trace.total_time, trace.losses[-1])
    return params, trace


def psnr(image: np.ndarray, reference: np.ndarray) -> float:
    """Peak signal-to-noise ratio in dB for images in [0, 1]."""
    mse = float(np.mean((np.asarray(image, np.float64) - np.asarray(reference, np.float64)) ** 2))
    if mse == 0.0:
        return math.inf
    return -10.0 * math.log10(mse)


def evaluate_psnr(
    params: FieldParams,
    views: Sequence[PosedImage],
    n_coarse: int = 64,
    n_fine: int = 64,
    near: float = 2.0,
    far: float = 6.0,
    background: Sequence[float] = WHITE,
    seed: int = 0,
) -> list[float]:
    """PSNR of the field's render of each view against its image."""
    scores = []
    for view in views:
        rendered = render_pose(
            params, view.camera_to_world, view.height, view.width, view.focal_px, near, far,
            n_coarse=n_coarse, n_fine=n_fine, background=background, seed=seed,
        )
        scores.append(psnr(rendered, view.image))
    return scores


__all__ = ["train_field", "psnr", "evaluate_psnr"]
