"""Transmittance-weighted quadrature and coarse-to-fine ray rendering."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Optional, Sequence

import numpy as np

from ..autodiff import Tensor, cumsum, exp, no_grad, reshape, sum as tsum
from ..errors import NumericError, UsageError
from ..models import Ray, ViewKey
from .camera import RayBundle, camera_rays, rays_from_pose
from .sampling import hierarchical_resample, pixel_uniforms, stratified_samples

logger = logging.getLogger(__name__)

# (points P x 3, unit directions P x 3) -> (rgb P x 3, sigma P)
FieldFn = Callable[[np.ndarray, np.ndarray], tuple[Tensor, Tensor]]

WHITE = (1.0, 1.0, 1.0)


@dataclass(frozen=True)
class FieldPair:
    """Coarse and fine radiance functions used by one render."""
    coarse: FieldFn
    fine: FieldFn


def as_field_pair(source: Any) -> FieldPair:
    """Accept a FieldPair or anything exposing ``field_pair()``."""
    if isinstance(source, FieldPair):
        return source
    if hasattr(source, "field_pair"):
        return source.field_pair()
    raise UsageError(f"Cannot render from {type(source).__name__}")


@dataclass
class Composite:
    """Quadrature result for a batch of rays."""
    rgb: Tensor  # R x 3
    weights: Tensor  # R x S
    residual: np.ndarray  # R, transmittance left after the last sample


@dataclass
class RayBatchResult:
    """Coarse and fine renders of a batch of rays."""
    rgb_coarse: Tensor
    rgb_fine: Tensor
    weights_coarse: np.ndarray
    ts_fine: np.ndarray


def sample_deltas(ts: np.ndarray, t_far: float) -> np.ndarray:
    """Spacing between consecutive samples; the last one extends to t_far."""
    return np.concatenate([np.diff(ts, axis=1), t_far - ts[:, -1:]], axis=1)


def composite(
    rgb: Tensor,
    sigma: Tensor,
    ts: np.ndarray,
    t_far: float,
    background: Sequence[float] = WHITE,
) -> Composite:
    """
    Alpha-composite samples along each ray.

    alpha_i = 1 - exp(-sigma_i * delta_i), T_i = exp(-sum_{j<i} sigma_j * delta_j),
    w_i = T_i * alpha_i, C = sum w_i c_i + (1 - sum w_i) * background.

    Args:
        rgb: R x S x 3 sample colors
        sigma: R x S densities
        ts: R x S sample depths
        t_far: Far bound of the rays
        background: Color composited behind the volume

    Returns:
        Composite with per-ray color, weights and residual transmittance
    """
    n_rays, n_samples = ts.shape
    deltas = sample_deltas(ts, t_far).astype(sigma.data.dtype)
    tau = sigma * deltas
    running = cumsum(tau, axis=1)
    transmittance = exp(-(running - tau))
    alpha = 1.0 - exp(-tau)
    weights = transmittance * alpha
    color = tsum(reshape(weights, (n_rays, n_samples, 1)) * rgb, axis=1)
    opacity = tsum(weights, axis=1, keepdims=True)
    bg = np.asarray(background, dtype=sigma.data.dtype).reshape(1, 3)
    color = color + (1.0 - opacity) * bg
    residual = np.exp(-running.data[:, -1])
    return Composite(rgb=color, weights=weights, residual=residual)


def _eval_field(fn: FieldFn, ts: np.ndarray, origins: np.ndarray,
                directions: np.ndarray) -> tuple[Tensor, Tensor]:
    n_rays, n_samples = ts.shape
    points = origins[:, None, :] + ts[..., None] * directions[:, None, :]
    dirs = np.broadcast_to(directions[:, None, :], points.shape)
    rgb, sigma = fn(points.reshape(-1, 3), dirs.reshape(-1, 3))
    bad_sigma = ~np.isfinite(sigma.data)
    bad_rgb = ~np.all(np.isfinite(rgb.data), axis=-1)
    if bad_sigma.any() or bad_rgb.any():
        flat = int(np.flatnonzero(bad_sigma | bad_rgb)[0])
        raise NumericError(
            f"Non-finite field output at ray {flat // n_samples}, sample {flat % n_samples}"
        )
    return reshape(rgb, (n_rays, n_samples, 3)), reshape(sigma, (n_rays, n_samples))


def render_rays(
    fields: FieldPair,
    origins: np.ndarray,
    directions: np.ndarray,
    near: float,
    far: float,
    n_coarse: int = 64,
    n_fine: int = 64,
    background: Sequence[float] = WHITE,
    coarse_jitter: Optional[np.ndarray] = None,
    fine_uniforms: Optional[np.ndarray] = None,
) -> RayBatchResult:
    """
    Render a batch of rays with the coarse pass and the hierarchical fine pass.

    Args:
        fields: Coarse and fine radiance functions
        origins: R x 3 ray origins
        directions: R x 3 unit directions
        near: Start of the integration interval
        far: End of the integration interval
        n_coarse: Stratified samples per ray (>= 2)
        n_fine: Importance samples per ray (0 disables the fine pass)
        background: Background color
        coarse_jitter: R x n_coarse offsets inside each bin; bin centers if None
        fine_uniforms: R x n_fine uniforms for inverse-CDF sampling; quantiles if None

    Returns:
        RayBatchResult (the fine color equals the coarse one when n_fine is 0)
    """
    if n_coarse < 2:
        raise UsageError(f"n_coarse must be >= 2, got {n_coarse}")
    n_rays = origins.shape[0]
    ts_coarse = stratified_samples(near, far, n_coarse, n_rays, coarse_jitter)
    rgb_c, sigma_c = _eval_field(fields.coarse, ts_coarse, origins, directions)
    coarse = composite(rgb_c, sigma_c, ts_coarse, far, background)
    weights_coarse = coarse.weights.data.astype(np.float64)

    if n_fine == 0:
        return RayBatchResult(coarse.rgb, coarse.rgb, weights_coarse, ts_coarse)

    ts_extra = hierarchical_resample(ts_coarse, weights_coarse, n_fine, far, u=fine_uniforms)
    ts_fine = np.sort(np.concatenate([ts_coarse, ts_extra], axis=1), axis=1)
    rgb_f, sigma_f = _eval_field(fields.fine, ts_fine, origins, directions)
    fine = composite(rgb_f, sigma_f, ts_fine, far, background)
    return RayBatchResult(coarse.rgb, fine.rgb, weights_coarse, ts_fine)


def render_ray(
    fields: FieldPair,
    ray: Ray,
    n_coarse: int = 64,
    n_fine: int = 64,
    background: Sequence[float] = WHITE,
    seed: Optional[int] = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Render one ray.

    Returns:
        (rgb_coarse, rgb_fine, coarse weights); jitter is drawn from ``seed``
        (bin centers and evenly spaced quantiles when seed is None)
    """
    jitter = fine_u = None
    if seed is not None:
        draws = pixel_uniforms(seed, [0], n_coarse + n_fine)
        jitter, fine_u = draws[:, :n_coarse], draws[:, n_coarse:]
    with no_grad():
        result = render_rays(
            fields,
            np.asarray(ray.origin, dtype=np.float64)[None, :],
            np.asarray(ray.direction, dtype=np.float64)[None, :],
            ray.t_near,
            ray.t_far,
            n_coarse,
            n_fine,
            background,
            jitter,
            fine_u,
        )
    return result.rgb_coarse.data[0], result.rgb_fine.data[0], result.weights_coarse[0]


def render_bundle(
    source: Any,
    rays: RayBundle,
    n_coarse: int = 64,
    n_fine: int = 64,
    background: Sequence[float] = WHITE,
    seed: Optional[int] = 0,
    chunk: int = 2048,
    workers: int = 1,
) -> np.ndarray:
    """
    Render every ray of a bundle into a 3 x H x W image clamped to [0, 1].

    Jitter for pixel p comes from (seed, p), so the image is a pure function of
    the field, the rays and the seed, independent of chunking and worker count.
    A seed of None renders bin centers without jitter.
    """
    fields = as_field_pair(source)
    origins, directions = rays.flat()
    n_pixels = origins.shape[0]
    image = np.empty((n_pixels, 3), dtype=np.float32)

    def _render_chunk(start: int) -> None:
        stop = min(start + chunk, n_pixels)
        jitter = fine_u = None
        if seed is not None:
            draws = pixel_uniforms(seed, range(start, stop), n_coarse + n_fine)
            jitter, fine_u = draws[:, :n_coarse], draws[:, n_coarse:]
        result = render_rays(fields, origins[start:stop], directions[start:stop],
                             rays.near, rays.far, n_coarse, n_fine, background, jitter, fine_u)
        image[start:stop] = result.rgb_fine.data

    starts = range(0, n_pixels, chunk)
    with no_grad():
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                list(pool.map(_render_chunk, starts))
        else:
            for start in starts:
                _render_chunk(start)

    image = np.clip(image, 0.0, 1.0)
    return image.reshape(rays.height, rays.width, 3).transpose(2, 0, 1).copy()


def render_image(
    source: Any,
    key: ViewKey,
    n_coarse: int = 64,
    n_fine: int = 64,
    background: Sequence[float] = WHITE,
    seed: Optional[int] = 0,
    workers: int = 1,
) -> np.ndarray:
    """
    Render the view a key selects.

    Args:
        source: FieldParams, FieldPair, or any object exposing ``field_pair()``
        key: Viewpoint key (angles, radius, intrinsics, near/far)
        n_coarse: Coarse samples per ray
        n_fine: Fine samples per ray
        background: Background color
        seed: Jitter seed (None for unjittered bin centers)
        workers: Threads rendering disjoint pixel chunks

    Returns:
        3 x H x W float32 image in [0, 1]
    """
    return render_bundle(source, camera_rays(key), n_coarse, n_fine, background, seed,
                         workers=workers)


def render_pose(
    source: Any,
    camera_to_world: np.ndarray,
    height: int,
    width: int,
    focal_px: float,
    near: float = 2.0,
    far: float = 6.0,
    **kwargs,
) -> np.ndarray:
    """Render an arbitrary camera pose (dataset views, held-out views)."""
    rays = rays_from_pose(camera_to_world, height, width, focal_px, near, far)
    return render_bundle(source, rays, **kwargs)


__all__ = [
    "FieldFn",
    "FieldPair",
    "as_field_pair",
    "Composite",
    "RayBatchResult",
    "WHITE",
    "sample_deltas",
    "composite",
    "render_rays",
    "render_ray",
    "render_bundle",
    "render_image",
    "render_pose",
]
