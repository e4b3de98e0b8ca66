"""Depth samplers: stratified coarse samples and inverse-CDF fine samples."""

from typing import Optional, Sequence

import numpy as np


def pixel_uniforms(seed: int, ray_ids: Sequence[int], count: int) -> np.ndarray:
    """
    Per-ray uniform draws in [0, 1) that depend only on (seed, ray id).

    Rendering order and chunking therefore never change the jitter.
    """
    out = np.empty((len(ray_ids), count))
    for row, ray_id in enumerate(ray_ids):
        out[row] = np.random.default_rng((seed, int(ray_id))).random(count)
    return out


def stratified_samples(
    near: float,
    far: float,
    n_samples: int,
    n_rays: int,
    jitter: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    One depth per uniform bin of [near, far].

    Args:
        near: Ray start
        far: Ray end
        n_samples: Bins per ray
        n_rays: Number of rays
        jitter: n_rays x n_samples offsets in [0, 1) inside each bin; bin centers if None

    Returns:
        n_rays x n_samples increasing depths
    """
    width = (far - near) / n_samples
    offsets = np.full((n_rays, n_samples), 0.5) if jitter is None else jitter
    return near + (np.arange(n_samples)[None, :] + offsets) * width


def hierarchical_resample(
    coarse_ts: np.ndarray,
    weights: np.ndarray,
    n_fine: int,
    t_far: float,
    seed: Optional[int] = None,
    u: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Draw fine depths from the piecewise-constant PDF of the coarse weights.

    Bin i spans [t_i, t_{i+1}); the last bin ends at ``t_far``. Rays whose
    weights are all zero fall back to a uniform PDF over the bins.

    Args:
        coarse_ts: Coarse depths, (S,) or (R, S), increasing
        weights: Non-negative coarse weights, same shape
        n_fine: Samples to draw per ray
        t_far: End of the last bin
        seed: Seed for the uniform draws; evenly spaced quantiles if None
        u: Explicit R x n_fine uniforms (overrides seed)

    Returns:
        Sorted fine depths, (n_fine,) or (R, n_fine)
    """
    single = coarse_ts.ndim == 1
    ts = np.atleast_2d(coarse_ts).astype(np.float64)
    w = np.clip(np.atleast_2d(weights).astype(np.float64), 0.0, None)
    n_rays, n_bins = ts.shape

    edges = np.concatenate([ts, np.full((n_rays, 1), t_far)], axis=1)
    widths = np.diff(edges, axis=1)
    totals = w.sum(axis=1, keepdims=True)
    w = np.where(totals > 0, w, widths)
    pdf = w / w.sum(axis=1, keepdims=True)
    cdf = np.concatenate([np.zeros((n_rays, 1)), np.cumsum(pdf, axis=1)], axis=1)
    cdf[:, -1] = 1.0

    if u is None:
        if seed is None:
            u = np.broadcast_to((np.arange(n_fine) + 0.5) / n_fine, (n_rays, n_fine))
        else:
            u = np.random.default_rng(seed).random((n_rays, n_fine))
    u = np.sort(np.atleast_2d(u), axis=1)

    idx = (u[:, :, None] >= cdf[:, None, :]).sum(axis=-1) - 1
    idx = np.clip(idx, 0, n_bins - 1)
    lo = np.take_along_axis(cdf, idx, axis=1)
    hi = np.take_along_axis(cdf, idx + 1, axis=1)
    denom = np.where(hi - lo > 0, hi - lo, 1.0)
    frac = np.clip((u - lo) / denom, 0.0, 1.0)
    left = np.take_along_axis(edges, idx, axis=1)
    right = np.take_along_axis(edges, idx + 1, axis=1)
    samples = np.sort(left + frac * (right - left), axis=1)
    return samples[0] if single else samples


__all__ = ["pixel_uniforms", "stratified_samples", "hierarchical_resample"]
