"""Analytic sphere scene and synthetic posed views."""

import logging
from typing import Optional

import numpy as np

from ..autodiff import Tensor
from ..errors import UsageError
from ..models import DEFAULT_CAMERA_ANGLE_X, PosedImage, SceneSpec, focal_from_fov
from ..volume import FieldPair, pose_from_angles, render_pose

logger = logging.getLogger(__name__)

THETA_RANGE = (-180.0, 180.0)
PHI_RANGE = (-90.0, -10.0)


def procedural_field_batch(spec: SceneSpec, points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Ground-truth (rgb, sigma) for P x 3 points.

    A point takes the color and density of the first sphere with
    ||x - c|| <= r; points outside every sphere get the background and zero density.
    """
    points = np.asarray(points, dtype=np.float64)
    n = points.shape[0]
    rgb = np.broadcast_to(np.asarray(spec.background, dtype=np.float64), (n, 3)).copy()
    sigma = np.zeros(n)
    claimed = np.zeros(n, dtype=bool)
    for sphere in spec.spheres:
        center = np.asarray(sphere.center, dtype=np.float64)
        inside = np.linalg.norm(points - center, axis=-1) <= sphere.radius
        hit = inside & ~claimed
        rgb[hit] = sphere.rgb
        sigma[hit] = sphere.sigma
        claimed |= hit
    return rgb, sigma


def procedural_field(spec: SceneSpec, x) -> tuple[tuple[float, float, float], float]:
    """(rgb, sigma) of one point of the analytic scene."""
    rgb, sigma = procedural_field_batch(spec, np.asarray(x, dtype=np.float64).reshape(1, 3))
    return tuple(float(c) for c in rgb[0]), float(sigma[0])


def scene_field_pair(spec: SceneSpec) -> FieldPair:
    """Use the analytic scene as both the coarse and the fine field."""
    def _fn(points: np.ndarray, dirs: np.ndarray) -> tuple[Tensor, Tensor]:
        rgb, sigma = procedural_field_batch(spec, points)
        return Tensor(rgb), Tensor(sigma)

    return FieldPair(coarse=_fn, fine=_fn)


def sample_view_angles(n_views: int, seed: int) -> list[tuple[float, float]]:
    """Theta uniform over [-180, 180), phi uniform over [-90, -10]."""
    rng = np.random.default_rng(seed)
    thetas = rng.uniform(*THETA_RANGE, size=n_views)
    phis = rng.uniform(*PHI_RANGE, size=n_views)
    return [(float(t), float(p)) for t, p in zip(thetas, phis)]


def generate_training_views(
    spec: SceneSpec,
    n_views: int,
    height: int,
    width: int,
    radius: float = 4.0,
    focal_px: Optional[float] = None,
    seed: int = 0,
    near: float = 2.0,
    far: float = 6.0,
    n_samples: int = 128,
    workers: int = 1,
) -> list[PosedImage]:
    """
    Render posed views of the analytic scene from random orbit angles.

    Args:
        spec: Scene to render
        n_views: Number of views (>= 1)
        height: Image height in pixels
        width: Image width in pixels
        radius: Orbit radius
        focal_px: Focal length in pixels (lego field of view if None)
        seed: Seed for the view angles
        near: Ray start
        far: Ray end
        n_samples: Uniform quadrature samples per ray
        workers: Threads per render

    Returns:
        List of PosedImage
    """
    if n_views < 1:
        raise UsageError(f"n_views must be >= 1, got {n_views}")
    if focal_px is None:
        focal_px = focal_from_fov(width, DEFAULT_CAMERA_ANGLE_X)

    fields = scene_field_pair(spec)
    views = []
    for i, (theta, phi) in enumerate(sample_view_angles(n_views, seed)):
        c2w = pose_from_angles(theta, phi, radius)
        image = render_pose(
            fields, c2w, height, width, focal_px, near, far,
            n_coarse=n_samples, n_fine=0, background=spec.background, seed=None,
            workers=workers,
        )
        views.append(PosedImage(image=image, camera_to_world=c2w, focal_px=focal_px))
        logger.debug("Rendered view %d/%d (theta=%.1f, phi=%.1f)", i + 1, n_views, theta, phi)
    return views


__all__ = [
    "procedural_field_batch",
    "procedural_field",
    "scene_field_pair",
    "sample_view_angles",
    "generate_training_views",
]
