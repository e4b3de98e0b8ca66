"""Orbit camera poses and pinhole ray generation."""

import math
from dataclasses import dataclass

import numpy as np

from ..models import Ray, ViewKey

# Axis permutation of the synthetic orbit rig (det = +1)
_ORBIT_FLIP = np.array(
    [
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ]
)


def _translate_z(radius: float) -> np.ndarray:
    m = np.eye(4)
    m[2, 3] = radius
    return m


def _rotate_phi(phi: float) -> np.ndarray:
    c, s = math.cos(phi), math.sin(phi)
    return np.array(
        [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, c, -s, 0.0],
            [0.0, s, c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def _rotate_theta(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [c, 0.0, -s, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [s, 0.0, c, 0.0],
            [0.0, 0.0, 0.0, 1.0],
        ]
    )


def pose_from_angles(theta_deg: float, phi_deg: float, radius: float) -> np.ndarray:
    """
    Camera-to-world matrix of an orbit camera looking at the origin.

    c2w = F @ R_theta @ R_phi @ T_radius

    Args:
        theta_deg: Horizontal rotation in degrees
        phi_deg: Vertical rotation in degrees
        radius: Distance of the camera center from the origin

    Returns:
        4x4 float64 matrix
    """
    c2w = _translate_z(radius)
    c2w = _rotate_phi(math.radians(phi_deg)) @ c2w
    c2w = _rotate_theta(math.radians(theta_deg)) @ c2w
    return _ORBIT_FLIP @ c2w


@dataclass
class RayBundle:
    """Grid of rays sharing one pinhole origin."""
    origins: np.ndarray  # H x W x 3
    directions: np.ndarray  # H x W x 3, unit length
    near: float
    far: float

    @property
    def height(self) -> int:
        return int(self.origins.shape[0])

    @property
    def width(self) -> int:
        return int(self.origins.shape[1])

    def ray(self, row: int, col: int) -> Ray:
        return Ray(self.origins[row, col], self.directions[row, col], self.near, self.far)

    def flat(self) -> tuple[np.ndarray, np.ndarray]:
        """Row-major (H*W) x 3 origins and directions."""
        return self.origins.reshape(-1, 3), self.directions.reshape(-1, 3)


def rays_from_pose(
    camera_to_world: np.ndarray,
    height: int,
    width: int,
    focal_px: float,
    near: float = 2.0,
    far: float = 6.0,
) -> RayBundle:
    """
    Generate one ray per pixel center for an arbitrary pose.

    Camera-space direction for column i, row j is
    ((i + 0.5 - W/2) / f, -(j + 0.5 - H/2) / f, -1).
    """
    cols, rows = np.meshgrid(np.arange(width, dtype=np.float64),
                             np.arange(height, dtype=np.float64), indexing="xy")
    dirs_cam = np.stack(
        [
            (cols + 0.5 - width / 2.0) / focal_px,
            -(rows + 0.5 - height / 2.0) / focal_px,
            -np.ones_like(cols),
        ],
        axis=-1,
    )
    rotation = camera_to_world[:3, :3]
    dirs = dirs_cam @ rotation.T
    dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
    origins = np.broadcast_to(camera_to_world[:3, 3], dirs.shape).copy()
    return RayBundle(origins=origins, directions=dirs, near=near, far=far)


def camera_rays(key: ViewKey) -> RayBundle:
    """Rays of the view selected by a key."""
    c2w = pose_from_angles(key.theta_deg, key.phi_deg, key.radius)
    return rays_from_pose(c2w, key.height, key.width, key.focal_px, key.near, key.far)


__all__ = ["pose_from_angles", "RayBundle", "rays_from_pose", "camera_rays"]
