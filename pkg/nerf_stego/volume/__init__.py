"""Camera keys, ray generation and volume rendering."""

from .camera import pose_from_angles, RayBundle, rays_from_pose, camera_rays
from .sampling import pixel_uniforms, stratified_samples, hierarchical_resample
from .renderer import (
    FieldFn,
    FieldPair,
    as_field_pair,
    Composite,
    RayBatchResult,
    WHITE,
    sample_deltas,
    composite,
    render_rays,
    render_ray,
    render_bundle,
    render_image,
    render_pose,
)

__all__ = [
    "pose_from_angles",
    "RayBundle",
    "rays_from_pose",
    "camera_rays",
    "pixel_uniforms",
    "stratified_samples",
    "hierarchical_resample",
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
