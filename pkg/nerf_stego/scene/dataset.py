"""NeRF-Synthetic (Blender) dataset reader and writer."""

import json
import logging
import math
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np

from ..errors import FormatError, UsageError
from ..models import PosedImage, focal_from_fov
from ..storage.images import read_image, resize_image, write_image

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def _require(data: dict[str, Any], field: str, where: str) -> Any:
    if field not in data:
        raise FormatError(f"{where}: missing field '{field}'")
    return data[field]


def _parse_matrix(value: Any, where: str) -> np.ndarray:
    try:
        matrix = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise FormatError(f"{where}: transform_matrix is not numeric") from e
    if matrix.shape != (4, 4) or not np.all(np.isfinite(matrix)):
        raise FormatError(f"{where}: transform_matrix must be a finite 4x4 matrix")
    return matrix


def _image_path(root: Path, file_path: str) -> Path:
    path = root / file_path
    if path.suffix == "":
        path = path.with_suffix(".png")
    return path


def load_nerf_synthetic(
    dir_path: PathLike,
    downscale: int = 1,
    resolution: Optional[int] = None,
    split: str = "train",
    background: Sequence[float] = (1.0, 1.0, 1.0),
) -> list[PosedImage]:
    """
    Load posed images from a ``transforms_<split>.json`` directory.

    Args:
        dir_path: Dataset directory
        downscale: Integer factor applied to both image axes
        resolution: Resize to resolution x resolution instead (e.g. 800 -> 180)
        split: Which transforms file to read
        background: Color behind transparent pixels

    Returns:
        One PosedImage per frame; focal_px = 0.5 * W / tan(0.5 * camera_angle_x)
        for the final width W, poses verbatim from transform_matrix

    Raises:
        FormatError: On missing/malformed JSON fields or missing images
    """
    if downscale < 1:
        raise UsageError(f"downscale must be a positive integer, got {downscale}")
    root = Path(dir_path)
    transforms = root / f"transforms_{split}.json"
    try:
        meta = json.loads(transforms.read_text())
    except FileNotFoundError as e:
        raise FormatError(f"{transforms} not found") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"{transforms}: invalid JSON ({e})") from e
    if not isinstance(meta, dict):
        raise FormatError(f"{transforms}: top level must be an object")

    angle = _require(meta, "camera_angle_x", transforms.name)
    if not isinstance(angle, (int, float)) or not 0 < angle < math.pi:
        raise FormatError(f"{transforms.name}: camera_angle_x must be a number in (0, pi)")
    frames = _require(meta, "frames", transforms.name)
    if not isinstance(frames, list) or not frames:
        raise FormatError(f"{transforms.name}: frames must be a non-empty list")

    poses, paths = [], []
    for i, frame in enumerate(frames):
        where = f"{transforms.name} frames[{i}]"
        if not isinstance(frame, dict):
            raise FormatError(f"{where}: frame must be an object")
        poses.append(_parse_matrix(_require(frame, "transform_matrix", where), where))
        file_path = _require(frame, "file_path", where)
        if not isinstance(file_path, str):
            raise FormatError(f"{where}: file_path must be a string")
        paths.append(_image_path(root, file_path))

    missing = [p for p in paths if not p.exists()]
    if missing:
        raise FormatError(
            f"{transforms.name}: {len(frames)} poses but only {len(frames) - len(missing)} "
            f"images (first missing: {missing[0]})"
        )

    views = []
    for pose, path in zip(poses, paths):
        image = read_image(path, background)
        if resolution is not None:
            image = resize_image(image, resolution, resolution)
        elif downscale > 1:
            image = resize_image(image, image.shape[1] // downscale, image.shape[2] // downscale)
        focal = focal_from_fov(image.shape[2], float(angle))
        views.append(PosedImage(image=image, camera_to_world=pose, focal_px=focal))
    logger.info("Loaded %d views from %s", len(views), root)
    return views


def write_nerf_synthetic(
    dir_path: PathLike,
    views: Sequence[PosedImage],
    split: str = "train",
) -> Path:
    """
    Write views as a NeRF-Synthetic directory (PNG images + transforms JSON).

    Returns:
        Path of the transforms file
    """
    if not views:
        raise UsageError("No views to write")
    root = Path(dir_path)
    (root / split).mkdir(parents=True, exist_ok=True)
    width = views[0].width
    angle = 2.0 * math.atan(0.5 * width / views[0].focal_px)
    frames = []
    for i, view in enumerate(views):
        name = f"./{split}/r_{i}"
        write_image(root / f"{name}.png", view.image)
        frames.append({"file_path": name, "transform_matrix": view.camera_to_world.tolist()})
    transforms = root / f"transforms_{split}.json"
    transforms.write_text(json.dumps({"camera_angle_x": angle, "frames": frames}, indent=2))
    return transforms


__all__ = ["load_nerf_synthetic", "write_nerf_synthetic"]
