"""Image files: PNG and binary PPM (P6), 8-bit."""

from pathlib import Path
from typing import Sequence, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from ..errors import FormatError

PathLike = Union[str, Path]


def to_uint8(image: np.ndarray) -> np.ndarray:
    """3 x H x W floats in [0, 1] -> H x W x 3 bytes."""
    clipped = np.clip(image, 0.0, 1.0)
    return np.round(clipped.transpose(1, 2, 0) * 255.0).astype(np.uint8)


def write_image(path: PathLike, image: np.ndarray) -> Path:
    """
    Write a 3 x H x W image; ``.png`` selects PNG, anything else PPM (P6, maxval 255).

    Returns:
        The written path
    """
    path = Path(path)
    fmt = "PNG" if path.suffix.lower() == ".png" else "PPM"
    Image.fromarray(to_uint8(image)).save(path, format=fmt)
    return path


def read_image(path: PathLike, background: Sequence[float] = (1.0, 1.0, 1.0)) -> np.ndarray:
    """
    Decode a PNG or PPM file into 3 x H x W float32 values in [0, 1].

    Transparent pixels are composited over ``background``.

    Raises:
        FormatError: If the file is missing or not a decodable image
    """
    path = Path(path)
    try:
        with Image.open(path) as img:
            img.load()
            if img.mode in ("RGBA", "LA") or "transparency" in img.info:
                rgba = np.asarray(img.convert("RGBA"), dtype=np.float32) / 255.0
                alpha = rgba[..., 3:4]
                bg = np.asarray(background, dtype=np.float32).reshape(1, 1, 3)
                rgb = rgba[..., :3] * alpha + bg * (1.0 - alpha)
            else:
                rgb = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
    except FileNotFoundError as e:
        raise FormatError(f"Image not found: {path}") from e
    except (UnidentifiedImageError, OSError) as e:
        raise FormatError(f"Cannot decode image {path}: {e}") from e
    return np.clip(rgb, 0.0, 1.0).transpose(2, 0, 1).copy()


def resize_image(image: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resize of a 3 x H x W float image, channel by channel."""
    if image.shape[1] == height and image.shape[2] == width:
        return image.astype(np.float32)
    channels = []
    for channel in image.astype(np.float32):
        resized = Image.fromarray(channel).resize((width, height), Image.Resampling.BILINEAR)
        channels.append(np.asarray(resized, dtype=np.float32))
    return np.clip(np.stack(channels), 0.0, 1.0)


__all__ = ["to_uint8", "write_image", "read_image", "resize_image"]
