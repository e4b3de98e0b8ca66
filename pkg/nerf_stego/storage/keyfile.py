"""View key files: a small JSON object shared out of band."""

import json
from pathlib import Path
from typing import Any, Union

from ..errors import FormatError, UsageError
from ..models import ViewKey

PathLike = Union[str, Path]

KEY_FIELDS = ("theta_deg", "phi_deg", "radius", "focal_px", "width", "height", "near", "far")
_INT_FIELDS = ("width", "height")


def key_from_dict(data: Any) -> ViewKey:
    """
    Build a ViewKey from its JSON object.

    theta_deg and phi_deg are required; the rest fall back to ViewKey defaults.

    Raises:
        FormatError: On missing, mistyped or out-of-range fields
    """
    if not isinstance(data, dict):
        raise FormatError("Key file must contain a JSON object")
    for required in ("theta_deg", "phi_deg"):
        if required not in data:
            raise FormatError(f"Key file is missing '{required}'")
    values: dict[str, Any] = {}
    for name in KEY_FIELDS:
        if name not in data or (name == "focal_px" and data[name] is None):
            continue
        value = data[name]
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise FormatError(f"Key field '{name}' must be a number")
        if name in _INT_FIELDS:
            if int(value) != value:
                raise FormatError(f"Key field '{name}' must be an integer")
            value = int(value)
        values[name] = value
    try:
        return ViewKey(**values)
    except UsageError as e:
        raise FormatError(f"Invalid key: {e}") from e


def save_key(path: PathLike, key: ViewKey) -> Path:
    path = Path(path)
    path.write_text(json.dumps(key.to_dict(), indent=2) + "\n")
    return path


def load_key(path: PathLike) -> ViewKey:
    """Read a key file written by save_key (or by hand)."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise FormatError(f"Key file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}: invalid JSON ({e})") from e
    return key_from_dict(data)


__all__ = ["KEY_FIELDS", "key_from_dict", "save_key", "load_key"]
