"""Named configuration profiles and JSON overrides."""

import json
import logging
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional, Union

from .errors import ConfigError
from .models import FieldConfig

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass(frozen=True)
class Profile:
    """Everything a command needs besides its explicit flags."""
    name: str
    resolution: int = 64
    field: FieldConfig = field(default_factory=FieldConfig)
    n_coarse: int = 64
    n_fine: int = 64
    n_views: int = 20
    field_iters: int = 20000
    batch_rays: int = 1024
    field_lr: float = 5e-4
    extractor_lr: float = 1e-4
    epochs: int = 2000
    radius: float = 4.0
    near: float = 2.0
    far: float = 6.0

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


PROFILES: dict[str, Profile] = {
    "desk": Profile(name="desk"),
    "paper": Profile(
        name="paper",
        resolution=180,
        field=FieldConfig.paper(),
        n_coarse=64,
        n_fine=128,
        n_views=100,
        field_iters=200000,
        extractor_lr=1e-5,
        epochs=1000,
    ),
}

_FIELD_KEYS = {f.name for f in fields(FieldConfig)}


def apply_overrides(profile: Profile, overrides: dict[str, Any]) -> Profile:
    """
    Return the profile with JSON overrides applied.

    Raises:
        ConfigError: On unknown keys or values the dataclasses reject
    """
    known = {f.name for f in fields(Profile)} - {"name"}
    unknown = sorted(set(overrides) - known)
    if unknown:
        raise ConfigError(f"Unknown configuration key(s): {', '.join(unknown)}")
    values = dict(overrides)
    if "field" in values:
        field_values = values["field"]
        if not isinstance(field_values, dict):
            raise ConfigError("'field' must be an object")
        bad = sorted(set(field_values) - _FIELD_KEYS)
        if bad:
            raise ConfigError(f"Unknown field configuration key(s): {', '.join(bad)}")
        values["field"] = replace(profile.field, **field_values)
    for key, value in values.items():
        if key == "field":
            continue
        expected = type(getattr(profile, key))
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"'{key}' must be a number")
        if expected is int and int(value) != value:
            raise ConfigError(f"'{key}' must be an integer")
        values[key] = expected(value)
    return replace(profile, **values)


def load_profile(name: str = "desk", config_path: Optional[PathLike] = None) -> Profile:
    """
    Resolve a preset, then apply a JSON config file on top of it.

    Raises:
        ConfigError: Unknown preset, unreadable file or invalid keys
    """
    if name not in PROFILES:
        raise ConfigError(f"Unknown profile '{name}' (choose from {', '.join(PROFILES)})")
    profile = PROFILES[name]
    if config_path is None:
        return profile
    path = Path(config_path)
    try:
        overrides = json.loads(path.read_text())
    except FileNotFoundError as e:
        raise ConfigError(f"Config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON ({e})") from e
    if not isinstance(overrides, dict):
        raise ConfigError(f"{path}: top level must be an object")
    logger.debug("Applying %d override(s) from %s to profile %s", len(overrides), path, name)
    return apply_overrides(profile, overrides)


__all__ = ["Profile", "PROFILES", "apply_overrides", "load_profile"]
