"""Files: model containers, key files, images and report exports."""

from .images import to_uint8, write_image, read_image, resize_image
from .keyfile import KEY_FIELDS, key_from_dict, save_key, load_key
from .reports import (
    SWEEP_COLUMNS,
    CAPACITY_COLUMNS,
    sweep_csv,
    sweep_json,
    capacity_csv,
    capacity_json,
    write_report,
)
from .container import (
    MAGIC,
    VERSION,
    MODEL_TYPES,
    Container,
    encode_container,
    decode_container,
    write_container,
    read_container,
    encode_field,
    encode_extractor,
    encode_bundle,
    save_field,
    save_extractor,
    save_bundle,
    save_model,
    model_from_container,
    load_model,
    load_field,
    load_extractor,
    load_bundle,
)

__all__ = [
    "to_uint8",
    "write_image",
    "read_image",
    "resize_image",
    "KEY_FIELDS",
    "key_from_dict",
    "save_key",
    "load_key",
    "SWEEP_COLUMNS",
    "CAPACITY_COLUMNS",
    "sweep_csv",
    "sweep_json",
    "capacity_csv",
    "capacity_json",
    "write_report",
    "MAGIC",
    "VERSION",
    "MODEL_TYPES",
    "Container",
    "encode_container",
    "decode_container",
    "write_container",
    "read_container",
    "encode_field",
    "encode_extractor",
    "encode_bundle",
    "save_field",
    "save_extractor",
    "save_bundle",
    "save_model",
    "model_from_container",
    "load_model",
    "load_field",
    "load_extractor",
    "load_bundle",
]
