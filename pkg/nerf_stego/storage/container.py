"""
Single-file model container.

Layout::

    b"NRSG" | u32 LE version | u64 LE header_len | UTF-8 JSON header | payload

The header is ``{"model_type", "config", "tensors": [{name, shape, dtype,
byte_offset, byte_len}], ...}``; the payload concatenates little-endian
float32 tensors. Extra header keys are carried through and ignored.
"""

import json
import logging
import struct
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Union

import numpy as np

from .. import __version__
from ..autodiff import Tensor
from ..errors import ConfigError, DimensionError, FormatError
from ..extractor import ExtractorParams, weight_shapes
from ..field import FieldParams
from ..models import BundleManifest, ExtractorConfig, FieldConfig, StegoBundle

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

MAGIC = b"NRSG"
VERSION = 1
_PREAMBLE = struct.Struct("<4sIQ")
_F32 = np.dtype("<f4")

MODEL_TYPES = ("field", "extractor", "bundle")
FIELD_PREFIX = "field/"


@dataclass
class Container:
    """Decoded container: header metadata plus named float32 arrays."""
    model_type: str
    config: dict[str, Any]
    tensors: dict[str, np.ndarray]
    header: dict[str, Any] = field(default_factory=dict)


def encode_container(model_type: str, config: dict[str, Any],
                     tensors: dict[str, np.ndarray], **extra: Any) -> bytes:
    """Serialize tensors (cast to little-endian float32) with a JSON header."""
    entries, chunks, offset = [], [], 0
    for name, array in tensors.items():
        data = np.ascontiguousarray(array, dtype=_F32).tobytes()
        entries.append({
            "name": name,
            "shape": list(np.shape(array)),
            "dtype": "f32",
            "byte_offset": offset,
            "byte_len": len(data),
        })
        chunks.append(data)
        offset += len(data)
    header = {"model_type": model_type, "config": config, "tensors": entries, **extra}
    header_bytes = json.dumps(header, sort_keys=True, separators=(",", ":")).encode("utf-8")
    return _PREAMBLE.pack(MAGIC, VERSION, len(header_bytes)) + header_bytes + b"".join(chunks)


def _tensor_entry(entry: Any, index: int) -> tuple[str, tuple[int, ...], int, int]:
    where = f"tensors[{index}]"
    if not isinstance(entry, dict):
        raise FormatError(f"{where} must be an object")
    try:
        name, shape = entry["name"], entry["shape"]
        dtype, offset, length = entry["dtype"], entry["byte_offset"], entry["byte_len"]
    except KeyError as e:
        raise FormatError(f"{where}: missing field {e}") from e
    if not isinstance(name, str):
        raise FormatError(f"{where}: name must be a string")
    if dtype != "f32":
        raise FormatError(f"{where} ({name}): unsupported dtype {dtype!r}")
    if not isinstance(shape, list) or not all(isinstance(s, int) and s >= 0 for s in shape):
        raise FormatError(f"{where} ({name}): shape must be a list of non-negative integers")
    if not all(isinstance(v, int) and v >= 0 for v in (offset, length)):
        raise FormatError(f"{where} ({name}): byte_offset/byte_len must be non-negative integers")
    if length != 4 * int(np.prod(shape, dtype=np.int64)):
        raise FormatError(f"{where} ({name}): byte_len {length} does not match shape {shape}")
    return name, tuple(shape), offset, length


def decode_container(blob: bytes) -> Container:
    """
    Parse and validate container bytes.

    Raises:
        FormatError: On bad magic, unsupported version, malformed header,
            inconsistent tensor table or truncated payload
    """
    if len(blob) < _PREAMBLE.size:
        raise FormatError("Container truncated before the header")
    magic, version, header_len = _PREAMBLE.unpack_from(blob)
    if magic != MAGIC:
        raise FormatError(f"Bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"Unsupported container version {version}")
    payload_start = _PREAMBLE.size + header_len
    if payload_start > len(blob):
        raise FormatError("Container truncated inside the header")
    try:
        header = json.loads(blob[_PREAMBLE.size:payload_start].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FormatError(f"Container header is not valid JSON: {e}") from e
    if not isinstance(header, dict):
        raise FormatError("Container header must be a JSON object")

    model_type = header.get("model_type")
    if model_type not in MODEL_TYPES:
        raise FormatError(f"Unknown model_type {model_type!r}")
    config = header.get("config")
    if not isinstance(config, dict):
        raise FormatError("Container header lacks a config object")
    table = header.get("tensors")
    if not isinstance(table, list):
        raise FormatError("Container header lacks a tensors list")

    payload = memoryview(blob)[payload_start:]
    entries = [_tensor_entry(e, i) for i, e in enumerate(table)]
    total = sum(length for _, _, _, length in entries)
    if total != len(payload):
        raise FormatError(f"Tensor table covers {total} bytes but the payload has {len(payload)}")
    spans = sorted((offset, offset + length, name) for name, _, offset, length in entries)
    for (_, end, name), (start, _, other) in zip(spans, spans[1:]):
        if start < end:
            raise FormatError(f"Tensors {name} and {other} overlap")
    if spans and spans[-1][1] > len(payload):
        raise FormatError(f"Tensor {spans[-1][2]} extends past the payload")

    tensors: dict[str, np.ndarray] = {}
    for name, shape, offset, length in entries:
        if name in tensors:
            raise FormatError(f"Duplicate tensor name {name}")
        array = np.frombuffer(payload[offset:offset + length], dtype=_F32)
        tensors[name] = array.astype(np.float32).reshape(shape)
    return Container(model_type=model_type, config=config, tensors=tensors, header=header)


def write_container(path: PathLike, blob: bytes) -> Path:
    path = Path(path)
    path.write_bytes(blob)
    logger.debug("Wrote %d bytes to %s", len(blob), path)
    return path


def read_container(path: PathLike) -> Container:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except FileNotFoundError as e:
        raise FormatError(f"Model file not found: {path}") from e
    except IsADirectoryError as e:
        raise FormatError(f"{path} is a directory, not a model file") from e
    try:
        return decode_container(blob)
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from e


# Typed models


def _field_config(data: dict[str, Any]) -> FieldConfig:
    try:
        return FieldConfig(**data)
    except (TypeError, ConfigError) as e:
        raise FormatError(f"Invalid field config in container: {e}") from e


def _extractor_config(data: dict[str, Any]) -> ExtractorConfig:
    try:
        return ExtractorConfig(**data)
    except (TypeError, ConfigError, DimensionError) as e:
        raise FormatError(f"Invalid extractor config in container: {e}") from e


def _param(array: np.ndarray) -> Tensor:
    return Tensor(array, requires_grad=True)


def _field_tensors(params: FieldParams) -> dict[str, np.ndarray]:
    return {name: t.data for name, t in params.named_tensors().items()}


def _field_from(config: FieldConfig, tensors: dict[str, np.ndarray]) -> FieldParams:
    coarse = {k[len("coarse/"):]: _param(v) for k, v in tensors.items() if k.startswith("coarse/")}
    fine = {k[len("fine/"):]: _param(v) for k, v in tensors.items() if k.startswith("fine/")}
    if not coarse or set(coarse) != set(fine):
        raise FormatError("Field container must hold matching coarse/ and fine/ tensors")
    return FieldParams(coarse=coarse, fine=fine, config=config)


def _extractor_from(config: ExtractorConfig, tensors: dict[str, np.ndarray]) -> ExtractorParams:
    weights = {}
    for name, shape in weight_shapes(config).items():
        if name not in tensors:
            raise FormatError(f"Extractor container lacks tensor {name}")
        if tensors[name].shape != shape:
            raise FormatError(
                f"Tensor {name} has shape {tensors[name].shape}, config expects {shape}"
            )
        weights[name] = _param(tensors[name])
    return ExtractorParams(weights=weights, config=config)


def encode_field(params: FieldParams) -> bytes:
    return encode_container("field", asdict(params.config), _field_tensors(params),
                            creator=f"nerf-stego {__version__}")


def encode_extractor(params: ExtractorParams) -> bytes:
    tensors = {name: t.data for name, t in params.named_tensors().items()}
    return encode_container("extractor", asdict(params.config), tensors,
                            creator=f"nerf-stego {__version__}")


def encode_bundle(bundle: StegoBundle) -> bytes:
    """
    One publishable file: extractor tensors plus the field under ``field/``.

    Only the manifest and the two configs enter the header; the view key has
    no representation here.
    """
    tensors = {name: t.data for name, t in bundle.extractor.named_tensors().items()}
    tensors.update({FIELD_PREFIX + name: a for name, a in _field_tensors(bundle.field).items()})
    return encode_container(
        "bundle",
        asdict(bundle.extractor.config),
        tensors,
        field_config=asdict(bundle.field.config),
        manifest=bundle.manifest.to_dict(),
        creator=f"nerf-stego {__version__}",
    )


def save_field(path: PathLike, params: FieldParams) -> Path:
    return write_container(path, encode_field(params))


def save_extractor(path: PathLike, params: ExtractorParams) -> Path:
    return write_container(path, encode_extractor(params))


def save_bundle(path: PathLike, bundle: StegoBundle) -> Path:
    return write_container(path, encode_bundle(bundle))


def save_model(path: PathLike, model: Union[FieldParams, ExtractorParams, StegoBundle]) -> Path:
    """Write a field, extractor or bundle to a container file."""
    if isinstance(model, FieldParams):
        return save_field(path, model)
    if isinstance(model, ExtractorParams):
        return save_extractor(path, model)
    if isinstance(model, StegoBundle):
        return save_bundle(path, model)
    raise TypeError(f"Cannot save {type(model).__name__}")


def model_from_container(container: Container) -> Union[FieldParams, ExtractorParams, StegoBundle]:
    """Rebuild the typed model a container holds."""
    if container.model_type == "field":
        return _field_from(_field_config(container.config), container.tensors)
    config = _extractor_config(container.config)
    own = {k: v for k, v in container.tensors.items() if not k.startswith(FIELD_PREFIX)}
    extractor = _extractor_from(config, own)
    if container.model_type == "extractor":
        return extractor

    field_config = container.header.get("field_config")
    manifest = container.header.get("manifest")
    if not isinstance(field_config, dict) or not isinstance(manifest, dict):
        raise FormatError("Bundle header lacks field_config or manifest")
    field_tensors = {k[len(FIELD_PREFIX):]: v for k, v in container.tensors.items()
                     if k.startswith(FIELD_PREFIX)}
    try:
        parsed = BundleManifest.from_dict(manifest)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"Malformed bundle manifest: {e}") from e
    if (parsed.depth, parsed.height, parsed.width) != (config.depth, config.height, config.width):
        raise FormatError("Bundle manifest dimensions disagree with the extractor config")
    return StegoBundle(
        field=_field_from(_field_config(field_config), field_tensors),
        extractor=extractor,
        manifest=parsed,
    )


def load_model(path: PathLike) -> Union[FieldParams, ExtractorParams, StegoBundle]:
    """Read any container file and return the model it holds."""
    return model_from_container(read_container(path))


def _load_as(path: PathLike, kind: type, label: str) -> Any:
    model = load_model(path)
    if not isinstance(model, kind):
        raise FormatError(f"{path} holds a {type(model).__name__}, expected a {label}")
    return model


def load_field(path: PathLike) -> FieldParams:
    """Load a field; a bundle's embedded field is accepted too."""
    model = load_model(path)
    if isinstance(model, StegoBundle):
        return model.field
    if not isinstance(model, FieldParams):
        raise FormatError(f"{path} holds an extractor, expected a field")
    return model


def load_extractor(path: PathLike) -> ExtractorParams:
    return _load_as(path, ExtractorParams, "extractor")


def load_bundle(path: PathLike) -> StegoBundle:
    return _load_as(path, StegoBundle, "bundle")


__all__ = [
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
