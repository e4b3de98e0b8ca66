"""Sender and receiver sides: embed a message behind a view key, extract it back."""

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .. import __version__
from ..codec import bits_to_planes, planes_to_bits, rs_decode_message, rs_encode_message
from ..errors import DimensionError, EmbedError
from ..extractor import extract_bits, train_extractor
from ..field import FieldParams
from ..models import (
    BitPlanes,
    BundleManifest,
    EmbedReport,
    ExtractorConfig,
    RsParams,
    StegoBundle,
    ViewKey,
)
from ..volume import WHITE, render_image

logger = logging.getLogger(__name__)


@dataclass
class EmbedOptions:
    """Training and rendering settings for one embed."""
    epochs: int = 1000
    lr: float = 1e-5
    seed: int = 0
    n_coarse: int = 64
    n_fine: int = 64
    background: tuple[float, float, float] = WHITE
    stop_at_perfect: bool = True
    rs: Optional[RsParams] = None
    extractor_config: Optional[ExtractorConfig] = None
    zero_init_output: bool = False
    workers: int = 1
    progress: Optional[Callable[[int, float, float], None]] = None


def frame_payload(message: bytes, rs: Optional[RsParams]) -> bytes:
    """Bytes that go into the bit planes: the message, RS-encoded when rs is set."""
    return rs_encode_message(message, rs) if rs is not None else bytes(message)


def message_planes(message: bytes, depth: int, key: ViewKey,
                   rs: Optional[RsParams] = None) -> BitPlanes:
    return bits_to_planes(frame_payload(message, rs), depth, key.height, key.width)


def render_secret_view(field_params: FieldParams, key: ViewKey, n_coarse: int, n_fine: int,
                       background: Sequence[float], seed: int, workers: int = 1):
    """The trigger image: the field rendered at the key's viewpoint."""
    return render_image(field_params, key, n_coarse, n_fine, background, seed, workers)


def embed(
    field_params: FieldParams,
    key: ViewKey,
    message: bytes,
    depth: int,
    options: Optional[EmbedOptions] = None,
) -> tuple[StegoBundle, EmbedReport]:
    """
    Hide a message behind a viewpoint of a trained field.

    Renders the key's view, frames the message into D x H x W planes and
    overfits a fresh extractor to map that one image to those planes. Equal
    inputs and seeds give byte-identical bundles.

    Args:
        field_params: Trained radiance field (published as is)
        key: Secret viewpoint
        message: Payload bytes
        depth: Bits per pixel D
        options: Training/rendering settings

    Returns:
        (bundle without the key, training report)

    Raises:
        CapacityError: If the message does not fit
        EmbedError: If the extractor is not exact after the epoch budget
    """
    options = options or EmbedOptions()
    planes = message_planes(message, depth, key, options.rs)
    image = render_secret_view(field_params, key, options.n_coarse, options.n_fine,
                               options.background, options.seed, options.workers)
    config = options.extractor_config or ExtractorConfig.for_resolution(
        depth, key.height, key.width
    )
    if (config.depth, config.height, config.width) != (depth, key.height, key.width):
        raise DimensionError("Extractor config does not match the key resolution and depth")

    extractor, trace = train_extractor(
        image,
        planes,
        epochs=options.epochs,
        lr=options.lr,
        seed=options.seed,
        stop_at_perfect=options.stop_at_perfect,
        config=config,
        zero_init_output=options.zero_init_output,
        progress=options.progress,
    )
    if trace.accuracies[-1] < 1.0:
        raise EmbedError(
            f"Extractor reached {trace.accuracies[-1]:.4f} bit accuracy after {options.epochs} "
            f"epochs at D={depth}; raise --epochs or lower --depth",
            epochs=options.epochs,
        )

    manifest = BundleManifest(
        depth=depth,
        height=key.height,
        width=key.width,
        n_coarse=options.n_coarse,
        n_fine=options.n_fine,
        background=tuple(float(c) for c in options.background),
        created=f"nerf-stego {__version__}",
        seed=options.seed,
        payload_bytes=len(message),
        rs_n=options.rs.n if options.rs else None,
        rs_k=options.rs.k if options.rs else None,
    )
    report = EmbedReport(
        depth=depth,
        epochs_to_100=trace.epochs_to_perfect,
        wall_time=trace.time_to_perfect,
        full_epochs=len(trace.losses) - 1,
        full_wall_time=trace.total_time,
        final_loss=trace.losses[-1],
        trace=trace,
    )
    logger.info("Embedded %d bytes at D=%d (exact after %s epochs)",
                len(message), depth, trace.epochs_to_perfect)
    return StegoBundle(field=field_params, extractor=extractor, manifest=manifest), report


def check_key(bundle: StegoBundle, key: ViewKey) -> None:
    manifest = bundle.manifest
    if (key.height, key.width) != (manifest.height, manifest.width):
        raise DimensionError(
            f"Key renders {key.height}x{key.width} but the bundle expects "
            f"{manifest.height}x{manifest.width}"
        )


def extract_planes(bundle: StegoBundle, key: ViewKey, workers: int = 1) -> BitPlanes:
    """Render the key's view with the bundle's settings and threshold the extractor output."""
    check_key(bundle, key)
    manifest = bundle.manifest
    image = render_image(bundle.field, key, manifest.n_coarse, manifest.n_fine,
                         manifest.background, manifest.seed, workers)
    return extract_bits(bundle.extractor, image)


def extract_message(bundle: StegoBundle, key: ViewKey, workers: int = 1) -> bytes:
    """
    Recover the message a bundle hides behind ``key``.

    Raises:
        DimensionError: If the key resolution differs from the bundle's
        CorruptionError: If the planes do not frame a message (wrong key)
        RsDecodeError: If RS protection is on and a block is uncorrectable
    """
    payload = planes_to_bits(extract_planes(bundle, key, workers))
    rs = bundle.rs_params
    if rs is not None:
        return rs_decode_message(payload, rs)
    return payload


__all__ = [
    "EmbedOptions",
    "frame_payload",
    "message_planes",
    "render_secret_view",
    "embed",
    "check_key",
    "extract_planes",
    "extract_message",
]
