"""Command handlers: the work behind every CLI and shell command."""

import logging
from pathlib import Path
from typing import Optional, Sequence

from ..config import PROFILES, Profile
from ..errors import FormatError, UsageError
from ..field import FieldParams, evaluate_psnr, train_field
from ..models import (
    CapacityRow,
    EmbedReport,
    ExtractedMessage,
    FieldSummary,
    PosedImage,
    RsParams,
    SceneSpec,
    StegoBundle,
    SweepReport,
    ViewKey,
)
from ..pipeline import (
    DEFAULT_OFFSETS,
    EmbedOptions,
    attacker_sweep,
    capacity_evaluation,
    embed,
    extract_message,
)
from ..render import training_progress
from ..scene import generate_training_views, load_nerf_synthetic
from ..storage import (
    Container,
    load_bundle,
    load_field,
    load_key,
    load_model,
    read_container,
    save_bundle,
    save_field,
    save_key,
    write_image,
    write_report,
)
from ..volume import WHITE, render_image

logger = logging.getLogger(__name__)

PROCEDURAL = "procedural"


def read_message(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except FileNotFoundError as e:
        raise FormatError(f"Message file not found: {path}") from e
    except IsADirectoryError as e:
        raise FormatError(f"{path} is a directory, not a message file") from e


class Handlers:
    """Command handlers bound to a profile, a seed and a worker count."""

    def __init__(self, profile: Optional[Profile] = None, seed: int = 0, workers: int = 1):
        """Initialize handlers with run settings."""
        self.profile = profile or PROFILES["desk"]
        self.seed = seed
        self.workers = max(1, workers)

    def configured(self, profile: Optional[Profile] = None, seed: Optional[int] = None,
                   workers: Optional[int] = None) -> "Handlers":
        """Copy with some settings replaced."""
        return Handlers(
            profile=profile or self.profile,
            seed=self.seed if seed is None else seed,
            workers=self.workers if workers is None else workers,
        )

    # Field

    def load_views(self, scene: str, resolution: int, n_views: int) -> list[PosedImage]:
        """Procedural views rendered from the sphere scene, or a NeRF-Synthetic directory."""
        p = self.profile
        if scene == PROCEDURAL:
            return generate_training_views(
                SceneSpec.default(), n_views, resolution, resolution, radius=p.radius,
                seed=self.seed, near=p.near, far=p.far, workers=self.workers,
            )
        return load_nerf_synthetic(scene, resolution=resolution)

    def train_nerf(
        self,
        scene: str,
        out: str,
        iters: Optional[int] = None,
        res: Optional[int] = None,
        holdout: int = 0,
        views: Optional[int] = None,
        lr: Optional[float] = None,
    ) -> FieldSummary:
        """
        Train a radiance field and save it.

        Args:
            scene: "procedural" or a NeRF-Synthetic directory
            out: Output container path
            iters: Training iterations (profile default if None)
            res: Square image resolution
            holdout: Views kept out of training and scored by PSNR
            views: Procedural view count
            lr: Adam learning rate
        """
        p = self.profile
        iters = iters or p.field_iters
        res = res or p.resolution
        dataset = self.load_views(scene, res, views or p.n_views)
        if holdout < 0 or holdout >= len(dataset):
            raise UsageError(f"--holdout must leave at least one of {len(dataset)} views for training")
        train, held = dataset[:len(dataset) - holdout], dataset[len(dataset) - holdout:]

        with training_progress(iters, "Training field") as progress:
            params, trace = train_field(
                train, p.field, iters=iters, batch_rays=p.batch_rays, lr=lr or p.field_lr,
                seed=self.seed, n_coarse=p.n_coarse, n_fine=p.n_fine, near=p.near, far=p.far,
                background=WHITE, progress=progress,
            )
        save_field(out, params)
        logger.info("Wrote field to %s", out)
        scores = evaluate_psnr(params, held, p.n_coarse, p.n_fine, p.near, p.far, WHITE,
                               self.seed) if held else []
        return FieldSummary(
            iters=iters,
            final_loss=trace.losses[-1],
            total_time=trace.total_time,
            n_views=len(train),
            out=str(out),
            holdout_psnr=scores,
        )

    # Keys and rendering

    def keygen(self, theta: float, phi: float, out: str, res: Optional[int] = None,
               radius: Optional[float] = None) -> ViewKey:
        """Write a view key file."""
        p = self.profile
        res = res or p.resolution
        key = ViewKey(
            theta_deg=theta,
            phi_deg=phi,
            radius=radius or p.radius,
            width=res,
            height=res,
            near=p.near,
            far=p.far,
        )
        save_key(out, key)
        logger.info("Wrote key to %s", out)
        return key

    def render(self, model: str, key: str, out: str) -> str:
        """Render the key's view of a field (or of a bundle's field) to PPM/PNG."""
        loaded = load_model(model)
        view = load_key(key)
        if isinstance(loaded, StegoBundle):
            m = loaded.manifest
            image = render_image(loaded.field, view, m.n_coarse, m.n_fine, m.background,
                                 m.seed, self.workers)
        elif isinstance(loaded, FieldParams):
            image = render_image(loaded, view, self.profile.n_coarse, self.profile.n_fine,
                                 WHITE, self.seed, self.workers)
        else:
            raise FormatError(f"{model} holds an extractor; render needs a field or a bundle")
        write_image(out, image)
        return f"Wrote {out} ({view.width}x{view.height})"

    # Steganography

    def embed_options(self, epochs: Optional[int], lr: Optional[float],
                      rs: Optional[RsParams]) -> EmbedOptions:
        p = self.profile
        return EmbedOptions(
            epochs=epochs or p.epochs,
            lr=lr or p.extractor_lr,
            seed=self.seed,
            n_coarse=p.n_coarse,
            n_fine=p.n_fine,
            background=WHITE,
            rs=rs,
            workers=self.workers,
        )

    def embed(
        self,
        model: str,
        key: str,
        message: str,
        depth: int,
        out: str,
        epochs: Optional[int] = None,
        lr: Optional[float] = None,
        rs: Optional[RsParams] = None,
    ) -> EmbedReport:
        """Train the extractor for a message and publish field + extractor as one bundle."""
        field = load_field(model)
        view = load_key(key)
        payload = read_message(message)
        options = self.embed_options(epochs, lr, rs)
        with training_progress(options.epochs, f"Embedding D={depth}") as progress:
            options.progress = progress
            bundle, report = embed(field, view, payload, depth, options)
        save_bundle(out, bundle)
        logger.info("Wrote bundle to %s", out)
        return report

    def extract(self, model: str, key: str, out: Optional[str] = None) -> ExtractedMessage:
        """Recover a message from a bundle with a key."""
        bundle = load_bundle(model)
        message = extract_message(bundle, load_key(key), self.workers)
        if out:
            Path(out).write_bytes(message)
        return ExtractedMessage(message=message, out=out)

    # Evaluation

    def sweep(
        self,
        model: str,
        key: str,
        axis: str = "theta",
        offsets: Sequence[float] = DEFAULT_OFFSETS,
        out: Optional[str] = None,
    ) -> SweepReport:
        """Attacker sweep around the true key."""
        bundle = load_bundle(model)
        report = attacker_sweep(bundle, load_key(key), axis, offsets, workers=self.workers)
        if out:
            write_report(out, report)
            logger.info("Wrote sweep to %s", out)
        return report

    def capacity(
        self,
        model: str,
        key: str,
        message: str,
        depths: Sequence[int] = (1, 2, 3),
        out: Optional[str] = None,
        epochs: Optional[int] = None,
        lr: Optional[float] = None,
        scene: Optional[str] = None,
        rs: Optional[RsParams] = None,
    ) -> list[CapacityRow]:
        """Capacity table over depths; dataset poses serve as off-key views when given."""
        field = load_field(model)
        view = load_key(key)
        offkey = None
        if scene and scene != PROCEDURAL:
            offkey = [v.camera_to_world for v in load_nerf_synthetic(scene, resolution=view.width)]
        rows = capacity_evaluation(field, view, read_message(message), list(depths),
                                   self.embed_options(epochs, lr, rs), offkey, self.workers)
        if out:
            write_report(out, rows)
            logger.info("Wrote capacity table to %s", out)
        return rows

    def inspect(self, model: str) -> Container:
        """Container header and tensor table."""
        return read_container(model)


__all__ = ["Handlers", "read_message", "PROCEDURAL"]
