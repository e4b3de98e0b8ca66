"""Attacker sweeps, off-key statistics, capacity tables and keyspace estimates."""

import logging
import math
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Optional, Sequence, Union

import numpy as np

from ..autodiff import no_grad
from ..codec import decoding_accuracy, measured_rs_rate, rs_bpp_from_accuracy
from ..errors import UsageError
from ..extractor import extract_bits
from ..field import FieldParams
from ..models import (
    BitPlanes,
    CapacityRow,
    RsParams,
    StegoBundle,
    SweepReport,
    SweepRow,
    ViewKey,
)
from ..volume import render_pose
from .protocol import EmbedOptions, embed, extract_planes, message_planes

logger = logging.getLogger(__name__)

DEFAULT_OFFSETS = (0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 30.0, 60.0, 90.0)
AXES = ("theta", "phi", "both")

OFFKEY_THETA = (-90.0, -45.0, -20.0, -10.0, -5.0, 5.0, 10.0, 20.0, 45.0, 90.0)
OFFKEY_PHI = (0.0, -10.0, 10.0)

# A camera-to-world matrix (dataset pose) or a full key
View = Union[ViewKey, np.ndarray]


def offset_key(key: ViewKey, axis: str, offset: float) -> ViewKey:
    """Apply an angular offset to theta, phi or both."""
    if axis == "theta":
        return key.offset(d_theta=offset)
    if axis == "phi":
        return key.offset(d_phi=offset)
    if axis == "both":
        return key.offset(d_theta=offset, d_phi=offset)
    raise UsageError(f"Unknown sweep axis '{axis}' (expected one of {', '.join(AXES)})")


def offkey_grid(key: ViewKey) -> list[ViewKey]:
    """Off-key views: every theta offset in +-5..90 degrees crossed with phi offsets 0, +-10."""
    return [key.offset(d_theta=dt, d_phi=dp) for dt in OFFKEY_THETA for dp in OFFKEY_PHI]


def _map(fn, items: Sequence, workers: int) -> list:
    # one no_grad scope around the pool; renders inside threads nest in it
    with no_grad():
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                return list(pool.map(fn, items))
        return [fn(item) for item in items]


def attacker_sweep(
    bundle: StegoBundle,
    true_key: ViewKey,
    axis: str = "theta",
    offsets: Sequence[float] = DEFAULT_OFFSETS,
    true_planes: Optional[BitPlanes] = None,
    workers: int = 1,
) -> SweepReport:
    """
    Extract at angular offsets from the key and score each against the true planes.

    Args:
        bundle: Published bundle
        true_key: Key the bundle was embedded with
        axis: "theta", "phi" or "both"
        offsets: Offsets in degrees
        true_planes: Embedded planes (re-extracted at the true key if None)
        workers: Threads rendering rows in parallel

    Returns:
        SweepReport with rows sorted by offset
    """
    if axis not in AXES:
        raise UsageError(f"Unknown sweep axis '{axis}' (expected one of {', '.join(AXES)})")
    if not all(math.isfinite(o) for o in offsets):
        raise UsageError("Sweep offsets must be finite")
    depth = bundle.manifest.depth
    if true_planes is None:
        true_planes = extract_planes(bundle, true_key)

    def _row(offset: float) -> SweepRow:
        key = offset_key(true_key, axis, offset)
        planes = extract_planes(bundle, key)
        acc = decoding_accuracy(true_planes.bits, planes.bits)
        return SweepRow(
            theta_deg=key.theta_deg,
            phi_deg=key.phi_deg,
            offset_deg=float(offset),
            acc=acc,
            rs_bpp=rs_bpp_from_accuracy(depth, acc),
        )

    rows = _map(_row, sorted(float(o) for o in offsets), workers)
    for row in rows:
        logger.debug("sweep %s %+.3f deg: acc %.6f rs_bpp %.6f",
                     axis, row.offset_deg, row.acc, row.rs_bpp)
    return SweepReport(axis=axis, depth=depth, rows=rows)


def evaluate_views(
    bundle: StegoBundle,
    planes: BitPlanes,
    views: Sequence[View],
    intrinsics: Optional[ViewKey] = None,
    workers: int = 1,
    rs: Optional[RsParams] = None,
) -> list[tuple[float, Optional[float]]]:
    """
    Score extraction at arbitrary viewpoints.

    Keys render as themselves. Bare 4 x 4 poses use the resolution, focal
    length and near/far of ``intrinsics``.

    Returns:
        (accuracy, measured RS rate) per view; the rate is None when ``rs`` is
        None or the planes are shorter than one codeword
    """
    manifest = bundle.manifest
    measure = rs is not None and planes.bits.size >= 8 * rs.n

    def _score(view: View) -> tuple[float, Optional[float]]:
        if isinstance(view, ViewKey):
            got = extract_planes(bundle, view)
        else:
            if intrinsics is None:
                raise UsageError("Scoring a bare pose needs intrinsics from a key")
            image = render_pose(
                bundle.field, np.asarray(view), intrinsics.height, intrinsics.width,
                intrinsics.focal_px, intrinsics.near, intrinsics.far,
                n_coarse=manifest.n_coarse, n_fine=manifest.n_fine,
                background=manifest.background, seed=manifest.seed,
            )
            got = extract_bits(bundle.extractor, image)
        acc = decoding_accuracy(planes.bits, got.bits)
        rate = measured_rs_rate(manifest.depth, planes.bits, got.bits, rs) if measure else None
        return acc, rate

    return _map(_score, list(views), workers)


def capacity_evaluation(
    field_params: FieldParams,
    key: ViewKey,
    message: bytes,
    depths: Sequence[int],
    options: Optional[EmbedOptions] = None,
    offkey_views: Optional[Sequence[View]] = None,
    workers: int = 1,
) -> list[CapacityRow]:
    """
    Embed at every D and tabulate exactness, timing and off-key leakage.

    Training always runs the full epoch budget so both the first-exact epoch
    and the full-length timing are reported. Off-key views default to
    :func:`offkey_grid`.

    Raises:
        UsageError: If depths is empty
        EmbedError: Propagated when a depth does not converge
    """
    if not depths:
        raise UsageError("capacity_evaluation needs at least one depth")
    options = replace(options or EmbedOptions(), stop_at_perfect=False, extractor_config=None)
    views = list(offkey_views) if offkey_views is not None else offkey_grid(key)
    rs = options.rs or RsParams()

    rows = []
    for depth in depths:
        bundle, report = embed(field_params, key, message, depth, options)
        planes = message_planes(message, depth, key, options.rs)
        secret = decoding_accuracy(planes.bits, extract_planes(bundle, key, workers).bits)
        scores = evaluate_views(bundle, planes, views, intrinsics=key, workers=workers, rs=rs)
        accs = [acc for acc, _ in scores]
        rates = [rate for _, rate in scores if rate is not None]
        mean_acc = statistics.fmean(accs) if accs else float("nan")
        row = CapacityRow(
            depth=depth,
            epochs_to_100=report.epochs_to_100,
            wall_time=report.wall_time,
            full_epochs=report.full_epochs,
            full_wall_time=report.full_wall_time,
            secret_acc=secret,
            offkey_mean_acc=mean_acc,
            offkey_mean_rsbpp=rs_bpp_from_accuracy(depth, mean_acc) if accs else float("nan"),
            offkey_max_acc=max(accs) if accs else float("nan"),
            measured_rs_rate=statistics.fmean(rates) if rates else None,
        )
        logger.info("D=%d: exact after %s epochs, off-key mean acc %.4f",
                    depth, row.epochs_to_100, row.offkey_mean_acc)
        rows.append(row)
    return rows


def key_tolerance(report: SweepReport, depth: Optional[int] = None) -> Optional[float]:
    """Smallest |offset| at which rs_bpp drops below D/2, or None if it never does."""
    depth = report.depth if depth is None else depth
    hits = [abs(r.offset_deg) for r in report.rows if r.rs_bpp < depth / 2.0]
    return min(hits) if hits else None


def keyspace_bits(theta_tol_deg: float, phi_tol_deg: float) -> float:
    """log2 of distinguishable keys over theta in [-180, 180], phi in [-180, 0]."""
    if not (theta_tol_deg > 0 and phi_tol_deg > 0):
        raise UsageError("Angular tolerances must be positive")
    return math.log2((360.0 / theta_tol_deg) * (180.0 / phi_tol_deg))


__all__ = [
    "DEFAULT_OFFSETS",
    "AXES",
    "OFFKEY_THETA",
    "OFFKEY_PHI",
    "View",
    "offset_key",
    "offkey_grid",
    "attacker_sweep",
    "evaluate_views",
    "capacity_evaluation",
    "key_tolerance",
    "keyspace_bits",
]
