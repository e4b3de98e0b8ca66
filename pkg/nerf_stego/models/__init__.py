"""Data models for keys, scenes, messages and experiment reports."""

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Any, Optional

import numpy as np

from ..errors import ConfigError, DimensionError, RsParameterError, UsageError

if TYPE_CHECKING:
    from ..extractor import ExtractorParams
    from ..field import FieldParams


# camera_angle_x of the NeRF-Synthetic lego rig
DEFAULT_CAMERA_ANGLE_X = 0.6911112070083618


def focal_from_fov(width: int, camera_angle_x: float) -> float:
    """Pinhole focal length in pixels for a horizontal field of view."""
    return 0.5 * width / math.tan(0.5 * camera_angle_x)


@dataclass(frozen=True)
class ViewKey:
    """Secret camera viewpoint: extrinsic angles plus intrinsics."""
    theta_deg: float
    phi_deg: float
    radius: float = 4.0
    focal_px: Optional[float] = None
    width: int = 64
    height: int = 64
    near: float = 2.0
    far: float = 6.0

    def __post_init__(self):
        if self.focal_px is None:
            object.__setattr__(self, "focal_px", focal_from_fov(self.width, DEFAULT_CAMERA_ANGLE_X))
        values = (self.theta_deg, self.phi_deg, self.radius, self.focal_px, self.near, self.far)
        if not all(math.isfinite(v) for v in values):
            raise UsageError("View key values must be finite")
        if not -180.0 <= self.theta_deg <= 180.0:
            raise UsageError(f"theta_deg must be in [-180, 180], got {self.theta_deg}")
        if not -180.0 <= self.phi_deg <= 0.0:
            raise UsageError(f"phi_deg must be in [-180, 0], got {self.phi_deg}")
        if self.width < 8 or self.height < 8:
            raise UsageError(f"Key resolution must be at least 8x8, got {self.width}x{self.height}")
        if not self.near < self.far:
            raise UsageError(f"near ({self.near}) must be below far ({self.far})")
        if self.radius <= 0 or self.focal_px <= 0:
            raise UsageError("radius and focal_px must be positive")

    def offset(self, d_theta: float = 0.0, d_phi: float = 0.0) -> "ViewKey":
        """
        Return the key rotated by the given angle offsets.

        Theta wraps around the orbit; phi is clipped to [-180, 0].
        """
        theta = self.theta_deg + d_theta
        if theta > 180.0 or theta < -180.0:
            theta = (theta + 180.0) % 360.0 - 180.0
        phi = min(0.0, max(-180.0, self.phi_deg + d_phi))
        return replace(self, theta_deg=theta, phi_deg=phi)

    def to_dict(self) -> dict[str, Any]:
        """Key file representation."""
        return {
            "theta_deg": self.theta_deg,
            "phi_deg": self.phi_deg,
            "radius": self.radius,
            "focal_px": self.focal_px,
            "width": self.width,
            "height": self.height,
            "near": self.near,
            "far": self.far,
        }


@dataclass(frozen=True)
class Ray:
    """Single camera ray r(t) = origin + t * direction."""
    origin: np.ndarray
    direction: np.ndarray
    t_near: float
    t_far: float


@dataclass
class PosedImage:
    """Training image with its camera pose."""
    image: np.ndarray  # 3 x H x W, float32 in [0, 1]
    camera_to_world: np.ndarray  # 4 x 4
    focal_px: float

    @property
    def height(self) -> int:
        return int(self.image.shape[1])

    @property
    def width(self) -> int:
        return int(self.image.shape[2])


@dataclass(frozen=True)
class Sphere:
    """Constant-density sphere of the procedural scene."""
    center: tuple[float, float, float]
    radius: float
    rgb: tuple[float, float, float]
    sigma: float


@dataclass(frozen=True)
class SceneSpec:
    """Analytic scene made of spheres inside [-1.5, 1.5]^3."""
    spheres: tuple[Sphere, ...]
    background: tuple[float, float, float] = (1.0, 1.0, 1.0)

    BOUND = 1.5

    def __post_init__(self):
        for sphere in self.spheres:
            if sphere.radius <= 0:
                raise ConfigError(f"Sphere radius must be positive, got {sphere.radius}")
            if sphere.sigma < 0:
                raise ConfigError(f"Sphere density must be non-negative, got {sphere.sigma}")
            for c in sphere.center:
                if abs(c) + sphere.radius > self.BOUND:
                    raise ConfigError(f"Sphere at {sphere.center} leaves the sampling bounds")

    @classmethod
    def default(cls) -> "SceneSpec":
        """Three overlapping spheres on a white background."""
        return cls(
            spheres=(
                Sphere((0.0, 0.0, 0.0), 0.5, (0.9, 0.2, 0.2), 40.0),
                Sphere((0.6, 0.1, 0.3), 0.3, (0.2, 0.9, 0.2), 40.0),
                Sphere((-0.5, -0.2, 0.4), 0.25, (0.2, 0.3, 0.9), 40.0),
            ),
        )


@dataclass(frozen=True)
class FieldConfig:
    """Radiance field architecture."""
    l_pos: int = 10
    l_dir: int = 4
    depth: int = 4
    width: int = 128
    include_raw_input: bool = True

    def __post_init__(self):
        if self.depth < 1:
            raise ConfigError(f"Field depth must be >= 1, got {self.depth}")
        if self.width < 8:
            raise ConfigError(f"Field width must be >= 8, got {self.width}")
        if self.l_pos < 0 or self.l_dir < 0:
            raise ConfigError("Encoding frequency counts must be non-negative")

    @property
    def pos_features(self) -> int:
        return 3 * (int(self.include_raw_input) + 2 * self.l_pos)

    @property
    def dir_features(self) -> int:
        return 3 * (int(self.include_raw_input) + 2 * self.l_dir)

    @classmethod
    def paper(cls) -> "FieldConfig":
        return cls(depth=8, width=256)


def _conv_out(size: int, kernel: int, stride: int = 1, padding: int = 0) -> int:
    return (size + 2 * padding - kernel) // stride + 1


@dataclass(frozen=True)
class ExtractorConfig:
    """Message extractor geometry: conv -> pool -> conv -> fc -> fc."""
    depth: int
    height: int = 64
    width: int = 64
    conv1_channels: int = 64
    conv1_kernel: int = 5
    pool_kernel: int = 3
    pool_stride: int = 3
    conv2_channels: int = 128
    conv2_kernel: int = 3
    fc_hidden: int = 256

    def __post_init__(self):
        if self.depth < 1:
            raise ConfigError(f"Message depth D must be >= 1, got {self.depth}")
        for name, (h, w) in self.stage_shapes().items():
            if h < 1 or w < 1:
                raise DimensionError(
                    f"Extractor stage '{name}' collapses to {h}x{w} for a "
                    f"{self.height}x{self.width} input"
                )

    def stage_shapes(self) -> dict[str, tuple[int, int]]:
        """Spatial size after each feature stage."""
        h1 = _conv_out(self.height, self.conv1_kernel)
        w1 = _conv_out(self.width, self.conv1_kernel)
        hp = _conv_out(h1, self.pool_kernel, self.pool_stride) if h1 >= self.pool_kernel else 0
        wp = _conv_out(w1, self.pool_kernel, self.pool_stride) if w1 >= self.pool_kernel else 0
        h2 = _conv_out(hp, self.conv2_kernel) if hp >= self.conv2_kernel else 0
        w2 = _conv_out(wp, self.conv2_kernel) if wp >= self.conv2_kernel else 0
        return {"conv1": (h1, w1), "pool": (hp, wp), "conv2": (h2, w2)}

    @property
    def flat_features(self) -> int:
        h2, w2 = self.stage_shapes()["conv2"]
        return self.conv2_channels * h2 * w2

    @property
    def output_size(self) -> int:
        return self.depth * self.height * self.width

    @classmethod
    def desk(cls, depth: int) -> "ExtractorConfig":
        """64x64 input, 64x60x60 -> pool k3/s3 -> 64x20x20."""
        return cls(depth=depth, height=64, width=64, pool_kernel=3, pool_stride=3)

    @classmethod
    def paper(cls, depth: int) -> "ExtractorConfig":
        """180x180 input, 64x176x176 -> pool k9/s9 -> 64x19x19."""
        return cls(depth=depth, height=180, width=180, pool_kernel=9, pool_stride=9)

    @classmethod
    def for_resolution(cls, depth: int, height: int, width: int, **overrides) -> "ExtractorConfig":
        """Pick the pooling geometry for an arbitrary input size."""
        if height >= 180 and width >= 180:
            pool = 9
        else:
            pool = 3
        params = dict(depth=depth, height=height, width=width, pool_kernel=pool, pool_stride=pool)
        params.update(overrides)
        return cls(**params)


@dataclass
class BitPlanes:
    """Secret message laid out as D x H x W bits."""
    depth: int
    height: int
    width: int
    bits: np.ndarray  # uint8, D x H x W, values in {0, 1}
    payload_len_bits: int

    def __post_init__(self):
        expected = (self.depth, self.height, self.width)
        if tuple(self.bits.shape) != expected:
            raise DimensionError(f"Bit planes shape {self.bits.shape} does not match {expected}")
        if np.any((self.bits != 0) & (self.bits != 1)):
            raise DimensionError("Bit planes may only hold 0 and 1")
        if self.payload_len_bits > self.capacity_bits:
            raise DimensionError("payload_len_bits exceeds plane capacity")

    @property
    def capacity_bits(self) -> int:
        return self.depth * self.height * self.width


@dataclass(frozen=True)
class RsParams:
    """Reed-Solomon code over GF(2^8) with reduction polynomial 0x11D."""
    n: int = 255
    k: int = 223

    PRIM = 0x11D

    def __post_init__(self):
        if not 0 < self.k < self.n <= 255:
            raise RsParameterError(f"Need 0 < k < n <= 255, got n={self.n}, k={self.k}")

    @property
    def nsym(self) -> int:
        return self.n - self.k

    @property
    def correctable(self) -> int:
        return self.nsym // 2


@dataclass
class TrainingTrace:
    """Per-step loss (and accuracy, for the extractor) history of a training run."""
    losses: list[float] = field(default_factory=list)
    accuracies: list[float] = field(default_factory=list)
    epochs_to_perfect: Optional[int] = None
    time_to_perfect: Optional[float] = None
    total_time: float = 0.0


@dataclass
class BundleManifest:
    """Public description of a stego bundle. Never holds the view key."""
    depth: int
    height: int
    width: int
    n_coarse: int
    n_fine: int
    background: tuple[float, float, float]
    created: str
    seed: int
    payload_bytes: int
    rs_n: Optional[int] = None
    rs_k: Optional[int] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "depth": self.depth,
            "height": self.height,
            "width": self.width,
            "n_coarse": self.n_coarse,
            "n_fine": self.n_fine,
            "background": list(self.background),
            "created": self.created,
            "seed": self.seed,
            "payload_bytes": self.payload_bytes,
            "rs_n": self.rs_n,
            "rs_k": self.rs_k,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "BundleManifest":
        return cls(
            depth=int(data["depth"]),
            height=int(data["height"]),
            width=int(data["width"]),
            n_coarse=int(data["n_coarse"]),
            n_fine=int(data["n_fine"]),
            background=tuple(float(c) for c in data["background"]),
            created=str(data.get("created", "")),
            seed=int(data.get("seed", 0)),
            payload_bytes=int(data.get("payload_bytes", 0)),
            rs_n=data.get("rs_n"),
            rs_k=data.get("rs_k"),
        )


@dataclass
class StegoBundle:
    """Publishable pair of radiance field and message extractor."""
    field: "FieldParams"
    extractor: "ExtractorParams"
    manifest: BundleManifest

    @property
    def rs_params(self) -> Optional[RsParams]:
        if self.manifest.rs_n is None or self.manifest.rs_k is None:
            return None
        return RsParams(n=int(self.manifest.rs_n), k=int(self.manifest.rs_k))


@dataclass
class EmbedReport:
    """Outcome of training the backdoor extractor."""
    depth: int
    epochs_to_100: Optional[int]
    wall_time: Optional[float]
    full_epochs: int
    full_wall_time: float
    final_loss: float
    trace: TrainingTrace


@dataclass(frozen=True)
class SweepRow:
    """Extraction quality at one offset from the secret viewpoint."""
    theta_deg: float
    phi_deg: float
    offset_deg: float
    acc: float
    rs_bpp: float


@dataclass
class SweepReport:
    """Attacker-style viewpoint sweep around the secret key."""
    axis: str  # "theta" | "phi" | "both"
    depth: int
    rows: list[SweepRow] = field(default_factory=list)


@dataclass(frozen=True)
class CapacityRow:
    """One line of the capacity table."""
    depth: int
    epochs_to_100: Optional[int]
    wall_time: Optional[float]
    full_epochs: int
    full_wall_time: float
    secret_acc: float
    offkey_mean_acc: float
    offkey_mean_rsbpp: float
    offkey_max_acc: float
    measured_rs_rate: Optional[float] = None


@dataclass
class FieldSummary:
    """Outcome of a train-nerf run."""
    iters: int
    final_loss: float
    total_time: float
    n_views: int
    out: str
    holdout_psnr: list[float] = field(default_factory=list)


@dataclass
class ExtractedMessage:
    """Bytes recovered by an extract command."""
    message: bytes
    out: Optional[str] = None


__all__ = [
    "DEFAULT_CAMERA_ANGLE_X",
    "focal_from_fov",
    "ViewKey",
    "Ray",
    "PosedImage",
    "Sphere",
    "SceneSpec",
    "FieldConfig",
    "ExtractorConfig",
    "BitPlanes",
    "RsParams",
    "TrainingTrace",
    "BundleManifest",
    "StegoBundle",
    "EmbedReport",
    "SweepRow",
    "SweepReport",
    "CapacityRow",
    "FieldSummary",
    "ExtractedMessage",
]
