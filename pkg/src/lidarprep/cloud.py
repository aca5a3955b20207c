"""Point-cloud data model, binary frame I/O, cropping, and budget sampling.

Frames are flat sequences of 16-byte records, four little-endian float32
values per point: x (forward), y (left), z (up) in meters plus reflectivity.
The same format is used for input frames and for every branch output, which
keeps golden files byte-comparable.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, NonFiniteValue, TruncatedFrame
from .rng import BRANCH_DEFAULT, DOMAIN_PAD, DOMAIN_SELECT, Stream, draw_indices, select_indices

POINT_DTYPE = np.float32
RECORD_BYTES = 16


@dataclass(eq=False)
class PointCloud:
    """A contiguous (N, 4) float32 array of points plus frame provenance."""

    points: np.ndarray
    frame_id: str = ""
    crop_applied: tuple = (False, False, False)

    def __post_init__(self):
        pts = np.ascontiguousarray(np.asarray(self.points, dtype=POINT_DTYPE))
        if pts.ndim != 2 or pts.shape[1] != 4:
            raise ValueError(f"points must have shape (N, 4), got {pts.shape}")
        self.points = pts

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def xyz(self) -> np.ndarray:
        return self.points[:, :3]

    @property
    def z(self) -> np.ndarray:
        return self.points[:, 2]

    def take(self, indices: np.ndarray) -> "PointCloud":
        return PointCloud(self.points[indices], self.frame_id, self.crop_applied)

    @staticmethod
    def empty(frame_id: str = "") -> "PointCloud":
        return PointCloud(np.empty((0, 4), dtype=POINT_DTYPE), frame_id)


@dataclass(frozen=True)
class CropRange:
    """Axis-aligned detection range; membership is inclusive on both ends."""

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    z_min: float
    z_max: float

    def __post_init__(self):
        for lo, hi, axis in (
            (self.x_min, self.x_max, "x"),
            (self.y_min, self.y_max, "y"),
            (self.z_min, self.z_max, "z"),
        ):
            if not lo < hi:
                raise ValueError(f"crop range requires {axis}_min < {axis}_max")

    def min_corner(self) -> tuple:
        return (self.x_min, self.y_min, self.z_min)


def read_frame(data: bytes, frame_id: str = "") -> PointCloud:
    """Decode a binary frame; rejects truncated records and non-finite values."""
    if len(data) % RECORD_BYTES != 0:
        raise TruncatedFrame(
            f"frame length {len(data)} is not a multiple of {RECORD_BYTES} bytes"
        )
    pts = np.frombuffer(data, dtype="<f4").reshape(-1, 4)
    if pts.size and not np.isfinite(pts).all():
        bad = int(np.flatnonzero(~np.isfinite(pts).all(axis=1))[0])
        raise NonFiniteValue(f"non-finite value in point record {bad}")
    return PointCloud(pts.copy(), frame_id)


def write_frame(cloud: PointCloud) -> bytes:
    """Encode a cloud; read_frame(write_frame(c)) is bit-identical to c."""
    return np.ascontiguousarray(cloud.points, dtype="<f4").tobytes()


def crop(cloud: PointCloud, rng: CropRange) -> PointCloud:
    """Keep points inside the detection range on all three axes, order preserved."""
    x, y, z = cloud.points[:, 0], cloud.points[:, 1], cloud.points[:, 2]
    keep = (
        (x >= rng.x_min) & (x <= rng.x_max)
        & (y >= rng.y_min) & (y <= rng.y_max)
        & (z >= rng.z_min) & (z <= rng.z_max)
    )
    out = cloud.take(np.flatnonzero(keep))
    out.crop_applied = (True, True, True)
    return out


def random_fixed_count(
    cloud: PointCloud, n_p: int, seed: int, branch: int = BRANCH_DEFAULT
) -> PointCloud:
    """Resample to exactly n_p points.

    Larger inputs are subsampled without replacement; smaller inputs keep
    every point and pad the deficit with uniformly drawn duplicates.  The
    branch tag separates the random streams of pipeline views that share one
    frame seed.
    """
    if n_p <= 0:
        raise ValueError("n_p must be positive")
    n = len(cloud)
    if n == 0:
        raise EmptyInput("cannot sample a fixed count from an empty cloud")
    if n == n_p:
        return cloud.take(np.arange(n))
    if n > n_p:
        idx = select_indices(n, n_p, Stream(seed, DOMAIN_SELECT, branch))
        return cloud.take(idx)
    pad = draw_indices(n_p - n, n, Stream(seed, DOMAIN_PAD, branch))
    return cloud.take(np.concatenate([np.arange(n), pad]))
