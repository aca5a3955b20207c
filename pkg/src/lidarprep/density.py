"""Density Equalization Sampling (DES).

The scene is split into concentric circular rings of width ``d_t`` out to
``tau_far``.  Each ring's point density (count over ring area, scaled by the
area coefficient ``mu``) selects one of four actions: sparse rings gain
``floor(s1 * n)`` duplicated points drawn from a height band, mid-density
rings pass through, and the two dense tiers lose ``floor(s2 * n)`` or
``floor(s3 * n)`` uniformly chosen points.  Points beyond ``tau_far`` are
untouched.

Geometry is evaluated in float64 with a fixed expression order so that the
ring assignment and every sampled index are reproducible across
implementations of the same stream contract (see :mod:`lidarprep.rng`).
"""

import math
from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud, random_fixed_count
from .rng import DOMAIN_DES_DOWN, DOMAIN_DES_UP, Stream, draw_indices, select_indices

RING_OUT = 0  # ring label for points beyond tau_far


@dataclass(frozen=True)
class DesConfig:
    """Ring geometry, density thresholds, and sampling proportions."""

    tau_far: float = 40.0
    d_t: float = 5.0
    mu: float = 0.5
    rho_s: float = 5.0
    rho_m: float = 8.0
    rho_l: float = 15.0
    s1: float = 0.15
    s2: float = 0.10
    s3: float = 0.15
    tau_z_min: float = -1.5
    tau_z_max: float = 0.5
    jitter: float = 0.0  # uniform +/- bound on duplicated xyz; 0 = exact duplicates

    def violations(self) -> list:
        """All constraint violations; empty means valid."""
        v = []
        if not self.tau_far > 0:
            v.append("des: tau_far must be > 0")
        if not self.d_t > 0:
            v.append("des: d_t must be > 0")
        if self.tau_far > 0 and self.d_t > 0:
            ratio = self.tau_far / self.d_t
            if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                v.append("des: tau_far/d_t must be a positive integer (ring count n_r)")
        if not 0 < self.rho_s <= self.rho_m <= self.rho_l:
            v.append("des: thresholds must satisfy 0 < rho_s <= rho_m <= rho_l")
        if not (self.s1 == self.s3 and self.s3 > self.s2 > 0):
            v.append("des: s1 = s3 > s2 required, with s2 > 0")
        if not self.s3 < 1:
            v.append("des: downsampling proportions must be < 1")
        if not self.tau_z_min < self.tau_z_max:
            v.append("des: tau_z_min < tau_z_max required")
        if self.jitter < 0:
            v.append("des: jitter must be >= 0")
        return v

    def __post_init__(self):
        v = self.violations()
        if v:
            raise ValueError("; ".join(v))

    @property
    def n_r(self) -> int:
        return round(self.tau_far / self.d_t)


def ring_areas(cfg: DesConfig) -> np.ndarray:
    """Scaled area of each ring; ring j covers planar distance ((j-1)*d_t, j*d_t]."""
    j = np.arange(1, cfg.n_r + 1, dtype=np.float64)
    return (cfg.mu * math.pi) * (2.0 * j - 1.0) * (cfg.d_t * cfg.d_t)


@dataclass
class RingPartition:
    """Per-point ring labels plus per-ring counts, areas, and densities."""

    ring: np.ndarray      # (N,) int64; 1..n_r, or RING_OUT beyond tau_far
    counts: np.ndarray    # (n_r,) int64
    areas: np.ndarray     # (n_r,) float64
    densities: np.ndarray # (n_r,) float64

    @property
    def n_r(self) -> int:
        return self.areas.shape[0]


def partition_rings(cloud: PointCloud, cfg: DesConfig) -> RingPartition:
    """Assign every point to its circular ring by planar distance."""
    x = cloud.points[:, 0].astype(np.float64)
    y = cloud.points[:, 1].astype(np.float64)
    d = np.sqrt(x * x + y * y)
    ring = np.ceil(d / cfg.d_t).astype(np.int64)
    # d == 0 lands in ring 1; float drift at the far edge clamps to the last ring.
    np.clip(ring, 1, cfg.n_r, out=ring)
    ring[d > cfg.tau_far] = RING_OUT
    counts = np.bincount(ring, minlength=cfg.n_r + 1)[1:].astype(np.int64)
    areas = ring_areas(cfg)
    return RingPartition(ring, counts, areas, counts / areas)


def des_sample(cloud: PointCloud, cfg: DesConfig, seed: int) -> PointCloud:
    """Equalize ring densities by duplicating sparse-ring points and thinning dense rings.

    Output order: surviving input points first (input order), then the
    duplicated points grouped by ring index ascending in draw order.  With a
    nonzero jitter, each duplicate's xyz is offset by ``(w/2^32*2-1)*jitter``
    per axis, three further stream words per duplicate.
    """
    part = partition_rings(cloud, cfg)
    z = cloud.points[:, 2].astype(np.float64)
    keep = np.ones(len(cloud), dtype=bool)
    dup_groups = []

    for j in range(1, part.n_r + 1):
        n_j = int(part.counts[j - 1])
        if n_j == 0:
            continue
        rho = part.densities[j - 1]
        members = np.flatnonzero(part.ring == j)
        if rho < cfg.rho_s:
            k = int(cfg.s1 * n_j)
            if k == 0:
                continue
            band = members[(z[members] >= cfg.tau_z_min) & (z[members] <= cfg.tau_z_max)]
            if band.size == 0:
                continue
            stream = Stream(seed, DOMAIN_DES_UP, j)
            draws = draw_indices(k, band.size, stream)
            dups = cloud.points[band[draws]]
            if cfg.jitter > 0:
                words = stream.u32(3 * k).astype(np.float64).reshape(k, 3)
                offsets = (words / 4294967296.0 * 2.0 - 1.0) * cfg.jitter
                dups = dups.copy()
                dups[:, :3] = (dups[:, :3].astype(np.float64) + offsets).astype(np.float32)
            dup_groups.append(dups)
        elif rho < cfg.rho_m:
            continue
        else:
            s = cfg.s2 if rho < cfg.rho_l else cfg.s3
            k = int(s * n_j)
            if k == 0:
                continue
            removed = select_indices(n_j, k, Stream(seed, DOMAIN_DES_DOWN, j))
            keep[members[removed]] = False

    surviving = cloud.points[keep]
    parts = [surviving] + dup_groups if dup_groups else [surviving]
    return PointCloud(np.concatenate(parts), cloud.frame_id, cloud.crop_applied)


def finalize_branch(cloud: PointCloud, n_p: int, seed: int, branch: int) -> PointCloud:
    """Normalize a branch output to the fixed per-view budget."""
    return random_fixed_count(cloud, n_p, seed, branch)
