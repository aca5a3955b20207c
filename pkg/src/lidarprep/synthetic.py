"""Synthetic LiDAR-like scenes for demos and statistical tests.

Generates a front-half-plane scan: a flat ground carpet whose areal density
falls off with the inverse square of distance (log-uniform radius), plus
car-sized boxes resting on the ground with point counts that shrink with
distance.  Not a sensor model - just enough structure for the density and
ground statistics to behave like real drives.
"""

import math
from dataclasses import dataclass

import numpy as np

from .boxes import Box7
from .cloud import PointCloud


@dataclass(frozen=True)
class SceneSpec:
    ground_points: int = 20000
    ground_z: float = -1.7
    ground_jitter: float = 0.05   # uniform +/- bound, keep below gas tau_h/2
    d_min: float = 2.0
    d_max: float = 78.0
    n_boxes: tuple = (5, 15)
    box_d_range: tuple = (5.0, 68.0)
    box_points_scale: float = 3200.0
    box_points_min: int = 30
    box_points_max: int = 400


def _ground(rng: np.random.Generator, spec: SceneSpec) -> np.ndarray:
    u = rng.random(spec.ground_points)
    d = spec.d_min * (spec.d_max / spec.d_min) ** u  # p(d) ~ 1/d => density ~ 1/d^2
    theta = rng.uniform(-math.pi / 2, math.pi / 2, spec.ground_points)
    x = d * np.cos(theta)
    y = d * np.sin(theta)
    z = spec.ground_z + rng.uniform(-spec.ground_jitter, spec.ground_jitter, spec.ground_points)
    r = rng.random(spec.ground_points)
    return np.stack([x, y, z, r], axis=1)


def _box_cluster(rng: np.random.Generator, box: Box7, n: int) -> np.ndarray:
    lx = rng.uniform(-box.l / 2, box.l / 2, n)
    ly = rng.uniform(-box.w / 2, box.w / 2, n)
    lz = rng.uniform(-box.h / 2, box.h / 2, n)
    c, s = math.cos(box.yaw), math.sin(box.yaw)
    x = box.cx + c * lx - s * ly
    y = box.cy + s * lx + c * ly
    z = box.cz + lz
    r = rng.random(n)
    return np.stack([x, y, z, r], axis=1)


def lidar_scene(rng: np.random.Generator, spec: SceneSpec = SceneSpec(), frame_id: str = ""):
    """One synthetic frame: (PointCloud, list of ground-truth Box7)."""
    parts = [_ground(rng, spec)]
    boxes = []
    n_boxes = int(rng.integers(spec.n_boxes[0], spec.n_boxes[1] + 1))
    for _ in range(n_boxes):
        d = rng.uniform(*spec.box_d_range)
        theta = rng.uniform(-math.pi / 2 * 0.9, math.pi / 2 * 0.9)
        l = rng.uniform(3.4, 4.6)
        w = rng.uniform(1.5, 1.9)
        h = rng.uniform(1.4, 1.8)
        box = Box7(
            d * math.cos(theta), d * math.sin(theta), spec.ground_z + h / 2,
            l, w, h, rng.uniform(-math.pi, math.pi),
        )
        boxes.append(box)
        n = int(np.clip(spec.box_points_scale / d, spec.box_points_min, spec.box_points_max))
        parts.append(_box_cluster(rng, box, n))
    cloud = PointCloud(np.concatenate(parts).astype(np.float32), frame_id)
    return cloud, boxes


def corpus(seed: int, n_frames: int, spec: SceneSpec = SceneSpec()):
    """A list of (cloud, boxes) frames with stable ids."""
    rng = np.random.default_rng(seed)
    return [lidar_scene(rng, spec, frame_id=f"{i:06d}") for i in range(n_frames)]
