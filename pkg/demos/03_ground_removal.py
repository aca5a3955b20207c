#!/usr/bin/env python3
"""Ground removal by per-cell lowest-point height filtering.

A flat ground carpet dominates the near field; the filter keeps only points
strictly above each grid cell's minimum height plus the threshold, which
wipes the carpet while sparing object points.
"""

import numpy as np

from lidarprep import CropRange, GasConfig, crop, gas_filter, points_in_any_box
from lidarprep.synthetic import lidar_scene

cfg = GasConfig()  # 5 x 10 m cells over x [0,40], y [-35,35], tau_h 0.2
rng = np.random.default_rng(9)
cloud, boxes = lidar_scene(rng)
cropped = crop(cloud, CropRange(0.0, 70.4, -40.0, 40.0, -3.0, 1.0))

fg_before = points_in_any_box(cropped.points[:, :3].astype(np.float64), boxes)
out = gas_filter(cropped, cfg)
fg_after = points_in_any_box(out.points[:, :3].astype(np.float64), boxes)

print(f"grid: {cfg.n_gx} x {cfg.n_gy} cells, height threshold {cfg.tau_h} m")
print(f"points: {len(cropped)} -> {len(out)} "
      f"({100 * (1 - len(out) / len(cropped)):.1f}% removed)")
print(f"foreground share: {100 * fg_before.mean():.1f}% -> {100 * fg_after.mean():.1f}%")
print(f"foreground points kept: {int(fg_after.sum())} of {int(fg_before.sum())}")
