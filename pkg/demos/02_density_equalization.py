#!/usr/bin/env python3
"""Density equalization across circular rings.

Shows per-ring density before resampling, which rule each ring triggers, and
how the ring shares move: near rings thin out, far rings gain duplicated
points from the height band where objects live.
"""

import numpy as np

from lidarprep import CropRange, DesConfig, crop, des_sample, partition_rings
from lidarprep.analysis import region_percentages
from lidarprep.synthetic import lidar_scene

cfg = DesConfig()  # 8 rings of 5 m, thresholds (5, 8, 15) pts/m^2
rng = np.random.default_rng(3)
cloud, _ = lidar_scene(rng)
cropped = crop(cloud, CropRange(0.0, 70.4, -40.0, 40.0, -3.0, 1.0))

part = partition_rings(cropped, cfg)
print("ring  count  area[m^2]  density  rule")
for j in range(1, cfg.n_r + 1):
    rho = part.densities[j - 1]
    if rho < cfg.rho_s:
        rule = f"upsample +{int(cfg.s1 * part.counts[j - 1])}"
    elif rho < cfg.rho_m:
        rule = "pass"
    elif rho < cfg.rho_l:
        rule = f"downsample -{int(cfg.s2 * part.counts[j - 1])}"
    else:
        rule = f"downsample -{int(cfg.s3 * part.counts[j - 1])}"
    print(f"{j:4d} {part.counts[j - 1]:6d} {part.areas[j - 1]:10.1f} {rho:8.2f}  {rule}")

out = des_sample(cropped, cfg, seed=11)
shift = region_percentages(cropped, out, cfg)
print(f"\ntotal points: {len(cropped)} -> {len(out)}")
print("ring shares before:", np.round(shift.before, 1))
print("ring shares after: ", np.round(shift.after, 1))
print(f"near rings 1-3: {shift.before[:3].sum():.1f}% -> {shift.after[:3].sum():.1f}%")
print(f"far rings 4-8:  {shift.before[3:].sum():.1f}% -> {shift.after[3:].sum():.1f}%")
