#!/usr/bin/env python3
"""Frame round trips, range cropping, and budget sampling.

Builds a synthetic scan, writes it in the 16-byte binary record format,
reads it back bit-identically, then crops and samples it to a fixed budget.
"""

import numpy as np

from lidarprep import CropRange, crop, random_fixed_count, read_frame, write_frame
from lidarprep.synthetic import SceneSpec, lidar_scene

rng = np.random.default_rng(7)
cloud, boxes = lidar_scene(rng, SceneSpec(ground_points=30000))
print(f"scene: {len(cloud)} points, {len(boxes)} boxes")

blob = write_frame(cloud)
again = read_frame(blob, frame_id="demo")
print(f"round trip: {len(blob)} bytes -> {len(again)} points, "
      f"bit-identical: {np.array_equal(again.points, cloud.points)}")

detection_range = CropRange(0.0, 70.4, -40.0, 40.0, -3.0, 1.0)
cropped = crop(again, detection_range)
print(f"crop to detection range: {len(again)} -> {len(cropped)} points")

budget = random_fixed_count(cropped, 16384, seed=42)
print(f"fixed budget: {len(budget)} points (seeded, reproducible)")

rerun = random_fixed_count(cropped, 16384, seed=42)
print(f"same seed, same sample: {np.array_equal(budget.points, rerun.points)}")
