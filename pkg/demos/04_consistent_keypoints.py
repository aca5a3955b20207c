#!/usr/bin/env python3
"""Consistent keypoints across the three sampled views.

Runs the full branch trio on one frame, then intersects their voxel hash
tables and matches inner points to produce one aligned index triple per
shared voxel.  Because all branches resample the same frame, exact point
coincidences are common and the mask is well populated.
"""

import numpy as np

from lidarprep import (
    CkpsConfig,
    CropRange,
    DesConfig,
    GasConfig,
    crop,
    des_sample,
    gas_filter,
    random_fixed_count,
    select_keypoints,
    voxelize,
)
from lidarprep.rng import BRANCH_PV1, BRANCH_PV2, BRANCH_PV3
from lidarprep.synthetic import lidar_scene

rng = np.random.default_rng(21)
cloud, _ = lidar_scene(rng)
cropped = crop(cloud, CropRange(0.0, 70.4, -40.0, 40.0, -3.0, 1.0))

seed, n_p = 5, 16384
pv1 = random_fixed_count(cropped, n_p, seed, BRANCH_PV1)
pv2 = random_fixed_count(des_sample(cropped, DesConfig(), seed), n_p, seed, BRANCH_PV2)
pv3 = random_fixed_count(gas_filter(cropped, GasConfig()), n_p, seed, BRANCH_PV3)

cfg = CkpsConfig(voxel_size=0.4, tau_v=0.001, origin=(0.0, -40.0, -3.0))
tables = [voxelize(v, cfg) for v in (pv1, pv2, pv3)]
print("occupied voxels per view:", [len(t) for t in tables])

mask = select_keypoints(pv1, pv2, pv3, cfg)
print(f"consistent keypoints: {len(mask)}")

i1, i2, i3 = mask.view_indices[0]
print("first triple:", (int(i1), int(i2), int(i3)))
print("view-1 point:", pv1.points[i1])
print("view-2 point:", pv2.points[i2])
print("view-3 point:", pv3.points[i3])
spread = max(
    np.abs(pv2.points[i2].astype(np.float64) - pv1.points[i1]).max(),
    np.abs(pv3.points[i3].astype(np.float64) - pv1.points[i1]).max(),
)
print(f"max coordinate/reflectivity spread: {spread:.2e} (< tau_v {cfg.tau_v})")
