#!/usr/bin/env python3
"""Geometric fusion pooling: NMS, concatenation, and per-RoI gathering.

Three views carry overlapping duplicate proposals for the same physical
objects; per-view and joint NMS collapse them to one RoI each, and every RoI
gathers the concatenated point indices and features it contains.
"""

import numpy as np

from lidarprep import Box7, MvfpConfig, Proposal, ProposalSet, mvfp_pool
from lidarprep.cloud import PointCloud

rng = np.random.default_rng(17)

objects = [Box7(8.0, 2.0, -0.9, 4.0, 1.8, 1.5, 0.2), Box7(20.0, -5.0, -0.9, 4.2, 1.7, 1.5, -0.6)]
clouds, feats, props = [], [], []
for view in range(3):
    pts = []
    for box in objects:
        local = rng.uniform(-0.5, 0.5, (40, 3)) * [box.l, box.w, box.h]
        c, s = np.cos(box.yaw), np.sin(box.yaw)
        world = np.stack(
            [box.cx + c * local[:, 0] - s * local[:, 1],
             box.cy + s * local[:, 0] + c * local[:, 1],
             box.cz + local[:, 2],
             rng.random(40)],
            axis=1,
        )
        pts.append(world)
    cloud = PointCloud(np.concatenate(pts).astype(np.float32))
    clouds.append(cloud)
    feats.append(rng.normal(size=(len(cloud), 8)))
    jitter = rng.normal(0, 0.05, (len(objects), 2))
    props.append(ProposalSet.from_proposals([
        Proposal(Box7(b.cx + jitter[i, 0], b.cy + jitter[i, 1], b.cz, b.l, b.w, b.h, b.yaw),
                 float(rng.uniform(0.5, 2.5)))
        for i, b in enumerate(objects)
    ]))

result = mvfp_pool(clouds, feats, props, MvfpConfig(iou_threshold=0.7, margin=0.1))
print(f"proposals in: {sum(len(p) for p in props)} across 3 views")
print(f"fused RoIs:   {len(result.rois)} (one per physical object)")
print(f"concatenated points: {result.points.shape}, features: {result.features.shape}")
for i, pool in enumerate(result.pools):
    print(f"RoI {i}: center ({pool.roi.cx:.1f}, {pool.roi.cy:.1f}), "
          f"{len(pool.point_indices)} points gathered, "
          f"feature block {pool.features.shape}")
