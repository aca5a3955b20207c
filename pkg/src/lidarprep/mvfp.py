"""Multi-view fusion pooling: the geometric half of second-stage refinement.

Each view's proposals are pruned with greedy NMS, the survivors of all views
are concatenated and pruned once more jointly, and every resulting RoI
gathers the indices and feature rows of the concatenated points it contains
(optionally enlarged by a margin).  Feature interpolation belongs to the
consuming network and is deliberately absent.
"""

from dataclasses import dataclass

import numpy as np

from .boxes import Box7, ProposalSet, nms_indices, points_in_box
from .errors import AlignmentError


@dataclass(frozen=True)
class MvfpConfig:
    """NMS and pooling parameters. Convention: 0.7 IoU suits cars, 0.5 smaller classes."""

    iou_threshold: float = 0.7
    max_keep: int = 100
    margin: float = 0.0


@dataclass
class RoiPool:
    """One RoI with the concatenated-point indices and features it contains."""

    roi: Box7
    logit: float
    class_id: int
    point_indices: np.ndarray
    features: np.ndarray


@dataclass
class MvfpResult:
    points: np.ndarray    # (M, 4) concatenated views, view-1 rows first
    features: np.ndarray  # (M, F)
    rois: ProposalSet
    pools: list


def _aligned_features(clouds, features):
    feats = []
    for i, (cloud, feat) in enumerate(zip(clouds, features)):
        f = np.asarray(feat, dtype=np.float64)
        if f.ndim == 1:
            f = f.reshape(-1, 1)
        if f.shape[0] != len(cloud):
            raise AlignmentError(
                f"view {i + 1}: {f.shape[0]} feature rows for {len(cloud)} points"
            )
        feats.append(f)
    width = max((f.shape[1] for f in feats if f.shape[0]), default=1)
    return [f if f.shape[0] else np.empty((0, width)) for f in feats]


def mvfp_pool(clouds, features, proposals, cfg: MvfpConfig = MvfpConfig()) -> MvfpResult:
    """Fuse three views' points, features, and proposals into per-RoI sets."""
    feats = _aligned_features(clouds, features)
    cat_points = np.concatenate([c.points for c in clouds])
    cat_feats = np.concatenate(feats)

    survivors = [p.take(nms_indices(p, cfg.iou_threshold, cfg.max_keep)) for p in proposals]
    joint = ProposalSet.concat(survivors)
    rois = joint.take(nms_indices(joint, cfg.iou_threshold, cfg.max_keep))

    pools = []
    for r in range(len(rois)):
        b = rois.boxes[r].astype(np.float64)
        grown = Box7(
            b[0], b[1], b[2],
            b[3] + 2 * cfg.margin, b[4] + 2 * cfg.margin, b[5] + 2 * cfg.margin,
            b[6],
        )
        inside = (
            np.flatnonzero(points_in_box(cat_points[:, :3], grown))
            if len(cat_points) else np.empty(0, dtype=np.int64)
        )
        pools.append(
            RoiPool(
                Box7.from_array(b),
                float(rois.logits[r]),
                int(rois.class_ids[r]),
                inside,
                cat_feats[inside],
            )
        )
    return MvfpResult(cat_points, cat_feats, rois, pools)
