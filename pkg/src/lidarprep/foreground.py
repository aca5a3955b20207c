"""Foreground sampling of multi-view proposals.

Point-based views first restrict per-point proposals to the consistent
keypoint mask, then keep the triples whose canonical (view-1) keypoint lies
inside a ground-truth box; evaluating membership once on the canonical point
keeps all three views' foreground sets aligned.  BEV views are already
spatially aligned, so cells are kept directly when their centers fall inside
a ground-truth footprint.
"""

from dataclasses import dataclass

import numpy as np

from .boxes import Box7, ProposalSet, box_corners_bev, points_in_any_box
from .errors import GridMismatch, LengthMismatch
from .keypoints import KeypointMask


@dataclass
class ForegroundMask:
    """Which keypoints or BEV cells were kept, and how membership was decided."""

    mode: str              # "point" or "bev"
    indices: np.ndarray    # kept keypoint rows (point mode) or flat cell ids (bev mode)
    n_fg: int


@dataclass
class CfProposals:
    """Aligned per-view proposals for the consistent foreground entries."""

    view1: ProposalSet
    view2: ProposalSet
    view3: ProposalSet
    mask: ForegroundMask

    def __len__(self) -> int:
        return self.mask.n_fg

    def __iter__(self):
        return iter((self.view1, self.view2, self.view3))


def foreground_sample_points(
    proposals, gt_boxes, mask: KeypointMask, cloud1=None
) -> CfProposals:
    """Filter per-point proposals down to consistent foreground triples.

    ``proposals`` holds one ProposalSet per view, each aligned 1:1 with that
    view's points.  ``cloud1`` supplies canonical coordinates when the mask
    was loaded without anchors.
    """
    p1, p2, p3 = proposals
    anchors = mask.anchors
    if anchors is None:
        if cloud1 is None:
            raise ValueError("mask has no anchors; pass the view-1 cloud")
        anchors = cloud1.points[mask.view_indices[:, 0]]
    for view, pset in enumerate((p1, p2, p3)):
        if len(mask) and mask.view_indices[:, view].max(initial=-1) >= len(pset):
            raise LengthMismatch(
                f"view {view + 1} has {len(pset)} proposals but the mask indexes beyond that"
            )

    if len(mask) == 0 or not gt_boxes:
        fg = ForegroundMask("point", np.empty(0, dtype=np.int64), 0)
        return CfProposals(ProposalSet.empty(), ProposalSet.empty(), ProposalSet.empty(), fg)

    inside = points_in_any_box(anchors[:, :3].astype(np.float64), gt_boxes)
    rows = np.flatnonzero(inside)
    fg = ForegroundMask("point", rows, int(rows.size))
    return CfProposals(
        p1.take(mask.view_indices[rows, 0]),
        p2.take(mask.view_indices[rows, 1]),
        p3.take(mask.view_indices[rows, 2]),
        fg,
    )


@dataclass
class BevGrid:
    """Per-cell proposals over a regular BEV grid."""

    x0: float
    y0: float
    cell_size: float
    boxes: np.ndarray      # (H, W, 7)
    logits: np.ndarray     # (H, W)
    class_ids: np.ndarray  # (H, W)

    def __post_init__(self):
        self.boxes = np.asarray(self.boxes, dtype=np.float32)
        self.logits = np.asarray(self.logits, dtype=np.float32)
        self.class_ids = np.asarray(self.class_ids, dtype=np.int32)
        if self.boxes.shape[:2] != self.logits.shape or self.logits.shape != self.class_ids.shape:
            raise ValueError("grid layers must share (H, W)")

    @property
    def shape(self):
        return self.logits.shape

    def geometry(self):
        return (self.x0, self.y0, self.cell_size, self.shape)

    def cell_centers(self) -> np.ndarray:
        h, w = self.shape
        xs = self.x0 + (np.arange(h, dtype=np.float64) + 0.5) * self.cell_size
        ys = self.y0 + (np.arange(w, dtype=np.float64) + 0.5) * self.cell_size
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([gx.ravel(), gy.ravel()], axis=1)

    def flat(self) -> ProposalSet:
        return ProposalSet(
            self.boxes.reshape(-1, 7), self.logits.reshape(-1), self.class_ids.reshape(-1)
        )


def _centers_in_footprint(centers: np.ndarray, box: Box7) -> np.ndarray:
    """Containment of 2D points in a box's BEV footprint (edges inclusive)."""
    corners = box_corners_bev(box)
    inside = np.ones(len(centers), dtype=bool)
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        cross = (b[0] - a[0]) * (centers[:, 1] - a[1]) - (b[1] - a[1]) * (centers[:, 0] - a[0])
        inside &= cross >= 0
    return inside


def foreground_sample_bev(grids, gt_boxes, cell_size: float | None = None) -> CfProposals:
    """Keep the BEV cells whose centers sit inside a ground-truth footprint."""
    g1, g2, g3 = grids
    if not (g1.geometry() == g2.geometry() == g3.geometry()):
        raise GridMismatch("BEV grids must share origin, cell size, and shape")
    if cell_size is not None and cell_size != g1.cell_size:
        raise GridMismatch("cell_size argument disagrees with the grids")

    centers = g1.cell_centers()
    hit = np.zeros(len(centers), dtype=bool)
    for b in gt_boxes:
        hit |= _centers_in_footprint(centers, b)
    cells = np.flatnonzero(hit)
    fg = ForegroundMask("bev", cells, int(cells.size))
    return CfProposals(
        g1.flat().take(cells), g2.flat().take(cells), g3.flat().take(cells), fg
    )
