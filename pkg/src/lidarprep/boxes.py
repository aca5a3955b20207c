"""Oriented 7-DoF boxes: containment tests, rotated BEV IoU, and greedy NMS.

Boxes are (cx, cy, cz, l, w, h, yaw) with yaw about +z, normalized to
(-pi, pi].  Containment is inclusive on the faces; IoU is computed on the
rotated BEV footprints with Sutherland-Hodgman clipping.
"""

import math
from dataclasses import dataclass, field

import numpy as np

_SIGMOID = lambda x: 1.0 / (1.0 + np.exp(-x))


def normalize_yaw(yaw: float) -> float:
    y = math.fmod(yaw, 2.0 * math.pi)
    if y > math.pi:
        y -= 2.0 * math.pi
    elif y <= -math.pi:
        y += 2.0 * math.pi
    return y


@dataclass(frozen=True)
class Box7:
    """Oriented box: center, size, and heading."""

    cx: float
    cy: float
    cz: float
    l: float
    w: float
    h: float
    yaw: float

    def __post_init__(self):
        if not (self.l > 0 and self.w > 0 and self.h > 0):
            raise ValueError("box dimensions must be positive")
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))

    def as_array(self) -> np.ndarray:
        return np.array([self.cx, self.cy, self.cz, self.l, self.w, self.h, self.yaw])

    @staticmethod
    def from_array(a) -> "Box7":
        return Box7(*(float(v) for v in a))


@dataclass(frozen=True)
class Proposal:
    """A box with its raw (pre-sigmoid) classification logit."""

    box: Box7
    logit: float
    class_id: int = 0

    def __post_init__(self):
        if not math.isfinite(self.logit):
            raise ValueError("proposal logit must be finite")


@dataclass
class ProposalSet:
    """Array-backed proposal collection: (N, 7) boxes, (N,) logits and classes."""

    boxes: np.ndarray
    logits: np.ndarray
    class_ids: np.ndarray

    def __post_init__(self):
        self.boxes = np.asarray(self.boxes, dtype=np.float32).reshape(-1, 7)
        self.logits = np.asarray(self.logits, dtype=np.float32).reshape(-1)
        self.class_ids = np.asarray(self.class_ids, dtype=np.int32).reshape(-1)
        if not (len(self.boxes) == len(self.logits) == len(self.class_ids)):
            raise ValueError("boxes, logits, and class_ids must have equal length")

    def __len__(self) -> int:
        return self.boxes.shape[0]

    def take(self, indices) -> "ProposalSet":
        return ProposalSet(self.boxes[indices], self.logits[indices], self.class_ids[indices])

    def scores(self) -> np.ndarray:
        return _SIGMOID(self.logits.astype(np.float64))

    @staticmethod
    def from_proposals(items) -> "ProposalSet":
        if not items:
            return ProposalSet.empty()
        return ProposalSet(
            np.stack([p.box.as_array() for p in items]),
            np.array([p.logit for p in items]),
            np.array([p.class_id for p in items]),
        )

    @staticmethod
    def empty() -> "ProposalSet":
        return ProposalSet(np.empty((0, 7)), np.empty(0), np.empty(0, dtype=np.int32))

    @staticmethod
    def concat(sets) -> "ProposalSet":
        return ProposalSet(
            np.concatenate([s.boxes for s in sets]),
            np.concatenate([s.logits for s in sets]),
            np.concatenate([s.class_ids for s in sets]),
        )


def points_in_box(points: np.ndarray, box) -> np.ndarray:
    """Boolean mask of points inside an oriented box (faces inclusive)."""
    b = box.as_array() if isinstance(box, Box7) else np.asarray(box, dtype=np.float64)
    pts = np.asarray(points, dtype=np.float64)
    dx = pts[:, 0] - b[0]
    dy = pts[:, 1] - b[1]
    dz = pts[:, 2] - b[2]
    c, s = math.cos(b[6]), math.sin(b[6])
    local_x = c * dx + s * dy
    local_y = -s * dx + c * dy
    return (
        (np.abs(local_x) <= b[3] / 2.0)
        & (np.abs(local_y) <= b[4] / 2.0)
        & (np.abs(dz) <= b[5] / 2.0)
    )


def point_in_box(point, box: Box7) -> bool:
    """Single-point containment test."""
    p = np.asarray(point, dtype=np.float64).reshape(1, -1)
    return bool(points_in_box(p[:, :3], box)[0])


def points_in_any_box(points: np.ndarray, boxes) -> np.ndarray:
    """Mask of points contained by at least one box."""
    pts = np.asarray(points, dtype=np.float64)
    hit = np.zeros(len(pts), dtype=bool)
    for b in boxes:
        hit |= points_in_box(pts, b)
    return hit


def box_corners_bev(box) -> np.ndarray:
    """(4, 2) BEV footprint corners in counter-clockwise order."""
    b = box.as_array() if isinstance(box, Box7) else np.asarray(box, dtype=np.float64)
    half = np.array([
        [b[3] / 2.0, b[4] / 2.0],
        [-b[3] / 2.0, b[4] / 2.0],
        [-b[3] / 2.0, -b[4] / 2.0],
        [b[3] / 2.0, -b[4] / 2.0],
    ])
    c, s = math.cos(b[6]), math.sin(b[6])
    rot = np.array([[c, -s], [s, c]])
    return half @ rot.T + np.array([b[0], b[1]])


def _clip_polygon(subject: np.ndarray, clip: np.ndarray) -> np.ndarray:
    """Sutherland-Hodgman clip of a polygon against a convex CCW polygon."""
    output = list(subject)
    for i in range(len(clip)):
        a, b = clip[i], clip[(i + 1) % len(clip)]
        edge = (b[0] - a[0], b[1] - a[1])
        inputs, output = output, []
        if not inputs:
            break
        prev = inputs[-1]
        prev_in = edge[0] * (prev[1] - a[1]) - edge[1] * (prev[0] - a[0]) >= 0
        for cur in inputs:
            cur_in = edge[0] * (cur[1] - a[1]) - edge[1] * (cur[0] - a[0]) >= 0
            if cur_in != prev_in:
                dx, dy = cur[0] - prev[0], cur[1] - prev[1]
                denom = edge[0] * dy - edge[1] * dx
                t = (edge[1] * (prev[0] - a[0]) - edge[0] * (prev[1] - a[1])) / denom
                output.append((prev[0] + t * dx, prev[1] + t * dy))
            if cur_in:
                output.append(tuple(cur))
            prev, prev_in = cur, cur_in
    return np.asarray(output) if output else np.empty((0, 2))


def _polygon_area(poly: np.ndarray) -> float:
    if len(poly) < 3:
        return 0.0
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def bev_iou(a, b) -> float:
    """Rotated-rectangle IoU of the two BEV footprints, in [0, 1]."""
    ca, cb = box_corners_bev(a), box_corners_bev(b)
    inter = _polygon_area(_clip_polygon(ca, cb))
    area_a, area_b = _polygon_area(ca), _polygon_area(cb)
    union = area_a + area_b - inter
    if union <= 0:
        return 0.0
    return min(max(inter / union, 0.0), 1.0)


def nms_indices(proposals: ProposalSet, iou_threshold: float, max_keep: int) -> np.ndarray:
    """Greedy NMS by descending sigmoid score; ties keep the earlier input index."""
    if not 0 < iou_threshold <= 1:
        raise ValueError("iou_threshold must be in (0, 1]")
    n = len(proposals)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    order = np.argsort(-proposals.scores(), kind="stable")
    corners = [box_corners_bev(proposals.boxes[i]) for i in range(n)]
    areas = [_polygon_area(c) for c in corners]
    kept = []
    for i in order:
        suppressed = False
        for j in kept:
            inter = _polygon_area(_clip_polygon(corners[i], corners[j]))
            union = areas[i] + areas[j] - inter
            if union > 0 and inter / union > iou_threshold:
                suppressed = True
                break
        if not suppressed:
            kept.append(int(i))
            if len(kept) >= max_keep:
                break
    return np.asarray(kept, dtype=np.int64)


def nms(proposals: ProposalSet, iou_threshold: float, max_keep: int = 100) -> ProposalSet:
    """Greedy NMS returning the surviving proposals in selection order."""
    return proposals.take(nms_indices(proposals, iou_threshold, max_keep))
