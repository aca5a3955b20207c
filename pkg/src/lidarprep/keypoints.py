"""Consistent keypoint selection across the three sampled views.

Each view is voxelized at a unified size into a hash table keyed by integer
cell coordinates (half-open cells, so shared faces are unambiguous).  Voxels
occupied in all three views are intersected, and inside each shared voxel the
view-1 inner points are scanned in ascending point-index order; the first one
with a neighbour in *both* other views under a strict infinity-norm threshold
over (x, y, z, reflectivity) becomes that voxel's keypoint.  Ties in views 2
and 3 resolve to the lowest point index.  The result is one aligned index
triple per contributing voxel - a spatially uniform, deterministic mask.

Mask files are little-endian: a u32 triple count followed by u32 index
triples, with a JSON sidecar recording frame id and the selection thresholds.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cloud import PointCloud
from .errors import MismatchedConfig

_KEY_OFFSET = 1 << 20  # voxel coordinates must fit in 21 bits per axis


@dataclass(frozen=True)
class CkpsConfig:
    """Unified voxel size, match threshold, and voxel grid anchor."""

    voxel_size: float = 0.4
    tau_v: float = 0.001
    origin: tuple = (0.0, 0.0, 0.0)

    def violations(self) -> list:
        v = []
        if not self.voxel_size > 0:
            v.append("ckps: voxel_size must be > 0")
        if not self.tau_v > 0:
            v.append("ckps: tau_v must be > 0")
        if len(self.origin) != 3:
            v.append("ckps: origin must have three components")
        return v

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(c) for c in self.origin))
        v = self.violations()
        if v:
            raise ValueError("; ".join(v))


@dataclass
class VoxelHashTable:
    """Occupied voxels of one view with their inner point index lists.

    ``packed`` holds one sorted int64 key per occupied voxel; ``order`` lists
    point indices grouped by voxel (ascending within each group) with group
    boundaries in ``offsets``.
    """

    packed: np.ndarray
    order: np.ndarray
    offsets: np.ndarray
    cfg: CkpsConfig
    n_points: int

    def __len__(self) -> int:
        return self.packed.shape[0]

    def voxel_coords(self) -> np.ndarray:
        """(M, 3) integer voxel coordinates of the occupied cells."""
        k = self.packed
        ix = (k >> 42) - _KEY_OFFSET
        iy = ((k >> 21) & (_KEY_OFFSET * 2 - 1)) - _KEY_OFFSET
        iz = (k & (_KEY_OFFSET * 2 - 1)) - _KEY_OFFSET
        return np.stack([ix, iy, iz], axis=1)

    def inner_indices(self, key) -> np.ndarray:
        """Point indices inside one voxel, given (ix, iy, iz)."""
        packed = _pack(np.asarray([key[0]]), np.asarray([key[1]]), np.asarray([key[2]]))[0]
        pos = np.searchsorted(self.packed, packed)
        if pos == len(self.packed) or self.packed[pos] != packed:
            return np.empty(0, dtype=np.int64)
        return self.order[self.offsets[pos]:self.offsets[pos + 1]]

    def as_dict(self) -> dict:
        """{(ix, iy, iz): point index array} - convenience for small tables."""
        coords = self.voxel_coords()
        return {
            tuple(map(int, coords[m])): self.order[self.offsets[m]:self.offsets[m + 1]]
            for m in range(len(self))
        }


def _pack(ix: np.ndarray, iy: np.ndarray, iz: np.ndarray) -> np.ndarray:
    for axis in (ix, iy, iz):
        if axis.size and (axis.min() < -_KEY_OFFSET or axis.max() >= _KEY_OFFSET):
            raise ValueError("voxel coordinate out of packable range")
    return (
        ((ix + _KEY_OFFSET).astype(np.int64) << 42)
        | ((iy + _KEY_OFFSET).astype(np.int64) << 21)
        | (iz + _KEY_OFFSET).astype(np.int64)
    )


def voxelize(cloud: PointCloud, cfg: CkpsConfig) -> VoxelHashTable:
    """Build the voxel hash table of one view; every point lands in exactly one cell."""
    xyz = cloud.points[:, :3].astype(np.float64)
    ids = np.floor((xyz - np.asarray(cfg.origin)) / cfg.voxel_size).astype(np.int64)
    packed = _pack(ids[:, 0], ids[:, 1], ids[:, 2])
    order = np.argsort(packed, kind="stable")
    sorted_keys = packed[order]
    starts = np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]]) if len(cloud) else np.empty(0, dtype=np.int64)
    offsets = np.append(starts, len(cloud))
    return VoxelHashTable(sorted_keys[starts], order, offsets, cfg, len(cloud))


def _check_same_cfg(tables) -> None:
    first = tables[0].cfg
    for t in tables[1:]:
        if t.cfg.voxel_size != first.voxel_size or t.cfg.origin != first.origin:
            raise MismatchedConfig("voxel tables were built with different voxel_size/origin")


def shared_voxels(t1: VoxelHashTable, t2: VoxelHashTable, t3: VoxelHashTable) -> np.ndarray:
    """Packed keys of voxels occupied in all three views, sorted ascending."""
    _check_same_cfg((t1, t2, t3))
    return np.intersect1d(t1.packed, np.intersect1d(t2.packed, t3.packed))


@dataclass
class KeypointMask:
    """Aligned per-view point indices, one triple per contributing voxel."""

    view_indices: np.ndarray  # (M, 3) int64: columns are views 1..3
    anchors: np.ndarray | None = None  # (M, 4) float32 view-1 points
    frame_id: str = ""
    voxel_size: float = 0.0
    tau_v: float = 0.0

    def __len__(self) -> int:
        return self.view_indices.shape[0]


def _segment_slices(table: VoxelHashTable, shared: np.ndarray):
    """Per shared voxel: concatenated inner point indices and segment lengths."""
    pos = np.searchsorted(table.packed, shared)
    starts = table.offsets[pos]
    ends = table.offsets[pos + 1]
    counts = ends - starts
    total = int(counts.sum())
    # Gather the grouped index ranges [start_k, end_k) back to back.
    flat = np.repeat(starts, counts) + (
        np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    )
    return table.order[flat], counts


def _min_match(anchor_pts, anchor_counts, other_pts, other_idx, other_counts, tau_v):
    """For each anchor slot, the lowest matching point index in the other view.

    Anchors are grouped per voxel with ``anchor_counts`` slots per voxel; the
    other view contributes ``other_counts`` candidates per voxel.  Returns -1
    where no candidate is within tau_v on all four channels.
    """
    pair_per_voxel = anchor_counts * other_counts
    total = int(pair_per_voxel.sum())
    n_slots = int(anchor_counts.sum())
    if total == 0:
        return np.full(n_slots, -1, dtype=np.int64)

    voxel_of_pair = np.repeat(np.arange(len(pair_per_voxel)), pair_per_voxel)
    local = np.arange(total) - np.repeat(np.cumsum(pair_per_voxel) - pair_per_voxel, pair_per_voxel)
    oc = other_counts[voxel_of_pair]
    a_local = local // oc
    o_local = local - a_local * oc

    slot_base = np.cumsum(anchor_counts) - anchor_counts
    slot = slot_base[voxel_of_pair] + a_local
    other_base = np.cumsum(other_counts) - other_counts
    opos = other_base[voxel_of_pair] + o_local

    diff = np.abs(anchor_pts[slot] - other_pts[opos]).max(axis=1)
    candidate = np.where(diff < tau_v, other_idx[opos], np.iinfo(np.int64).max)
    # Pairs of one slot are contiguous, o_local-major, so reduceat per slot works.
    slot_starts = np.flatnonzero(np.r_[True, slot[1:] != slot[:-1]])
    best = np.full(n_slots, np.iinfo(np.int64).max, dtype=np.int64)
    best[slot[slot_starts]] = np.minimum.reduceat(candidate, slot_starts)
    best[best == np.iinfo(np.int64).max] = -1
    return best


def select_keypoints(
    cloud1: PointCloud, cloud2: PointCloud, cloud3: PointCloud, cfg: CkpsConfig
) -> KeypointMask:
    """Pick one consistent keypoint triple per voxel shared by all three views."""
    t1, t2, t3 = (voxelize(c, cfg) for c in (cloud1, cloud2, cloud3))
    shared = shared_voxels(t1, t2, t3)
    if shared.size == 0:
        return KeypointMask(
            np.empty((0, 3), dtype=np.int64),
            np.empty((0, 4), dtype=np.float32),
            cloud1.frame_id, cfg.voxel_size, cfg.tau_v,
        )

    idx1, n1 = _segment_slices(t1, shared)
    idx2, n2 = _segment_slices(t2, shared)
    idx3, n3 = _segment_slices(t3, shared)

    p1 = cloud1.points.astype(np.float64)[idx1]
    m2 = _min_match(p1, n1, cloud2.points.astype(np.float64)[idx2], idx2, n2, cfg.tau_v)
    m3 = _min_match(p1, n1, cloud3.points.astype(np.float64)[idx3], idx3, n3, cfg.tau_v)

    ok = (m2 >= 0) & (m3 >= 0)
    voxel_of_slot = np.repeat(np.arange(len(shared)), n1)
    hits = np.flatnonzero(ok)
    # First qualifying view-1 slot per voxel; slots are already index-ascending.
    _, first = np.unique(voxel_of_slot[hits], return_index=True)
    slot = hits[first]

    triples = np.stack([idx1[slot], m2[slot], m3[slot]], axis=1)
    return KeypointMask(
        triples, cloud1.points[triples[:, 0]],
        cloud1.frame_id, cfg.voxel_size, cfg.tau_v,
    )


def write_mask(mask: KeypointMask, path) -> None:
    """Binary triples plus a JSON sidecar describing how they were selected."""
    path = Path(path)
    triples = mask.view_indices.astype("<u4")
    blob = np.uint32(len(mask)).astype("<u4").tobytes() + triples.tobytes()
    path.write_bytes(blob)
    sidecar = {
        "schema_version": 1,
        "frame_id": mask.frame_id,
        "voxel_size": mask.voxel_size,
        "tau_v": mask.tau_v,
        "count": len(mask),
    }
    Path(str(path) + ".json").write_text(json.dumps(sidecar, sort_keys=True, indent=2) + "\n")


def read_mask(path) -> KeypointMask:
    """Load a mask file; anchors are re-attached from the view-1 cloud if needed."""
    path = Path(path)
    data = path.read_bytes()
    count = int(np.frombuffer(data[:4], dtype="<u4")[0])
    triples = np.frombuffer(data[4:], dtype="<u4").reshape(count, 3).astype(np.int64)
    mask = KeypointMask(triples)
    sidecar = Path(str(path) + ".json")
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        mask.frame_id = meta.get("frame_id", "")
        mask.voxel_size = float(meta.get("voxel_size", 0.0))
        mask.tau_v = float(meta.get("tau_v", 0.0))
    return mask


def attach_anchors(mask: KeypointMask, cloud1: PointCloud) -> KeypointMask:
    """Populate the canonical view-1 points of a mask loaded from disk."""
    mask.anchors = cloud1.points[mask.view_indices[:, 0]]
    return mask
