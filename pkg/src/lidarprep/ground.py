"""Ground Abandonment Sampling (GAS).

A planar rectangular grid covers the near field.  Within each cell every
point whose height is within ``tau_h`` of the cell's lowest point is treated
as ground and dropped; only points strictly above ``h_min + tau_h`` survive.
The cell minimum itself therefore never survives, and a cell whose height
spread is at most ``tau_h`` empties completely.  Cells are fixed-size, so
sloped or stepped terrain inside one cell can defeat the threshold; that is a
known limit of the method, not a bug.

Entirely deterministic: no seeds, input order preserved.
"""

from dataclasses import dataclass

import numpy as np

from .cloud import PointCloud

GRID_OUT = -1  # cell label for points outside the grid coverage


@dataclass(frozen=True)
class GasConfig:
    """Grid coverage, cell sizes, and the ground height threshold."""

    x_s: float = 0.0
    x_l: float = 40.0
    y_s: float = -35.0
    y_l: float = 35.0
    x_t: float = 5.0
    y_t: float = 10.0
    tau_h: float = 0.2
    passthrough_outside: bool = True

    def violations(self) -> list:
        v = []
        if not self.x_s < self.x_l:
            v.append("gas: x_s < x_l required")
        if not self.y_s < self.y_l:
            v.append("gas: y_s < y_l required")
        for span, step, name in ((self.x_l - self.x_s, self.x_t, "x"), (self.y_l - self.y_s, self.y_t, "y")):
            if step <= 0:
                v.append(f"gas: {name}_t must be > 0")
            elif span > 0:
                ratio = span / step
                if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
                    v.append(f"gas: ({name}_l - {name}_s)/{name}_t must be a positive integer grid count")
        if not self.tau_h > 0:
            v.append("gas: tau_h must be > 0")
        return v

    def __post_init__(self):
        v = self.violations()
        if v:
            raise ValueError("; ".join(v))

    @property
    def n_gx(self) -> int:
        return round((self.x_l - self.x_s) / self.x_t)

    @property
    def n_gy(self) -> int:
        return round((self.y_l - self.y_s) / self.y_t)


@dataclass
class GridAssignment:
    """Per-point cell labels and per-cell minimum heights."""

    cell: np.ndarray   # (N,) int64; row-major ix * n_gy + iy, or GRID_OUT
    h_min: np.ndarray  # (n_gx * n_gy,) float64; +inf for empty cells
    n_gx: int
    n_gy: int


def partition_grid(cloud: PointCloud, cfg: GasConfig) -> GridAssignment:
    """Assign in-range points to grid cells and record each cell's lowest height."""
    x = cloud.points[:, 0].astype(np.float64)
    y = cloud.points[:, 1].astype(np.float64)
    z = cloud.points[:, 2].astype(np.float64)
    n_gx, n_gy = cfg.n_gx, cfg.n_gy

    inside = (x >= cfg.x_s) & (x <= cfg.x_l) & (y >= cfg.y_s) & (y <= cfg.y_l)
    ix = np.floor((x - cfg.x_s) / cfg.x_t).astype(np.int64)
    iy = np.floor((y - cfg.y_s) / cfg.y_t).astype(np.int64)
    # Points exactly on the far boundary belong to the last cell.
    np.clip(ix, 0, n_gx - 1, out=ix)
    np.clip(iy, 0, n_gy - 1, out=iy)

    cell = np.where(inside, ix * n_gy + iy, GRID_OUT)
    h_min = np.full(n_gx * n_gy, np.inf)
    if inside.any():
        cin = cell[inside]
        order = np.argsort(cin, kind="stable")
        sorted_cells = cin[order]
        sorted_z = z[inside][order]
        starts = np.flatnonzero(np.r_[True, sorted_cells[1:] != sorted_cells[:-1]])
        h_min[sorted_cells[starts]] = np.minimum.reduceat(sorted_z, starts)
    return GridAssignment(cell, h_min, n_gx, n_gy)


def gas_filter(cloud: PointCloud, cfg: GasConfig) -> PointCloud:
    """Drop every in-grid point within tau_h of its cell's lowest point."""
    assign = partition_grid(cloud, cfg)
    z = cloud.points[:, 2].astype(np.float64)
    outside = assign.cell == GRID_OUT
    threshold = assign.h_min[np.where(outside, 0, assign.cell)] + cfg.tau_h
    keep = np.where(outside, cfg.passthrough_outside, z > threshold)
    return cloud.take(np.flatnonzero(keep))
