/**
 * Consistent keypoint selection over three point buffers: unified-size
 * voxel hashing, three-way occupancy intersection, and first-match scanning
 * under a strict infinity-norm threshold over (x, y, z, reflectivity).
 */

import { pointCount } from "./sampling.js";

export interface CkpsConfig {
  voxel_size: number;
  tau_v: number;
  origin: [number, number, number];
}

const OFFSET = 1n << 20n;

function packKey(ix: number, iy: number, iz: number): bigint {
  return (
    ((BigInt(ix) + OFFSET) << 42n) |
    ((BigInt(iy) + OFFSET) << 21n) |
    (BigInt(iz) + OFFSET)
  );
}

export function voxelTable(points: Float32Array, cfg: CkpsConfig): Map<bigint, number[]> {
  const n = pointCount(points);
  const table = new Map<bigint, number[]>();
  for (let i = 0; i < n; i++) {
    const ix = Math.floor((points[i * 4] - cfg.origin[0]) / cfg.voxel_size);
    const iy = Math.floor((points[i * 4 + 1] - cfg.origin[1]) / cfg.voxel_size);
    const iz = Math.floor((points[i * 4 + 2] - cfg.origin[2]) / cfg.voxel_size);
    const key = packKey(ix, iy, iz);
    const list = table.get(key);
    if (list) list.push(i);
    else table.set(key, [i]);
  }
  return table;
}

function infNormBelow(
  a: Float32Array, ai: number, b: Float32Array, bi: number, tauV: number,
): boolean {
  for (let c = 0; c < 4; c++) {
    if (Math.abs(a[ai * 4 + c] - b[bi * 4 + c]) >= tauV) return false;
  }
  return true;
}

/** One (view1, view2, view3) index triple per shared voxel, voxel keys ascending. */
export function selectKeypoints(
  v1: Float32Array,
  v2: Float32Array,
  v3: Float32Array,
  cfg: CkpsConfig,
): Int32Array {
  const t1 = voxelTable(v1, cfg);
  const t2 = voxelTable(v2, cfg);
  const t3 = voxelTable(v3, cfg);
  const shared: bigint[] = [];
  for (const key of t1.keys()) {
    if (t2.has(key) && t3.has(key)) shared.push(key);
  }
  shared.sort((a, b) => (a < b ? -1 : a > b ? 1 : 0));

  const triples: number[] = [];
  for (const key of shared) {
    const list1 = t1.get(key)!;
    const list2 = t2.get(key)!;
    const list3 = t3.get(key)!;
    for (const i1 of list1) {
      let m2 = -1;
      for (const i2 of list2) {
        if (infNormBelow(v1, i1, v2, i2, cfg.tau_v)) {
          if (m2 === -1 || i2 < m2) m2 = i2;
        }
      }
      if (m2 === -1) continue;
      let m3 = -1;
      for (const i3 of list3) {
        if (infNormBelow(v1, i1, v3, i3, cfg.tau_v)) {
          if (m3 === -1 || i3 < m3) m3 = i3;
        }
      }
      if (m3 === -1) continue;
      triples.push(i1, m2, m3);
      break;
    }
  }
  return Int32Array.from(triples);
}
