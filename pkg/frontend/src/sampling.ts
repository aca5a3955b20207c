/**
 * Budget sampling, ring density equalization, and ground removal over
 * contiguous (N x 4) float32 point buffers — numerically identical to the
 * host library: geometry is evaluated in float64 with the same expression
 * order, and all randomness comes from the shared stream contract.
 */

import {
  BRANCH_PV1,
  DOMAIN_DES_DOWN,
  DOMAIN_DES_UP,
  DOMAIN_PAD,
  DOMAIN_SELECT,
  Stream,
  drawIndices,
  selectIndices,
} from "./philox.js";

export interface DesConfig {
  tau_far: number;
  d_t: number;
  mu: number;
  rho_s: number;
  rho_m: number;
  rho_l: number;
  s1: number;
  s2: number;
  s3: number;
  tau_z_min: number;
  tau_z_max: number;
  /** Uniform +/- bound on duplicated xyz; 0 or absent = exact duplicates. */
  jitter?: number;
}

export interface GasConfig {
  x_s: number;
  x_l: number;
  y_s: number;
  y_l: number;
  x_t: number;
  y_t: number;
  tau_h: number;
  passthrough_outside?: boolean;
}

export interface CropRange {
  x_min: number;
  x_max: number;
  y_min: number;
  y_max: number;
  z_min: number;
  z_max: number;
}

export function pointCount(points: Float32Array): number {
  if (points.length % 4 !== 0) throw new RangeError("point buffer length must be 4*N");
  return points.length / 4;
}

function gather(points: Float32Array, indices: ArrayLike<number>): Float32Array {
  const out = new Float32Array(indices.length * 4);
  for (let i = 0; i < indices.length; i++) {
    const src = indices[i] * 4;
    out[i * 4] = points[src];
    out[i * 4 + 1] = points[src + 1];
    out[i * 4 + 2] = points[src + 2];
    out[i * 4 + 3] = points[src + 3];
  }
  return out;
}

export function crop(points: Float32Array, range: CropRange): Float32Array {
  const n = pointCount(points);
  const keep: number[] = [];
  for (let i = 0; i < n; i++) {
    const x = points[i * 4];
    const y = points[i * 4 + 1];
    const z = points[i * 4 + 2];
    if (
      x >= range.x_min && x <= range.x_max &&
      y >= range.y_min && y <= range.y_max &&
      z >= range.z_min && z <= range.z_max
    ) {
      keep.push(i);
    }
  }
  return gather(points, keep);
}

export function randomFixedCount(
  points: Float32Array,
  nP: number,
  seed: bigint,
  branch = BRANCH_PV1,
): Float32Array {
  if (nP <= 0) throw new RangeError("n_p must be positive");
  const n = pointCount(points);
  if (n === 0) throw new RangeError("cannot sample a fixed count from an empty cloud");
  if (n === nP) return points.slice();
  if (n > nP) {
    return gather(points, selectIndices(n, nP, new Stream(seed, DOMAIN_SELECT, branch)));
  }
  const pad = drawIndices(nP - n, n, new Stream(seed, DOMAIN_PAD, branch));
  const indices = new Int32Array(nP);
  for (let i = 0; i < n; i++) indices[i] = i;
  indices.set(pad, n);
  return gather(points, indices);
}

export function ringCount(cfg: DesConfig): number {
  return Math.round(cfg.tau_far / cfg.d_t);
}

export function ringOf(points: Float32Array, cfg: DesConfig): Int32Array {
  const n = pointCount(points);
  const nR = ringCount(cfg);
  const ring = new Int32Array(n);
  for (let i = 0; i < n; i++) {
    const x = points[i * 4];
    const y = points[i * 4 + 1];
    const d = Math.sqrt(x * x + y * y);
    if (d > cfg.tau_far) {
      ring[i] = 0;
      continue;
    }
    let j = Math.ceil(d / cfg.d_t);
    if (j < 1) j = 1;
    if (j > nR) j = nR;
    ring[i] = j;
  }
  return ring;
}

export function ringArea(cfg: DesConfig, j: number): number {
  return cfg.mu * Math.PI * (2.0 * j - 1.0) * (cfg.d_t * cfg.d_t);
}

export function desSample(points: Float32Array, cfg: DesConfig, seed: bigint): Float32Array {
  const n = pointCount(points);
  const nR = ringCount(cfg);
  const ring = ringOf(points, cfg);
  const jitter = cfg.jitter ?? 0;
  const members: number[][] = Array.from({ length: nR + 1 }, () => []);
  for (let i = 0; i < n; i++) members[ring[i]].push(i);

  const keep = new Uint8Array(n).fill(1);
  const dupRows: number[] = [];
  for (let j = 1; j <= nR; j++) {
    const ringMembers = members[j];
    const nJ = ringMembers.length;
    if (nJ === 0) continue;
    const rho = nJ / ringArea(cfg, j);
    if (rho < cfg.rho_s) {
      const k = Math.trunc(cfg.s1 * nJ);
      if (k === 0) continue;
      const band = ringMembers.filter((i) => {
        const z = points[i * 4 + 2];
        return z >= cfg.tau_z_min && z <= cfg.tau_z_max;
      });
      if (band.length === 0) continue;
      const stream = new Stream(seed, DOMAIN_DES_UP, j);
      const draws = drawIndices(k, band.length, stream);
      const words = jitter > 0 ? stream.u32(3 * k) : null;
      for (let t = 0; t < k; t++) {
        const src = band[draws[t]] * 4;
        if (words) {
          for (let a = 0; a < 3; a++) {
            const offset = (words[3 * t + a] / 4294967296.0 * 2.0 - 1.0) * jitter;
            dupRows.push(Math.fround(points[src + a] + offset));
          }
          dupRows.push(points[src + 3]);
        } else {
          dupRows.push(points[src], points[src + 1], points[src + 2], points[src + 3]);
        }
      }
    } else if (rho < cfg.rho_m) {
      continue;
    } else {
      const s = rho < cfg.rho_l ? cfg.s2 : cfg.s3;
      const k = Math.trunc(s * nJ);
      if (k === 0) continue;
      const removed = selectIndices(nJ, k, new Stream(seed, DOMAIN_DES_DOWN, j));
      for (const r of removed) keep[ringMembers[r]] = 0;
    }
  }

  const indices: number[] = [];
  for (let i = 0; i < n; i++) if (keep[i]) indices.push(i);
  const out = new Float32Array(indices.length * 4 + dupRows.length);
  out.set(gather(points, indices));
  out.set(dupRows, indices.length * 4);
  return out;
}

export function gasFilter(points: Float32Array, cfg: GasConfig): Float32Array {
  const passthrough = cfg.passthrough_outside ?? true;
  const n = pointCount(points);
  const nGx = Math.round((cfg.x_l - cfg.x_s) / cfg.x_t);
  const nGy = Math.round((cfg.y_l - cfg.y_s) / cfg.y_t);
  const cell = new Int32Array(n);
  const hMin = new Float64Array(nGx * nGy).fill(Infinity);
  for (let i = 0; i < n; i++) {
    const x = points[i * 4];
    const y = points[i * 4 + 1];
    const z = points[i * 4 + 2];
    if (x >= cfg.x_s && x <= cfg.x_l && y >= cfg.y_s && y <= cfg.y_l) {
      let ix = Math.floor((x - cfg.x_s) / cfg.x_t);
      let iy = Math.floor((y - cfg.y_s) / cfg.y_t);
      if (ix > nGx - 1) ix = nGx - 1;
      if (iy > nGy - 1) iy = nGy - 1;
      const c = ix * nGy + iy;
      cell[i] = c;
      if (z < hMin[c]) hMin[c] = z;
    } else {
      cell[i] = -1;
    }
  }
  const keep: number[] = [];
  for (let i = 0; i < n; i++) {
    if (cell[i] === -1) {
      if (passthrough) keep.push(i);
    } else if (points[i * 4 + 2] > hMin[cell[i]] + cfg.tau_h) {
      keep.push(i);
    }
  }
  return gather(points, keep);
}
