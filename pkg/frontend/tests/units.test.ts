import { describe, expect, it } from "vitest";

import {
  consistencyBoxLoss,
  consistencyClsLoss,
  consistencyTotal,
  totalLoss,
} from "../src/losses.js";
import { desSample, gasFilter, ringOf } from "../src/sampling.js";
import { pointInBox, foregroundSamplePoints } from "../src/foreground.js";
import { selectKeypoints } from "../src/keypoints.js";

const DES = {
  tau_far: 40, d_t: 5, mu: 0.5,
  rho_s: 5, rho_m: 8, rho_l: 15,
  s1: 0.15, s2: 0.1, s3: 0.15,
  tau_z_min: -1.5, tau_z_max: 0.5,
};
const GAS = { x_s: 0, x_l: 40, y_s: -35, y_l: 35, x_t: 5, y_t: 10, tau_h: 0.2 };

function cloud(rows: number[][]): Float32Array {
  return Float32Array.from(rows.flat());
}

describe("sampling kernels", () => {
  it("assigns rings by planar distance", () => {
    const ring = ringOf(cloud([[12, 0, 0, 0.5], [0, 0, 0, 0], [41, 0, 0, 0]]), DES);
    expect([...ring]).toEqual([3, 1, 0]);
  });

  it("ground filter keeps strictly above the cell minimum plus threshold", () => {
    const pts = cloud([
      [1, 1, -1.7, 0], [1, 2, -1.6, 0], [2, 1, -1.45, 0], [2, 2, 0.2, 0],
    ]);
    const out = gasFilter(pts, GAS);
    const z = [out[2], out[6]].sort((a, b) => a - b);
    expect(out.length).toBe(8);
    expect(z[0]).toBeCloseTo(-1.45, 6);
    expect(z[1]).toBeCloseTo(0.2, 6);
  });

  it("sparse rings gain only height-band duplicates", () => {
    const rows: number[][] = [];
    for (let i = 0; i < 100; i++) rows.push([11 + (i % 10) * 0.3, 0.5 * (i % 7), 0.0, 0.25]);
    const out = desSample(cloud(rows), DES, 3n);
    expect(out.length / 4).toBe(115);
    const flat = rows.map((r) => Float32Array.from(r).join(","));
    for (let i = 100; i < 115; i++) {
      const dup = out.subarray(i * 4, i * 4 + 4).join(",");
      expect(flat).toContain(dup);
    }
  });
});

describe("keypoints and foreground", () => {
  const CFG = { voxel_size: 1.0, tau_v: 0.001, origin: [0, 0, 0] as [number, number, number] };

  it("exact coincidences produce one triple per voxel", () => {
    const c = cloud([[1, 1, 1, 0.5]]);
    expect([...selectKeypoints(c, c, c, CFG)]).toEqual([0, 0, 0]);
    const off = cloud([[1.002, 1, 1, 0.5]]);
    expect(selectKeypoints(c, off, c, CFG).length).toBe(0);
  });

  it("foreground keeps triples whose anchor is inside a ground-truth box", () => {
    expect(pointInBox(0.5, 0.5, 0, [0, 0, 0, 2, 2, 2, 0])).toBe(true);
    expect(pointInBox(1.5, 0, 0, [0, 0, 0, 2, 2, 2, 0])).toBe(false);

    const mask = {
      triples: Int32Array.from([0, 0, 0, 1, 1, 1]),
      anchors: Float32Array.from([2.5, 2.5, 2.5, 0.5, 8, 8, 2, 0.3]),
    };
    const view = {
      boxes: Float32Array.from({ length: 14 }, (_, i) => i),
      logits: Float32Array.from([0.1, 0.9]),
    };
    const cf = foregroundSamplePoints(
      [view, view, view], [[2.5, 2.5, 2.5, 3, 3, 3, 0]], mask,
    );
    expect([...cf.rows]).toEqual([0]);
    expect(cf.views[0].logits.length).toBe(1);
  });
});

describe("losses", () => {
  it("identical views give exactly zero", () => {
    const v = { boxes: Float32Array.from([1, 2, 0, 4, 2, 1.5, 0.3]), logits: Float32Array.from([0.7]) };
    expect(consistencyBoxLoss([v, v, v])).toBe(0);
    expect(consistencyClsLoss([v, v, v])).toBe(0);
  });

  it("single-component disagreement matches the closed form", () => {
    const v1 = { boxes: Float32Array.from([1, 2, 0, 4, 2, 1.5, 0.3]), logits: Float32Array.from([0]) };
    const b2 = Float32Array.from([1.5, 2, 0, 4, 2, 1.5, 0.3]);
    const v2 = { boxes: b2, logits: Float32Array.from([0]) };
    expect(consistencyBoxLoss([v1, v2, v1])).toBeCloseTo(0.125 / 7, 12);
  });

  it("view weights follow the inverse-proportion rule", () => {
    expect(consistencyTotal(0, 0, 3).gamma).toBe(0.5);
    expect(consistencyTotal(0, 0, 2).gamma).toBe(1.0);
    expect(consistencyTotal(0.2, 0.3, 3).lCons).toBeCloseTo(0.25, 12);
  });

  it("total composition matches the arithmetic", () => {
    const got = totalLoss(0.3, 0.6, 0.9, 0.1, 0.4, [1, 2, 0.2], 3);
    expect(got).toBeCloseTo(1.5066666666666668, 12);
    expect(totalLoss(0, 3, 0, 0, 0, [1, 1, 0], 3)).toBeCloseTo(1.0, 12);
  });
});
