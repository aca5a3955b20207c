/**
 * Point-based foreground sampling: restrict per-point proposals to the
 * consistent keypoint mask, then keep the triples whose canonical (view-1)
 * point falls inside a ground-truth box. Membership is evaluated once on
 * the canonical point so all three views stay aligned.
 */

import type { ProposalView } from "./losses.js";

/** (cx, cy, cz, l, w, h, yaw) in meters/radians. */
export type Box7 = [number, number, number, number, number, number, number];

export interface KeypointMask {
  /** Flat (M x 3) row-major index triples into the three views. */
  triples: Int32Array;
  /** Flat (M x 4) float32 canonical view-1 points. */
  anchors: Float32Array;
}

export function pointInBox(x: number, y: number, z: number, b: Box7): boolean {
  const dx = x - b[0];
  const dy = y - b[1];
  const dz = z - b[2];
  const c = Math.cos(b[6]);
  const s = Math.sin(b[6]);
  const localX = c * dx + s * dy;
  const localY = -s * dx + c * dy;
  return (
    Math.abs(localX) <= b[3] / 2.0 &&
    Math.abs(localY) <= b[4] / 2.0 &&
    Math.abs(dz) <= b[5] / 2.0
  );
}

export interface CfProposals {
  /** Kept keypoint rows, ascending. */
  rows: Int32Array;
  views: [ProposalView, ProposalView, ProposalView];
}

export function foregroundSamplePoints(
  proposals: [ProposalView, ProposalView, ProposalView],
  gtBoxes: Box7[],
  mask: KeypointMask,
): CfProposals {
  const m = mask.triples.length / 3;
  for (let view = 0; view < 3; view++) {
    const limit = proposals[view].logits.length;
    for (let r = 0; r < m; r++) {
      if (mask.triples[r * 3 + view] >= limit) {
        throw new RangeError(`view ${view + 1} proposals shorter than mask indices`);
      }
    }
  }

  const rows: number[] = [];
  for (let r = 0; r < m; r++) {
    const x = mask.anchors[r * 4];
    const y = mask.anchors[r * 4 + 1];
    const z = mask.anchors[r * 4 + 2];
    if (gtBoxes.some((b) => pointInBox(x, y, z, b))) rows.push(r);
  }

  const views = proposals.map((pset, view) => {
    const boxes = new Float32Array(rows.length * 7);
    const logits = new Float32Array(rows.length);
    rows.forEach((r, out) => {
      const idx = mask.triples[r * 3 + view];
      boxes.set(pset.boxes.subarray(idx * 7, idx * 7 + 7), out * 7);
      logits[out] = pset.logits[idx];
    });
    return { boxes, logits };
  }) as [ProposalView, ProposalView, ProposalView];

  return { rows: Int32Array.from(rows), views };
}
