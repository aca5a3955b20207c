/**
 * Multi-view consistency losses over aligned proposal buffers, matching the
 * host library's accumulation order exactly: per-entry terms sum the two
 * non-reference views, component sums run left to right, and the final
 * reduction is a sequential left-to-right sum divided by the entry count.
 */

export const SMOOTH_L1_BETA = 1.0;
export const FOCAL_ALPHA = 0.25;
export const FOCAL_GAMMA = 2.0;
export const FOCAL_EPS = 1e-6;

export function smoothL1(d: number, beta = SMOOTH_L1_BETA): number {
  return d < beta ? 0.5 * d * d / beta : d - 0.5 * beta;
}

export function smoothL1Grad(d: number, beta = SMOOTH_L1_BETA): number {
  return d < beta ? d / beta : 1.0;
}

export function focal(d: number, alpha = FOCAL_ALPHA, gamma = FOCAL_GAMMA): number {
  const dc = Math.min(d, 1.0 - FOCAL_EPS);
  return alpha * Math.pow(d, gamma) * -Math.log(1.0 - dc);
}

export function sigmoid(x: number): number {
  return 1.0 / (1.0 + Math.exp(-x));
}

/** Aligned per-view proposals: (N x 7) float32 boxes and (N,) float32 logits. */
export interface ProposalView {
  boxes: Float32Array;
  logits: Float32Array;
}

function entryCount(views: [ProposalView, ProposalView, ProposalView]): number {
  const n = views[0].logits.length;
  for (const v of views) {
    if (v.boxes.length !== n * 7 || v.logits.length !== n) {
      throw new RangeError("CF views must be aligned with equal length");
    }
  }
  return n;
}

export function consistencyBoxLoss(
  views: [ProposalView, ProposalView, ProposalView],
  beta = SMOOTH_L1_BETA,
): number {
  const n = entryCount(views);
  if (n === 0) return 0.0;
  const [v1, v2, v3] = views;
  let total = 0.0;
  for (let j = 0; j < n; j++) {
    let acc = 0.0;
    for (let comp = 0; comp < 7; comp++) {
      const b1 = v1.boxes[j * 7 + comp];
      acc += smoothL1(Math.abs(v2.boxes[j * 7 + comp] - b1), beta) +
        smoothL1(Math.abs(v3.boxes[j * 7 + comp] - b1), beta);
    }
    total += acc / 7.0;
  }
  return total / n;
}

export function consistencyClsLoss(
  views: [ProposalView, ProposalView, ProposalView],
  alpha = FOCAL_ALPHA,
  gamma = FOCAL_GAMMA,
): number {
  const n = entryCount(views);
  if (n === 0) return 0.0;
  const [v1, v2, v3] = views;
  let total = 0.0;
  for (let j = 0; j < n; j++) {
    const s1 = sigmoid(v1.logits[j]);
    total += focal(Math.abs(sigmoid(v2.logits[j]) - s1), alpha, gamma) +
      focal(Math.abs(sigmoid(v3.logits[j]) - s1), alpha, gamma);
  }
  return total / n;
}

export function consistencyTotal(
  lClsC: number,
  lBoxC: number,
  nMv: number,
): { gamma: number; lCons: number } {
  if (nMv < 2) throw new RangeError("consistency weighting needs at least two views");
  const gamma = 1.0 / (nMv - 1);
  return { gamma, lCons: gamma * (lClsC + lBoxC) };
}

export function totalLoss(
  lCons: number,
  lCls: number,
  lBox: number,
  lDir: number,
  lRcnn: number,
  lambdas: [number, number, number],
  nMv: number,
): number {
  if (nMv < 1) throw new RangeError("total loss needs at least one view");
  const stage1 = lambdas[0] * lCls + lambdas[1] * lBox + lambdas[2] * lDir;
  return lCons + (1.0 / nMv) * stage1 + lRcnn;
}
