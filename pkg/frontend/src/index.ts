/**
 * Typed-array bridge to the point-cloud preprocessing library: the sampling
 * branches, consistent keypoint selection, foreground sampling, and the
 * consistency losses, over contiguous numeric buffers with no file I/O.
 * Outputs are bit-identical to the host library under equal seeds; config
 * objects mirror the pipeline config field names exactly.
 */

export const VERSION = "0.1.0";

export {
  BRANCH_PV1,
  BRANCH_PV2,
  BRANCH_PV3,
  Stream,
  deriveFrameSeed,
  drawIndices,
  mulHi32,
  philoxBlock,
  selectIndices,
} from "./philox.js";
export {
  crop,
  desSample,
  gasFilter,
  pointCount,
  randomFixedCount,
  ringArea,
  ringCount,
  ringOf,
} from "./sampling.js";
export type { CropRange, DesConfig, GasConfig } from "./sampling.js";
export { selectKeypoints, voxelTable } from "./keypoints.js";
export type { CkpsConfig } from "./keypoints.js";
export {
  consistencyBoxLoss,
  consistencyClsLoss,
  consistencyTotal,
  focal,
  sigmoid,
  smoothL1,
  smoothL1Grad,
  totalLoss,
} from "./losses.js";
export type { ProposalView } from "./losses.js";
export { foregroundSamplePoints, pointInBox } from "./foreground.js";
export type { Box7, CfProposals, KeypointMask } from "./foreground.js";
