"""Multi-branch LiDAR point-cloud preprocessing.

Three sampling branches turn one frame into three views - a random budget
sample, a density-equalized sample that reinforces sparse far rings, and a
ground-removed sample - plus consistent keypoint masks tying the views
together, multi-view consistency losses over aligned proposals, geometric
fusion pooling, and a ratio-analysis suite for measuring what each sampler
does to foreground points.
"""

__version__ = "0.1.0"

from .analysis import (
    PercentShift,
    RatioReport,
    RegionSplit,
    ReportRow,
    emit_report,
    parse_report,
    ratio_report,
    region_percentages,
)
from .boxes import (
    Box7,
    Proposal,
    ProposalSet,
    bev_iou,
    box_corners_bev,
    nms,
    nms_indices,
    point_in_box,
    points_in_any_box,
    points_in_box,
)
from .cloud import (
    CropRange,
    PointCloud,
    crop,
    random_fixed_count,
    read_frame,
    write_frame,
)
from .config import (
    PipelineConfig,
    ValidationReport,
    load_config,
    preset_config,
    validate_config,
)
from .density import (
    DesConfig,
    RingPartition,
    des_sample,
    finalize_branch,
    partition_rings,
    ring_areas,
)
from .errors import (
    AlignmentError,
    ConfigError,
    DegenerateViews,
    EmptyInput,
    GridMismatch,
    LengthMismatch,
    LidarPrepError,
    MismatchedConfig,
    NoGroundTruth,
    NonFiniteValue,
    TruncatedFrame,
)
from .foreground import (
    BevGrid,
    CfProposals,
    ForegroundMask,
    foreground_sample_bev,
    foreground_sample_points,
)
from .ground import GasConfig, GridAssignment, gas_filter, partition_grid
from .keypoints import (
    CkpsConfig,
    KeypointMask,
    VoxelHashTable,
    attach_anchors,
    read_mask,
    select_keypoints,
    shared_voxels,
    voxelize,
    write_mask,
)
from .losses import (
    LAMBDA_PRESETS,
    LossBreakdown,
    consistency_box_loss,
    consistency_cls_loss,
    consistency_total,
    focal,
    focal_grad,
    sigmoid,
    smooth_l1,
    smooth_l1_grad,
    total_loss,
)
from .mvfp import MvfpConfig, MvfpResult, RoiPool, mvfp_pool
from .pipeline import PipelineResult, run_pipeline
