"""Exception types raised across the library."""


class LidarPrepError(Exception):
    """Base class for all library errors."""


class TruncatedFrame(LidarPrepError):
    """Frame byte length is not a whole number of 16-byte point records."""


class NonFiniteValue(LidarPrepError):
    """A NaN or infinity was encountered during ingestion."""


class EmptyInput(LidarPrepError):
    """An operation that must produce points received an empty cloud."""


class MismatchedConfig(LidarPrepError):
    """Voxel tables built with different grid geometry were combined."""


class LengthMismatch(LidarPrepError):
    """Per-point proposal list is not aligned 1:1 with its point cloud."""


class GridMismatch(LidarPrepError):
    """BEV proposal grids do not share identical geometry across views."""


class DegenerateViews(LidarPrepError):
    """Fewer than two views were supplied to a multi-view weighting."""


class AlignmentError(LidarPrepError):
    """Feature table row count does not match its point cloud."""


class NoGroundTruth(LidarPrepError):
    """A frame that requires labels has none."""


class ConfigError(LidarPrepError):
    """Pipeline configuration failed validation."""
