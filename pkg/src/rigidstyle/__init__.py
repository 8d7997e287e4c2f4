"""Feature-space arbitrary style transfer via moment matching and rigid alignment."""

from .align import (
    AlignmentResult,
    DegenerateAlignmentError,
    Mask,
    ScaleVariant,
    blend,
    interpolate_styles,
    moment_match,
    rigid_align,
    solve_rotation,
    spatial_composite,
)
from .codec import Codec, get_codec
from .features import (
    AxisConfig,
    ChannelStats,
    DimensionError,
    FeatureMap,
    ImageBuffer,
    PointCloud,
    as_point_cloud,
    center,
    centroid,
    channel_stats,
    frobenius_norm,
    resample_bilinear,
)
from .metrics import GramMatrix, TimingReport, bench, content_loss, gram, psnr, style_loss
from .pipeline import (
    DeepestOp,
    PipelineConfig,
    StyleEntry,
    StyleSpec,
    StylizeResult,
    stylize,
    stylize_video,
    transform_features,
)

__all__ = [
    "AlignmentResult",
    "AxisConfig",
    "ChannelStats",
    "Codec",
    "DeepestOp",
    "DegenerateAlignmentError",
    "DimensionError",
    "FeatureMap",
    "GramMatrix",
    "ImageBuffer",
    "Mask",
    "PipelineConfig",
    "PointCloud",
    "ScaleVariant",
    "StyleEntry",
    "StyleSpec",
    "StylizeResult",
    "TimingReport",
    "as_point_cloud",
    "bench",
    "blend",
    "center",
    "centroid",
    "channel_stats",
    "content_loss",
    "frobenius_norm",
    "get_codec",
    "gram",
    "interpolate_styles",
    "moment_match",
    "psnr",
    "resample_bilinear",
    "rigid_align",
    "solve_rotation",
    "spatial_composite",
    "style_loss",
    "stylize",
    "stylize_video",
    "transform_features",
]

__version__ = "0.1.0"
