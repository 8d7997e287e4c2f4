"""Tensor containers, point-cloud views, and basic feature statistics."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class DimensionError(ValueError):
    """Raised when tensor shapes are incompatible for an operation."""


class AxisConfig(Enum):
    """How a C x H x W feature is viewed as a point cloud."""

    CHANNELS_AS_POINTS = "channels_as_points"  # C points in R^{H*W}
    PIXELS_AS_POINTS = "pixels_as_points"      # H*W points in R^C


def _as_readonly(a, shape=None, dtype=np.float64):
    arr = np.asarray(a, dtype=dtype)
    if shape is not None:
        arr = arr.reshape(shape)
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FeatureMap:
    """A C x H x W tensor of finite reals, channel-first row-major."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3:
            raise DimensionError(f"feature map must be 3-d (C,H,W), got ndim={arr.ndim}")
        if min(arr.shape) < 1:
            raise DimensionError(f"feature map dims must be positive, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("feature map contains non-finite values")
        object.__setattr__(self, "data", _as_readonly(arr))

    @property
    def channels(self):
        return self.data.shape[0]

    @property
    def height(self):
        return self.data.shape[1]

    @property
    def width(self):
        return self.data.shape[2]

    @property
    def shape(self):
        return self.data.shape


@dataclass(frozen=True)
class PointCloud:
    """An N x D view of a feature map, tagged with its axis configuration.

    Keeps the originating spatial shape so the view can be inverted
    losslessly.
    """

    data: np.ndarray
    axis_config: AxisConfig
    feature_shape: tuple  # (C, H, W) of the originating FeatureMap

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionError(f"point cloud must be 2-d (N,D), got ndim={arr.ndim}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("point cloud contains non-finite values")
        c, h, w = self.feature_shape
        expect = (c, h * w) if self.axis_config is AxisConfig.CHANNELS_AS_POINTS else (h * w, c)
        if arr.shape != expect:
            raise DimensionError(
                f"cloud shape {arr.shape} inconsistent with feature shape {self.feature_shape}"
            )
        object.__setattr__(self, "data", _as_readonly(arr))
        object.__setattr__(self, "feature_shape", tuple(self.feature_shape))

    @property
    def points(self):
        return self.data.shape[0]

    @property
    def dim(self):
        return self.data.shape[1]

    def with_data(self, data):
        """Same view metadata, new coordinates."""
        return PointCloud(data, self.axis_config, self.feature_shape)

    def to_feature_map(self):
        """Invert the view; bit-exact round trip with as_point_cloud."""
        c, h, w = self.feature_shape
        if self.axis_config is AxisConfig.CHANNELS_AS_POINTS:
            return FeatureMap(self.data.reshape(c, h, w))
        return FeatureMap(self.data.T.reshape(c, h, w))


@dataclass(frozen=True)
class ChannelStats:
    """Per-channel mean and population variance over spatial positions."""

    mean: np.ndarray
    variance: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "mean", _as_readonly(self.mean))
        object.__setattr__(self, "variance", _as_readonly(self.variance))
        if self.mean.shape != self.variance.shape or self.mean.ndim != 1:
            raise DimensionError("mean and variance must be 1-d vectors of equal length")
        if np.any(self.variance < 0):
            raise ValueError("variance must be non-negative")

    @property
    def std(self):
        return np.sqrt(self.variance)


@dataclass(frozen=True)
class ImageBuffer:
    """An H x W x 3 image with values in [0, 1]."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise DimensionError(f"image must be (H,W,3), got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image contains non-finite values")
        object.__setattr__(self, "data", _as_readonly(np.clip(arr, 0.0, 1.0)))

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]


def channel_stats(f: FeatureMap) -> ChannelStats:
    """Mean and population variance of each channel over its H*W entries."""
    flat = f.data.reshape(f.channels, -1)
    return ChannelStats(flat.mean(axis=1), flat.var(axis=1))


def as_point_cloud(f: FeatureMap, axis_config: AxisConfig = AxisConfig.CHANNELS_AS_POINTS) -> PointCloud:
    """View a feature map as a point cloud under the given axis configuration."""
    flat = f.data.reshape(f.channels, -1)
    if axis_config is AxisConfig.CHANNELS_AS_POINTS:
        return PointCloud(flat, axis_config, f.shape)
    return PointCloud(flat.T, axis_config, f.shape)


def centroid(pc: PointCloud) -> np.ndarray:
    """Arithmetic mean of the N points."""
    return pc.data.mean(axis=0)


def center(pc: PointCloud):
    """Subtract the centroid from every point; returns (centered cloud, centroid)."""
    mu = centroid(pc)
    return pc.with_data(pc.data - mu), mu


def frobenius_norm(pc: PointCloud) -> float:
    """Square root of the sum of squares of all entries."""
    return float(np.linalg.norm(pc.data))


def _corner_aligned_grid(n_out, n_in):
    if n_out == 1 or n_in == 1:
        return np.zeros(n_out)
    return np.arange(n_out) * (n_in - 1) / (n_out - 1)


def _interp_axis(x, n_out, axis):
    n_in = x.shape[axis]
    pos = _corner_aligned_grid(n_out, n_in)
    i0 = np.floor(pos).astype(int)
    i0 = np.minimum(i0, n_in - 1)
    i1 = np.minimum(i0 + 1, n_in - 1)
    frac = pos - i0
    lo = np.take(x, i0, axis=axis)
    hi = np.take(x, i1, axis=axis)
    shape = [1] * x.ndim
    shape[axis] = n_out
    frac = frac.reshape(shape)
    return lo * (1.0 - frac) + hi * frac


def resample_bilinear(f: FeatureMap, new_height: int, new_width: int) -> FeatureMap:
    """Per-channel bilinear resampling on a corner-aligned grid."""
    if new_height < 1 or new_width < 1:
        raise DimensionError("target dimensions must be positive")
    out = _interp_axis(f.data, new_height, axis=1)
    out = _interp_axis(out, new_width, axis=2)
    return FeatureMap(out)


def resample_nearest_2d(grid: np.ndarray, new_height: int, new_width: int) -> np.ndarray:
    """Nearest-neighbor resample of a 2-d array on a corner-aligned grid."""
    grid = np.asarray(grid)
    if grid.ndim != 2:
        raise DimensionError("expected a 2-d array")
    rows = np.rint(_corner_aligned_grid(new_height, grid.shape[0])).astype(int)
    cols = np.rint(_corner_aligned_grid(new_width, grid.shape[1])).astype(int)
    return grid[np.ix_(rows, cols)]
