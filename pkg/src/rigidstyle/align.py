"""Moment matching, closed-form rigid alignment, and user-control combinators.

The alignment treats content and style features as point clouds, centers
and rescales both, and rotates the style cloud onto the content cloud with
the orthogonal matrix that solves the Procrustes problem in closed form
(SVD of the cross matrix). The rotation may include reflections; no
determinant correction is applied.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .features import (
    AxisConfig,
    DimensionError,
    FeatureMap,
    PointCloud,
    as_point_cloud,
    channel_stats,
    resample_nearest_2d,
)

DEFAULT_EPS = 1e-5     # floor on channel standard deviation in moment matching
DEFAULT_TAU = 1e-7     # relative rank tolerance for the cross-matrix SVD
_DEGENERATE_FLOOR = 1e-12


class DegenerateAlignmentError(RuntimeError):
    """The cross matrix is numerically zero; no meaningful rotation exists."""


class ScaleVariant(Enum):
    """Which Frobenius norm divides the centered cloud during normalization.

    CENTERED uses the norm of the centered cloud (standard Procrustes;
    makes similarity-transform recovery exact). LITERAL uses the norm of
    the uncentered cloud.
    """

    CENTERED = "centered"
    LITERAL = "literal"


@dataclass(frozen=True)
class Mask:
    """An H x W binary spatial mask."""

    data: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.data, dtype=np.float64)
        if arr.ndim != 2:
            raise DimensionError(f"mask must be 2-d, got ndim={arr.ndim}")
        if not np.all((arr == 0.0) | (arr == 1.0)):
            raise ValueError("mask values must be 0 or 1")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)

    def resampled(self, height, width):
        return resample_nearest_2d(self.data, height, width)


@dataclass(frozen=True)
class AlignmentResult:
    """Thin SVD factors of the cross matrix plus the shift/scale data.

    The represented rotation is Q = V U^T; it is applied to a cloud X as
    (X @ V) @ U^T, which never materializes the D x D matrix.
    """

    u: np.ndarray              # D x r, orthonormal columns
    v: np.ndarray              # D x r, orthonormal columns
    singular_values: np.ndarray  # r, descending, > tau * s_1
    content_centroid: np.ndarray
    style_centroid: np.ndarray
    content_scale: float
    style_scale: float

    @property
    def rank(self):
        return int(self.singular_values.shape[0])

    def apply_rotation(self, points: np.ndarray) -> np.ndarray:
        """Rotate an N x D block of points by Q = V U^T."""
        return (points @ self.v) @ self.u.T


def moment_match(content: FeatureMap, style: FeatureMap, eps: float = DEFAULT_EPS) -> FeatureMap:
    """Match per-channel mean and standard deviation of content to style.

    Channels whose content standard deviation falls below ``eps`` are not
    scaled up; constant channels map to the style channel mean.
    """
    if content.channels != style.channels:
        raise DimensionError(
            f"channel mismatch: content has {content.channels}, style has {style.channels}"
        )
    cs = channel_stats(content)
    ss = channel_stats(style)
    denom = np.maximum(cs.std, eps)[:, None, None]
    out = (content.data - cs.mean[:, None, None]) / denom
    return FeatureMap(out * ss.std[:, None, None] + ss.mean[:, None, None])


def _thin_cross_svd(x: np.ndarray, y: np.ndarray, tau: float):
    """Thin SVD of A = x^T y, rank-truncated at tau * s_1.

    When the clouds have fewer points than dimensions the D x D cross
    matrix has rank <= N; factor through QR of the transposes and take
    the SVD of the small N x N core instead of the dense A.
    """
    n, d = x.shape
    if n < d:
        qc, rc = np.linalg.qr(x.T)   # D x N, N x N
        qs, rs = np.linalg.qr(y.T)
        uu, s, vvt = np.linalg.svd(rc @ rs.T)
        u = qc @ uu
        v = qs @ vvt.T
    else:
        u, s, vt = np.linalg.svd(x.T @ y, full_matrices=False)
        v = vt.T
    if s.size == 0 or s[0] < _DEGENERATE_FLOOR:
        raise DegenerateAlignmentError("cross matrix is numerically zero")
    r = int(np.sum(s > tau * s[0]))
    return u[:, :r], s[:r], v[:, :r]


def _check_centered(pc: PointCloud, name: str):
    mu = pc.data.mean(axis=0)
    scale = max(1.0, float(np.max(np.abs(pc.data), initial=0.0)))
    if np.max(np.abs(mu)) > 1e-6 * scale:
        raise ValueError(f"{name} cloud is not centered (centroid {mu})")


def solve_rotation(content_cloud: PointCloud, style_cloud: PointCloud,
                   tau: float = DEFAULT_TAU) -> AlignmentResult:
    """Closed-form solution of the orthogonal Procrustes problem.

    Both clouds must already be centered and share N and D. Returns the
    thin SVD factors of the cross matrix content^T style; the rotation
    Q = V U^T maximizes trace(content^T style Q) over orthogonal Q.
    """
    if content_cloud.data.shape != style_cloud.data.shape:
        raise DimensionError(
            f"cloud shape mismatch: {content_cloud.data.shape} vs {style_cloud.data.shape}"
        )
    _check_centered(content_cloud, "content")
    _check_centered(style_cloud, "style")
    u, s, v = _thin_cross_svd(content_cloud.data, style_cloud.data, tau)
    d = content_cloud.dim
    return AlignmentResult(
        u=u, v=v, singular_values=s,
        content_centroid=np.zeros(d), style_centroid=np.zeros(d),
        content_scale=1.0, style_scale=1.0,
    )


def fit_alignment(content_cloud: PointCloud, style_cloud: PointCloud,
                  variant: ScaleVariant = ScaleVariant.CENTERED,
                  tau: float = DEFAULT_TAU) -> AlignmentResult:
    """Full shift-scale-rotate fit of the style cloud onto the content cloud."""
    if content_cloud.data.shape != style_cloud.data.shape:
        raise DimensionError(
            f"cloud shape mismatch: {content_cloud.data.shape} vs {style_cloud.data.shape}"
        )
    mu_c = content_cloud.data.mean(axis=0)
    mu_s = style_cloud.data.mean(axis=0)
    xc = content_cloud.data - mu_c
    xs = style_cloud.data - mu_s
    if variant is ScaleVariant.CENTERED:
        gamma_c = float(np.linalg.norm(xc))
        gamma_s = float(np.linalg.norm(xs))
    else:
        gamma_c = float(np.linalg.norm(content_cloud.data))
        gamma_s = float(np.linalg.norm(style_cloud.data))
    if gamma_c < _DEGENERATE_FLOOR or gamma_s < _DEGENERATE_FLOOR:
        raise DegenerateAlignmentError("a point cloud has (near-)zero norm")
    u, s, v = _thin_cross_svd(xc / gamma_c, xs / gamma_s, tau)
    return AlignmentResult(
        u=u, v=v, singular_values=s,
        content_centroid=mu_c, style_centroid=mu_s,
        content_scale=gamma_c, style_scale=gamma_s,
    )


def apply_alignment(result: AlignmentResult, style_cloud: PointCloud) -> PointCloud:
    """Shift, scale and rotate the style cloud per a fitted alignment."""
    xs = style_cloud.data - result.style_centroid
    rotated = result.apply_rotation(xs)
    out = rotated * (result.content_scale / result.style_scale) + result.content_centroid
    return style_cloud.with_data(out)


def rigid_align(content: FeatureMap, style: FeatureMap,
                variant: ScaleVariant = ScaleVariant.CENTERED,
                tau: float = DEFAULT_TAU,
                axis_config: AxisConfig = AxisConfig.CHANNELS_AS_POINTS) -> FeatureMap:
    """Align the style features to the content features by a rigid transform.

    Output has the content shape; its point-cloud centroid equals the
    content centroid and (CENTERED variant) its centered Frobenius norm
    equals the content's.
    """
    if content.channels != style.channels:
        raise DimensionError(
            f"channel mismatch: content has {content.channels}, style has {style.channels}"
        )
    if content.height * content.width != style.height * style.width:
        raise DimensionError(
            f"spatial size mismatch: {content.height}x{content.width} vs "
            f"{style.height}x{style.width} (resample first)"
        )
    pc_c = as_point_cloud(content, axis_config)
    # Keep the content's spatial shape on the style view so the output
    # reshapes to the content shape.
    flat_s = style.data.reshape(style.channels, -1)
    if axis_config is AxisConfig.PIXELS_AS_POINTS:
        flat_s = flat_s.T
    pc_s = PointCloud(flat_s, axis_config, content.shape)
    result = fit_alignment(pc_c, pc_s, variant=variant, tau=tau)
    return apply_alignment(result, pc_s).to_feature_map()


def blend(content: FeatureMap, styled: FeatureMap, alpha: float) -> FeatureMap:
    """Convex combination alpha * content + (1 - alpha) * styled."""
    if content.shape != styled.shape:
        raise DimensionError(f"shape mismatch: {content.shape} vs {styled.shape}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    return FeatureMap(alpha * content.data + (1.0 - alpha) * styled.data)


def interpolate_styles(content: FeatureMap, styled_1: FeatureMap, styled_2: FeatureMap,
                       alpha: float, beta: float) -> FeatureMap:
    """alpha * content + (1 - alpha) * (beta * styled_1 + (1 - beta) * styled_2)."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {beta}")
    mixed = FeatureMap(beta * styled_1.data + (1.0 - beta) * styled_2.data)
    return blend(content, mixed, alpha)


def spatial_composite(regions, fallback: FeatureMap) -> FeatureMap:
    """Stitch styled features spatially: first mask that is 1 wins per site.

    ``regions`` is a sequence of (Mask, FeatureMap) pairs; masks are
    resampled (nearest-neighbor) to the feature resolution. Sites covered
    by no mask take the fallback features.
    """
    out = np.array(fallback.data)
    h, w = fallback.height, fallback.width
    claimed = np.zeros((h, w), dtype=bool)
    for mask, styled in regions:
        if styled.shape != fallback.shape:
            raise DimensionError(f"shape mismatch: {styled.shape} vs {fallback.shape}")
        m = mask.resampled(h, w).astype(bool)
        take = m & ~claimed
        out[:, take] = styled.data[:, take]
        claimed |= m
    return FeatureMap(out)
