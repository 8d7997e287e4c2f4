"""Multi-level stylization cascade and per-frame video stylization.

The image is cascaded through the codec from the deepest level down: at
each level the running result is re-encoded, transformed against the style
features, alpha-blended with the original content features, and decoded.
The decoded result is treated as the new content for the next level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import align
from .align import DegenerateAlignmentError, Mask, ScaleVariant
from .codec import DEFAULT_SEED, MAX_LEVEL, get_codec
from .features import (
    AxisConfig,
    DimensionError,
    FeatureMap,
    ImageBuffer,
    _interp_axis,
    resample_bilinear,
)


class DeepestOp(Enum):
    """Transform applied at the rigid-alignment levels."""

    MM_THEN_RA = "mm_then_ra"  # moment match, then align style to the matched content
    RA_ONLY = "ra_only"
    MM_ONLY = "mm_only"


@dataclass(frozen=True)
class PipelineConfig:
    levels: tuple = (4, 3, 2, 1)
    deepest_op: DeepestOp = DeepestOp.MM_THEN_RA
    ra_levels: frozenset = frozenset({4})
    alpha: float = 0.0
    scale_variant: ScaleVariant = ScaleVariant.CENTERED
    axis_config: AxisConfig = AxisConfig.CHANNELS_AS_POINTS
    eps: float = align.DEFAULT_EPS
    tau: float = align.DEFAULT_TAU
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        levels = tuple(self.levels)
        object.__setattr__(self, "levels", levels)
        object.__setattr__(self, "ra_levels", frozenset(self.ra_levels))
        if not levels:
            raise ValueError("levels must be non-empty")
        if any(l not in range(1, MAX_LEVEL + 1) for l in levels):
            raise ValueError(f"levels must be within 1..{MAX_LEVEL}, got {levels}")
        if any(a <= b for a, b in zip(levels, levels[1:])):
            raise ValueError(f"levels must be strictly descending, got {levels}")
        if not self.ra_levels <= set(levels):
            raise ValueError(f"ra_levels {set(self.ra_levels)} not a subset of levels {levels}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")


@dataclass(frozen=True)
class StyleEntry:
    image: np.ndarray            # (H, W, 3) in [0, 1]
    weight: float = 1.0
    mask: Mask | None = None


@dataclass(frozen=True)
class StyleSpec:
    """One or more weighted (optionally masked) style images."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("at least one style entry is required")
        total = sum(e.weight for e in entries)
        if any(e.weight < 0 for e in entries) or total <= 0:
            raise ValueError("style weights must be non-negative with positive sum")
        entries = tuple(
            StyleEntry(e.image, e.weight / total, e.mask) for e in entries
        )
        object.__setattr__(self, "entries", entries)

    @classmethod
    def single(cls, image):
        return cls((StyleEntry(np.asarray(image, dtype=np.float64)),))


@dataclass
class StylizeResult:
    image: ImageBuffer
    warnings: list = field(default_factory=list)


def resample_image(image: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear resample of an (H, W, C) image on a corner-aligned grid."""
    out = _interp_axis(np.asarray(image, dtype=np.float64), height, axis=0)
    return _interp_axis(out, width, axis=1)


def _transform_level(z_c: FeatureMap, z_s: FeatureMap, apply_ra: bool,
                     cfg: PipelineConfig, warnings: list, label: str) -> FeatureMap:
    matched = align.moment_match(z_c, z_s, eps=cfg.eps)
    if not apply_ra or cfg.deepest_op is DeepestOp.MM_ONLY:
        return matched
    target = z_c if cfg.deepest_op is DeepestOp.RA_ONLY else matched
    try:
        return align.rigid_align(
            target, z_s,
            variant=cfg.scale_variant, tau=cfg.tau, axis_config=cfg.axis_config,
        )
    except DegenerateAlignmentError as exc:
        warnings.append(f"{label}: degenerate alignment ({exc}); fell back to moment matching")
        return matched


def _combine_styles(z_c: FeatureMap, styled, entries, warnings) -> FeatureMap:
    masked = [(e.mask, f) for e, f in zip(entries, styled) if e.mask is not None]
    unmasked = [(e.weight, f) for e, f in zip(entries, styled) if e.mask is None]
    if unmasked:
        total = sum(w for w, _ in unmasked)
        fallback = FeatureMap(
            sum((w / total) * f.data for w, f in unmasked)
        )
    else:
        fallback = z_c
    if not masked:
        return fallback
    return align.spatial_composite(masked, fallback)


def stylize(content, styles: StyleSpec, cfg: PipelineConfig = PipelineConfig()) -> StylizeResult:
    """Run the multi-level cascade; returns the styled image plus warnings."""
    if isinstance(content, ImageBuffer):
        content = content.data
    content = np.asarray(content, dtype=np.float64)
    if content.ndim != 3 or content.shape[2] != 3:
        raise DimensionError(f"expected (H,W,3) content image, got {content.shape}")
    codec = get_codec(cfg.seed)
    h, w = content.shape[:2]
    style_images = [
        resample_image(np.asarray(e.image, dtype=np.float64), h, w)
        for e in styles.entries
    ]
    warnings: list = []
    current = content
    for level in cfg.levels:
        z_c = codec.encode(current, level)
        apply_ra = level in cfg.ra_levels
        styled = [
            _transform_level(
                z_c, codec.encode(img, level), apply_ra, cfg, warnings,
                label=f"level {level}, style {k}",
            )
            for k, img in enumerate(style_images)
        ]
        combined = _combine_styles(z_c, styled, styles.entries, warnings)
        if cfg.alpha > 0.0:
            combined = align.blend(codec.encode(content, level), combined, cfg.alpha)
        current = codec.decode(combined, level)
    return StylizeResult(ImageBuffer(current), warnings)


def stylize_video(frames, styles: StyleSpec, cfg: PipelineConfig = PipelineConfig()):
    """Independent per-frame stylization; order preserved, deterministic."""
    frames = list(frames)
    if frames:
        shape = np.asarray(frames[0]).shape
        for i, frame in enumerate(frames):
            if np.asarray(frame).shape != shape:
                raise DimensionError(f"frame {i} shape {np.asarray(frame).shape} != {shape}")
    results = []
    for i, frame in enumerate(frames):
        try:
            results.append(stylize(frame, styles, cfg))
        except Exception as exc:
            raise RuntimeError(f"stylization failed at frame {i}: {exc}") from exc
    return results


def transform_features(z_c: FeatureMap, z_s: FeatureMap,
                       cfg: PipelineConfig = PipelineConfig()) -> FeatureMap:
    """Single-level transform exactly as run at the deepest pipeline level.

    Style features are bilinearly resampled to the content's spatial grid
    when their sizes differ.
    """
    if z_s.shape[1:] != z_c.shape[1:]:
        z_s = resample_bilinear(z_s, z_c.height, z_c.width)
    warnings: list = []
    out = _transform_level(z_c, z_s, apply_ra=True, cfg=cfg, warnings=warnings,
                           label="transform_features")
    if warnings:
        raise DegenerateAlignmentError(warnings[0])
    return out
