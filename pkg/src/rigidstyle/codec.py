"""Exactly-invertible multi-level image codec.

Each level applies space-to-depth (factor 2) followed by an orthogonal
channel-mixing matrix, so encode/decode are exact inverses and both are
Frobenius isometries. Level L maps an H x W x 3 image to a feature map of
shape (3 * 4^L) x H/2^L x W/2^L. The mixing matrices are the orthogonal
factors of QR decompositions of seeded Gaussian matrices.
"""

from __future__ import annotations

import numpy as np

from .features import DimensionError, FeatureMap, ImageBuffer

DEFAULT_SEED = 901723
MAX_LEVEL = 4

_codec_cache: dict = {}


def _orthogonal(rng: np.random.Generator, n: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    # Fix signs so the triangular factor has positive diagonal; makes the
    # matrix a deterministic function of the seed.
    return q * np.sign(np.diag(r))


def _space_to_depth(x: np.ndarray) -> np.ndarray:
    c, h, w = x.shape
    return (
        x.reshape(c, h // 2, 2, w // 2, 2)
        .transpose(0, 2, 4, 1, 3)
        .reshape(4 * c, h // 2, w // 2)
    )


def _depth_to_space(x: np.ndarray) -> np.ndarray:
    c4, h, w = x.shape
    c = c4 // 4
    return (
        x.reshape(c, 2, 2, h, w)
        .transpose(0, 3, 1, 4, 2)
        .reshape(c, 2 * h, 2 * w)
    )


class Codec:
    """Immutable encode/decode tables for all four levels."""

    def __init__(self, seed: int = DEFAULT_SEED):
        self.seed = int(seed)
        rng = np.random.default_rng(self.seed)
        self._mix = [_orthogonal(rng, 3 * 4 ** k) for k in range(1, MAX_LEVEL + 1)]

    def mixing_matrix(self, stage: int) -> np.ndarray:
        return self._mix[stage - 1]

    def encode(self, image, level: int) -> FeatureMap:
        """Encode an H x W x 3 array (or ImageBuffer) to level-``level`` features."""
        if isinstance(image, ImageBuffer):
            image = image.data
        image = np.asarray(image, dtype=np.float64)
        if image.ndim != 3 or image.shape[2] != 3:
            raise DimensionError(f"expected (H,W,3) image, got {image.shape}")
        self._check_level(level)
        h, w = image.shape[:2]
        if h % 2 ** level or w % 2 ** level:
            raise DimensionError(
                f"image {h}x{w} not divisible by 2^{level}; pad before encoding"
            )
        x = image.transpose(2, 0, 1)
        for stage in range(1, level + 1):
            x = _space_to_depth(x)
            c, hh, ww = x.shape
            x = (self._mix[stage - 1] @ x.reshape(c, -1)).reshape(c, hh, ww)
        return FeatureMap(x)

    def decode(self, f: FeatureMap, level: int) -> np.ndarray:
        """Exact inverse of encode; returns an unclamped (H,W,3) array."""
        self._check_level(level)
        if f.channels != 3 * 4 ** level:
            raise DimensionError(
                f"level {level} expects {3 * 4 ** level} channels, got {f.channels}"
            )
        x = np.array(f.data)
        for stage in range(level, 0, -1):
            c, hh, ww = x.shape
            x = (self._mix[stage - 1].T @ x.reshape(c, -1)).reshape(c, hh, ww)
            x = _depth_to_space(x)
        return x.transpose(1, 2, 0)

    def decode_image(self, f: FeatureMap, level: int) -> ImageBuffer:
        """Decode and clamp to [0, 1] for emission."""
        return ImageBuffer(self.decode(f, level))

    @staticmethod
    def _check_level(level: int):
        if level not in range(1, MAX_LEVEL + 1):
            raise DimensionError(f"level must be in 1..{MAX_LEVEL}, got {level}")


def get_codec(seed: int = DEFAULT_SEED) -> Codec:
    """Shared per-seed codec instance; tables are built once."""
    if seed not in _codec_cache:
        _codec_cache[seed] = Codec(seed)
    return _codec_cache[seed]
