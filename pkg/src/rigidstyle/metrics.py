"""Content/style losses, the Gram matrix, and a small timing harness."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .features import DimensionError, FeatureMap


@dataclass(frozen=True)
class GramMatrix:
    """G = Z Z^T of the C x (H*W) flattening; symmetric PSD, unnormalized."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DimensionError(f"Gram matrix must be square, got {m.shape}")
        m = np.ascontiguousarray(m)
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)


def gram(f: FeatureMap) -> GramMatrix:
    z = f.data.reshape(f.channels, -1)
    return GramMatrix(z @ z.T)


def content_loss(z_c: FeatureMap, z: FeatureMap) -> float:
    """Squared error between features, normalized by 2*C*H*W."""
    if z_c.shape != z.shape:
        raise DimensionError(f"shape mismatch: {z_c.shape} vs {z.shape}")
    c, h, w = z_c.shape
    return float(np.sum((z_c.data - z.data) ** 2) / (2.0 * c * h * w))


def style_loss(z_s: FeatureMap, z: FeatureMap) -> float:
    """Squared Gram difference, normalized by 4*C^2*H^2*W^2."""
    if z_s.channels != z.channels:
        raise DimensionError(f"channel mismatch: {z_s.channels} vs {z.channels}")
    if z_s.height * z_s.width != z.height * z.width:
        raise DimensionError("spatial sizes differ; resample before computing style loss")
    c, h, w = z.shape
    diff = gram(z_s).matrix - gram(z).matrix
    return float(np.sum(diff ** 2) / (4.0 * c ** 2 * h ** 2 * w ** 2))


def psnr(a: np.ndarray, b: np.ndarray, peak: float = 1.0) -> float:
    """Peak signal-to-noise ratio in dB; inf for identical inputs."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    mse = float(np.mean((a - b) ** 2))
    if mse == 0.0:
        return float("inf")
    return 10.0 * np.log10(peak ** 2 / mse)


@dataclass(frozen=True)
class TimingReport:
    label: str
    dimensions: dict
    samples: tuple  # wall-clock seconds, warm-up excluded

    @property
    def mean(self):
        return float(np.mean(self.samples))

    @property
    def std(self):
        return float(np.std(self.samples))

    def to_text(self) -> str:
        dims = ", ".join(f"{k}={v}" for k, v in self.dimensions.items())
        return (
            f"{self.label} [{dims}]: mean {self.mean:.6f} s, "
            f"std {self.std:.6f} s over {len(self.samples)} runs"
        )

    def to_kv_lines(self) -> str:
        lines = [f"label={self.label}"]
        lines += [f"dim.{k}={v}" for k, v in self.dimensions.items()]
        lines += [f"sample.{i}={s:.9f}" for i, s in enumerate(self.samples)]
        lines += [f"mean={self.mean:.9f}", f"std={self.std:.9f}"]
        return "\n".join(lines)


def bench(label: str, fn, dimensions: dict | None = None, repetitions: int = 5) -> TimingReport:
    """Time ``fn`` over ``repetitions`` runs after one discarded warm-up."""
    if repetitions < 3:
        raise ValueError("repetitions must be >= 3")
    fn()  # warm-up
    samples = []
    for _ in range(repetitions):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return TimingReport(label, dict(dimensions or {}), tuple(samples))
