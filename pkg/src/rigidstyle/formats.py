"""Image I/O and the FT1 binary tensor interchange format.

FT1 layout (little-endian): magic ``46 54 31 00``, u8 version (1), u8
dtype (1 = float32), u8 ndim, u8 reserved (0), ndim u32 dims, then the
row-major float32 payload. Features are stored channel-first.
"""

from __future__ import annotations

import os
import struct
import tempfile

import numpy as np
from PIL import Image

FT1_MAGIC = b"FT1\x00"
FT1_VERSION = 1
FT1_DTYPE_F32 = 1


class FormatError(ValueError):
    """Malformed or unsupported file contents."""


def _atomic_write(path, payload: bytes):
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_image(path) -> np.ndarray:
    """Read a PNG or PPM (P6) image as an (H, W, 3) float array in [0, 1].

    Any alpha channel is dropped; pixel value v maps to v / 255.
    """
    try:
        with Image.open(path) as img:
            if img.mode != "RGB":
                img = img.convert("RGB")
            arr = np.asarray(img, dtype=np.float64)
    except (OSError, SyntaxError) as exc:
        raise FormatError(f"cannot read image {path}: {exc}") from exc
    return arr / 255.0


def write_png(path, image) -> None:
    """Write an image in [0, 1] as 8-bit RGB PNG, atomically.

    Quantization rounds to nearest with ties away from zero.
    """
    arr = np.asarray(getattr(image, "data", image), dtype=np.float64)
    if arr.ndim != 3 or arr.shape[2] != 3:
        raise FormatError(f"expected (H,W,3) image, got {arr.shape}")
    q = np.floor(np.clip(arr, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)
    import io

    buf = io.BytesIO()
    Image.fromarray(q, mode="RGB").save(buf, format="PNG")
    _atomic_write(path, buf.getvalue())


def write_ft1(path, array) -> None:
    """Write an array as an FT1 file (float32 payload), atomically."""
    arr = np.ascontiguousarray(getattr(array, "data", array), dtype="<f4")
    if arr.ndim < 1 or arr.ndim > 255:
        raise FormatError(f"unsupported ndim {arr.ndim}")
    header = FT1_MAGIC + struct.pack("<BBBB", FT1_VERSION, FT1_DTYPE_F32, arr.ndim, 0)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    _atomic_write(path, header + arr.tobytes())


def read_ft1_header(blob: bytes):
    """Parse and validate an FT1 header; returns (dims, payload offset)."""
    if len(blob) < 8 or blob[:4] != FT1_MAGIC:
        raise FormatError("not an FT1 file (bad magic)")
    version, dtype, ndim, reserved = struct.unpack("<BBBB", blob[4:8])
    if version != FT1_VERSION:
        raise FormatError(f"unsupported FT1 version {version}")
    if dtype != FT1_DTYPE_F32:
        raise FormatError(f"unsupported FT1 dtype {dtype}")
    if reserved != 0:
        raise FormatError(f"nonzero reserved byte {reserved}")
    offset = 8 + 4 * ndim
    if len(blob) < offset:
        raise FormatError("truncated FT1 header")
    dims = struct.unpack(f"<{ndim}I", blob[8:offset])
    return dims, offset


def read_ft1(path) -> np.ndarray:
    """Read an FT1 file into a float32 array."""
    try:
        with open(path, "rb") as fh:
            blob = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    dims, offset = read_ft1_header(blob)
    count = int(np.prod(dims, dtype=np.int64)) if dims else 1
    payload = blob[offset:]
    if len(payload) != 4 * count:
        raise FormatError(
            f"payload length {len(payload)} does not match dims {dims} ({4 * count} bytes)"
        )
    return np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
