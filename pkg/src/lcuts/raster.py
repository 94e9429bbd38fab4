"""Grayscale raster images: in-memory grid, bilinear sampling, PGM and CSV IO.

Pixel (ix, iy) has its center at continuous coordinates (x=ix, y=iy), with x
running along columns and y along rows (y grows downward, raster order).
Values are float64 in [0, 1].
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, OutOfBoundsError


@dataclass
class RasterImage:
    """A single-channel image; ``pixels`` is a (height, width) float array."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        self.pixels = np.asarray(self.pixels, dtype=np.float64)
        if self.pixels.ndim != 2 or self.pixels.size == 0:
            raise InputError("image must be a non-empty 2-D grid")
        if not np.all(np.isfinite(self.pixels)):
            raise InputError("image contains non-finite values")
        lo, hi = float(self.pixels.min()), float(self.pixels.max())
        if lo < 0.0 or hi > 1.0:
            raise InputError(f"image values outside [0, 1]: min={lo}, max={hi}")

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]


def bilinear_sample(img: RasterImage, xs, ys) -> np.ndarray:
    """Sample the image at continuous coordinates by bilinear interpolation.

    Valid coordinates lie in [0, width-1] x [0, height-1]; anything outside
    raises OutOfBoundsError. Accepts scalars or arrays, returns float64.
    """
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    h, w = img.pixels.shape
    if xs.size and (xs.min() < 0.0 or xs.max() > w - 1 or ys.min() < 0.0 or ys.max() > h - 1):
        raise OutOfBoundsError("sample coordinates fall outside the image")
    # Clip the base cell so x = w-1 lands in the last cell with weight 1.
    x0 = np.clip(np.floor(xs).astype(np.int64), 0, max(w - 2, 0))
    y0 = np.clip(np.floor(ys).astype(np.int64), 0, max(h - 2, 0))
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = xs - x0
    fy = ys - y0
    p = img.pixels
    v00 = p[y0, x0]
    v01 = p[y0, x1]
    v10 = p[y1, x0]
    v11 = p[y1, x1]
    top = v00 * (1.0 - fx) + v01 * fx
    bot = v10 * (1.0 - fx) + v11 * fx
    return top * (1.0 - fy) + bot * fy


# ----------------------------------------------------------------------------
# PGM (binary P5, 8- or 16-bit)


def _next_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comments, then read one whitespace-delimited token.
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise InputError("truncated PGM header")
    return data[start:pos], pos


def read_pgm(path: str | Path) -> RasterImage:
    """Read a binary PGM (P5) file; values are normalized by the header maxval."""
    data = Path(path).read_bytes()
    try:
        magic, pos = _next_token(data, 0)
        if magic != b"P5":
            raise InputError(f"{path}: not a binary PGM (magic {magic!r})")
        wtok, pos = _next_token(data, pos)
        htok, pos = _next_token(data, pos)
        mtok, pos = _next_token(data, pos)
        width, height, maxval = int(wtok), int(htok), int(mtok)
    except ValueError as exc:
        raise InputError(f"{path}: malformed PGM header") from exc
    if width <= 0 or height <= 0 or not 0 < maxval < 65536:
        raise InputError(f"{path}: bad PGM dimensions or maxval")
    pos += 1  # single whitespace byte after maxval
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    count = width * height
    raw = data[pos : pos + count * dtype.itemsize]
    if len(raw) != count * dtype.itemsize:
        raise InputError(f"{path}: PGM pixel data truncated")
    values = np.frombuffer(raw, dtype=dtype).reshape(height, width)
    return RasterImage(values.astype(np.float64) / float(maxval))


def write_pgm(path: str | Path, img: RasterImage, maxval: int = 65535) -> None:
    """Write a binary PGM (P5); 16-bit by default."""
    if not 0 < maxval < 65536:
        raise InputError(f"unsupported PGM maxval {maxval}")
    header = f"P5\n{img.width} {img.height}\n{maxval}\n".encode("ascii")
    quant = np.round(img.pixels * maxval)
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype("u1")
    Path(path).write_bytes(header + quant.astype(dtype).tobytes())


# ----------------------------------------------------------------------------
# CSV grid (rows of comma-separated reals)


def read_csv_grid(path: str | Path) -> RasterImage:
    """Read an image stored as a CSV grid; negatives clamp to 0 and values are
    divided by the maximum when it exceeds 1."""
    try:
        values = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except (ValueError, OSError) as exc:
        raise InputError(f"{path}: cannot parse CSV grid: {exc}") from exc
    if values.size == 0:
        raise InputError(f"{path}: empty CSV grid")
    values = np.maximum(values, 0.0)
    peak = values.max()
    if peak > 1.0:
        values = values / peak
    return RasterImage(values)


def read_image(path: str | Path) -> RasterImage:
    """Dispatch on file suffix: .pgm is binary PGM, anything else a CSV grid."""
    if str(path).lower().endswith(".pgm"):
        return read_pgm(path)
    return read_csv_grid(path)
