"""Portable raster input for sweep datasets.

Readers for binary PPM (P6), binary PGM (P5) and farbfeld, the three
formats accepted as sweep inputs; anything else should be converted
first (for example `magick photo.png -depth 8 photo.ppm`). All readers
return float64 arrays shaped (channels, height, width) scaled to [0, 1].
A P6 writer is included for generating fixtures and converting back.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .errors import DataError
from .validation import check_image_array

__all__ = ["read_image", "read_ppm", "read_farbfeld", "ppm_bytes", "write_ppm"]

_FARBFELD_MAGIC = b"farbfeld"


def _read_header_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # skip whitespace and '#' comments between tokens
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c == b"#":
            while pos < n and data[pos : pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace() and data[pos : pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise DataError("truncated raster header")
    return data[start:pos], pos


def read_ppm(path) -> np.ndarray:
    """Binary PPM (P6) or PGM (P5), 1- or 2-byte samples."""
    data = Path(path).read_bytes()
    magic, pos = _read_header_token(data, 0)
    if magic not in (b"P6", b"P5"):
        raise DataError(f"unsupported raster magic {magic!r} in {path}")
    fields = []
    for _ in range(3):
        token, pos = _read_header_token(data, pos)
        try:
            fields.append(int(token))
        except ValueError:
            raise DataError(f"bad raster header token {token!r} in {path}") from None
    width, height, maxval = fields
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise DataError(f"bad raster dimensions {width}x{height} maxval {maxval} in {path}")
    pos += 1  # single whitespace byte after maxval
    channels = 3 if magic == b"P6" else 1
    count = width * height * channels
    dtype = np.dtype(">u2") if maxval > 255 else np.dtype(np.uint8)
    if len(data) - pos < count * dtype.itemsize:
        raise DataError(f"raster payload truncated in {path}")
    raster = np.frombuffer(data, dtype=dtype, count=count, offset=pos)
    pixels = raster.astype(np.float64) / maxval
    return pixels.reshape(height, width, channels).transpose(2, 0, 1)


def read_farbfeld(path) -> np.ndarray:
    """farbfeld RGBA; the alpha plane is dropped."""
    data = Path(path).read_bytes()
    if len(data) < 16 or data[:8] != _FARBFELD_MAGIC:
        raise DataError(f"not a farbfeld file: {path}")
    width, height = struct.unpack(">II", data[8:16])
    if width < 1 or height < 1:
        raise DataError(f"bad farbfeld dimensions {width}x{height} in {path}")
    count = width * height * 4
    if len(data) - 16 < count * 2:
        raise DataError(f"farbfeld payload truncated in {path}")
    raster = np.frombuffer(data, dtype=">u2", count=count, offset=16)
    pixels = raster.astype(np.float64) / 65535.0
    return pixels.reshape(height, width, 4)[:, :, :3].transpose(2, 0, 1)


def read_image(path) -> np.ndarray:
    """Dispatch on magic bytes; see module docstring for formats."""
    head = Path(path).open("rb").read(8)
    if head[:8] == _FARBFELD_MAGIC:
        return read_farbfeld(path)
    if head[:2] in (b"P6", b"P5"):
        return read_ppm(path)
    raise DataError(f"unrecognized raster format in {path} (need P6/P5 PPM or farbfeld)")


def ppm_bytes(image) -> bytes:
    """Serialize (3,h,w) as binary P6 or (1,h,w) as binary P5, maxval 255."""
    arr = check_image_array(image)
    channels, height, width = arr.shape
    if channels not in (1, 3):
        raise DataError(f"can only write 1- or 3-channel rasters, got {channels}")
    magic = b"P6" if channels == 3 else b"P5"
    clipped = np.clip(np.rint(arr * 255.0), 0, 255).astype(np.uint8)
    return magic + b"\n%d %d\n255\n" % (width, height) + clipped.transpose(1, 2, 0).tobytes()


def write_ppm(path, image) -> None:
    Path(path).write_bytes(ppm_bytes(image))
