"""Bandwidth-compression-ratio and channel-use accounting.

A frame of n_queries x dim reals occupies n_queries*dim/2 complex channel
uses regardless of the source image resolution. The bandwidth compression
ratio is channel uses per source sample:

    bcr = n_queries * dim / (2 * channels * height * width)

computed as an exact rational so tests never chase float equality. For
the default 32 x 768 geometry and a 256 x 256 RGB image this is 1/16.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import GeometryError

__all__ = ["ImageGeometry", "channel_uses", "compute_bcr", "bcr_table"]


@dataclass(frozen=True)
class ImageGeometry:
    channels: int
    height: int
    width: int

    def __post_init__(self):
        for name in ("channels", "height", "width"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise GeometryError(f"{name} must be a positive integer, got {v!r}")

    @property
    def samples(self) -> int:
        return self.channels * self.height * self.width


def channel_uses(n_queries: int, dim: int) -> int:
    """Complex channel uses needed for one frame: n_queries*dim/2."""
    if n_queries < 1 or dim < 1:
        raise GeometryError("n_queries and dim must be positive")
    product = n_queries * dim
    if product % 2 != 0:
        raise GeometryError(f"n_queries*dim = {product} is odd; cannot pair into complex symbols")
    return product // 2


def compute_bcr(n_queries: int, dim: int, geom: ImageGeometry) -> Fraction:
    """Exact bandwidth compression ratio (channel uses per source sample)."""
    return Fraction(channel_uses(n_queries, dim), geom.samples)


def bcr_table(n_queries: int, dim: int, geoms) -> list[dict]:
    """BCR rows for a list of image geometries, ready for printing."""
    rows = []
    for geom in geoms:
        ratio = compute_bcr(n_queries, dim, geom)
        rows.append(
            {
                "geometry": f"{geom.channels}x{geom.height}x{geom.width}",
                "samples": geom.samples,
                "channel_uses": channel_uses(n_queries, dim),
                "bcr": ratio,
                "bcr_real": float(ratio),
            }
        )
    return rows
