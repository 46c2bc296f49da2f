"""Input validation helpers, in the spirit of sklearn's check_array.

Every public entry point funnels its array arguments through one of these
so error behaviour is uniform: geometry problems raise GeometryError,
value problems raise DataError.
"""

from __future__ import annotations

import numpy as np

from .errors import DataError, FramingError, GeometryError

__all__ = [
    "check_feature_matrix",
    "check_symbol_vector",
    "check_bit_array",
    "check_image_array",
]


def check_feature_matrix(data, n_queries=None, dim=None) -> np.ndarray:
    """Validate an (n_queries, dim) real matrix and return it as float64.

    Checks rank, optional expected shape, evenness of the element count
    (required for complex pairing) and finiteness.
    """
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim != 2:
        raise GeometryError(f"feature matrix must be 2-D, got ndim={arr.ndim}")
    n, d = arr.shape
    if n < 1 or d < 1:
        raise GeometryError(f"feature matrix must be non-empty, got shape {arr.shape}")
    if n_queries is not None and n != n_queries:
        raise GeometryError(f"expected n_queries={n_queries}, got {n}")
    if dim is not None and d != dim:
        raise GeometryError(f"expected dim={dim}, got {d}")
    if (n * d) % 2 != 0:
        raise GeometryError(f"element count {n * d} is odd; complex pairing needs an even count")
    if not np.isfinite(arr).all():
        raise DataError("feature matrix contains NaN or Inf")
    return arr


def check_symbol_vector(symbols, expected_len=None) -> np.ndarray:
    """Validate a 1-D complex symbol vector and return it as complex128."""
    arr = np.asarray(symbols, dtype=np.complex128)
    if arr.ndim != 1:
        raise GeometryError(f"symbol vector must be 1-D, got ndim={arr.ndim}")
    if expected_len is not None and arr.size != expected_len:
        raise GeometryError(f"expected {expected_len} symbols, got {arr.size}")
    if not np.isfinite(arr).all():
        raise DataError("symbol vector contains NaN or Inf")
    return arr


def check_bit_array(bits, multiple_of: int | None = None) -> np.ndarray:
    """Validate a 1-D array of 0/1 values and return it as uint8."""
    arr = np.asarray(bits)
    if arr.ndim != 1:
        raise FramingError(f"bit array must be 1-D, got ndim={arr.ndim}")
    if arr.size and not np.isin(arr, (0, 1)).all():
        raise DataError("bit array contains values other than 0 and 1")
    if multiple_of is not None and arr.size % multiple_of != 0:
        raise FramingError(f"bit count {arr.size} is not a multiple of {multiple_of}")
    return arr.astype(np.uint8)


def check_image_array(image) -> np.ndarray:
    """Validate a (channels, height, width) real image tensor as float64."""
    arr = np.asarray(image, dtype=np.float64)
    if arr.ndim != 3:
        raise GeometryError(f"image must be (channels, height, width), got ndim={arr.ndim}")
    if min(arr.shape) < 1:
        raise GeometryError(f"image has an empty axis: shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise DataError("image contains NaN or Inf")
    return arr
