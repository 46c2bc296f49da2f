"""Feature-frame containers and their mapping to complex channel symbols.

The unit of semantic transmission is a fixed-geometry real matrix (by
default 32 x 768, the query-embedding shape of common vision-language
encoders). Packing walks the matrix in row-major order, pairs consecutive
reals into complex symbols (element 2k -> real part, 2k+1 -> imaginary
part of symbol k) and applies one scalar so the mean symbol power hits the
configured target. The scalar is returned out-of-band in a
NormalizationRecord; the receiver is assumed to know it (ideal side
information, a documented idealization).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFrameError, GeometryError
from .validation import check_feature_matrix, check_symbol_vector

__all__ = [
    "DEFAULT_N_QUERIES",
    "DEFAULT_DIM",
    "FeatureFrame",
    "SymbolFrame",
    "NormalizationRecord",
    "pack_features",
    "unpack_features",
]

DEFAULT_N_QUERIES = 32
DEFAULT_DIM = 768


def _freeze(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class FeatureFrame:
    """An (n_queries, dim) matrix of finite reals, immutable once built."""

    n_queries: int
    dim: int
    data: np.ndarray

    def __post_init__(self):
        arr = check_feature_matrix(self.data, self.n_queries, self.dim)
        object.__setattr__(self, "data", _freeze(arr))

    @classmethod
    def from_array(cls, data) -> "FeatureFrame":
        arr = check_feature_matrix(data)
        return cls(n_queries=arr.shape[0], dim=arr.shape[1], data=arr)

    @property
    def n_symbols(self) -> int:
        return self.n_queries * self.dim // 2

    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)


@dataclass(frozen=True)
class SymbolFrame:
    """A complex symbol vector plus the bookkeeping the link layer needs.

    scale is the scalar that was applied at packing time (1.0 for digital
    modulation), target_power the per-symbol average power the transmitter
    aimed for. erasures counts symbols zeroed by deep-fade handling,
    pad_bits counts trailing filler bits a demodulator must strip.
    """

    symbols: np.ndarray
    scale: float
    target_power: float
    erasures: int = 0
    pad_bits: int = 0

    def __post_init__(self):
        if not (self.scale > 0):
            raise GeometryError(f"scale must be positive, got {self.scale}")
        if not (self.target_power > 0):
            raise GeometryError(f"target_power must be positive, got {self.target_power}")
        arr = np.asarray(self.symbols, dtype=np.complex128)
        if arr.ndim != 1:
            raise GeometryError("symbols must be a 1-D vector")
        object.__setattr__(self, "symbols", _freeze(arr))

    def __len__(self) -> int:
        return self.symbols.size

    def mean_power(self) -> float:
        return float(np.mean(np.abs(self.symbols) ** 2)) if len(self) else 0.0


@dataclass(frozen=True)
class NormalizationRecord:
    """Side information needed to invert packing: the scalar and geometry."""

    scale: float
    n_queries: int
    dim: int

    def __post_init__(self):
        if not (self.scale > 0):
            raise GeometryError(f"scale must be positive, got {self.scale}")
        if self.n_queries < 1 or self.dim < 1:
            raise GeometryError("geometry fields must be positive")

    @property
    def n_symbols(self) -> int:
        return self.n_queries * self.dim // 2


def pack_features(frame: FeatureFrame, target_power: float = 1.0):
    """Map a feature frame to power-normalized complex symbols.

    Returns (SymbolFrame, NormalizationRecord). The single recorded scalar
    preserves the frame's direction exactly; mean symbol power equals
    target_power up to float roundoff.
    """
    if not (target_power > 0):
        raise GeometryError(f"target_power must be positive, got {target_power}")
    flat = frame.flat()
    raw = flat[0::2] + 1j * flat[1::2]
    mean_power = float(np.mean(np.abs(raw) ** 2))
    if mean_power == 0.0:
        raise DegenerateFrameError("all-zero frame has no defined normalization")
    scale = float(np.sqrt(target_power / mean_power))
    record = NormalizationRecord(scale=scale, n_queries=frame.n_queries, dim=frame.dim)
    return SymbolFrame(symbols=scale * raw, scale=scale, target_power=target_power), record


def unpack_features(symbols: SymbolFrame, record: NormalizationRecord) -> FeatureFrame:
    """Invert pack_features using the recorded scalar and geometry."""
    vec = check_symbol_vector(symbols.symbols, expected_len=record.n_symbols)
    flat = np.empty(2 * vec.size, dtype=np.float64)
    flat[0::2] = vec.real
    flat[1::2] = vec.imag
    flat /= record.scale
    return FeatureFrame(
        n_queries=record.n_queries,
        dim=record.dim,
        data=flat.reshape(record.n_queries, record.dim),
    )
