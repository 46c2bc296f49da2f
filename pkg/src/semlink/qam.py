"""Gray-mapped 16-QAM with hard-decision demodulation.

Bits b0 b1 pick the in-phase level through the Gray map
{00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3}; bits b2 b3 pick the quadrature
level identically. Points are scaled by 1/sqrt(10) for exactly unit mean
energy. Nearest constellation neighbours differ in exactly one bit.

Hard decisions slice each axis at -2, 0, +2 (in unscaled units). A value
landing exactly on a boundary resolves toward the lower 4-bit label, so
ties are deterministic: -2 -> level -3 (00 before 01), 0 -> level -1
(01 before 11), +2 -> level +3 (10 before 11).
"""

from __future__ import annotations

import numpy as np

from .bits import BitStream
from .frames import SymbolFrame
from .validation import check_bit_array

__all__ = ["Qam16Constellation", "qam16_modulate", "qam16_demodulate", "BITS_PER_SYMBOL"]

BITS_PER_SYMBOL = 4
_SCALE = 1.0 / np.sqrt(10.0)

# Gray map, indexed by the 2-bit pair value (b_hi*2 + b_lo).
_PAIR_TO_LEVEL = np.array([-3.0, -1.0, 3.0, 1.0])  # 00, 01, 10, 11
_THRESHOLDS = np.array([-2.0, 0.0, 2.0]) / np.sqrt(10.0)


class Qam16Constellation:
    """Label-to-point table for the pinned Gray mapping."""

    def __init__(self):
        labels = np.arange(16)
        i_level = _PAIR_TO_LEVEL[(labels >> 2) & 3]
        q_level = _PAIR_TO_LEVEL[labels & 3]
        self.points = (i_level + 1j * q_level) * _SCALE

    def point(self, label: int) -> complex:
        return complex(self.points[label])

    def mean_energy(self) -> float:
        return float(np.mean(np.abs(self.points) ** 2))


def qam16_modulate(bits, target_power: float = 1.0) -> SymbolFrame:
    """Map a bit sequence to 16-QAM symbols.

    Accepts a BitStream or raw 0/1 array; zero-pads to a multiple of 4
    and records the pad on the returned frame so demodulation can strip
    it. target_power only labels the frame for the channel's noise
    calibration; the constellation itself has unit mean energy.
    """
    raw = bits.bits if isinstance(bits, BitStream) else check_bit_array(bits)
    pad = (-raw.size) % BITS_PER_SYMBOL
    if pad:
        raw = np.concatenate([raw, np.zeros(pad, dtype=np.uint8)])
    groups = raw.reshape(-1, 4).astype(np.int64)
    i_level = _PAIR_TO_LEVEL[groups[:, 0] * 2 + groups[:, 1]]
    q_level = _PAIR_TO_LEVEL[groups[:, 2] * 2 + groups[:, 3]]
    symbols = (i_level + 1j * q_level) * _SCALE
    return SymbolFrame(symbols=symbols, scale=1.0, target_power=target_power, pad_bits=pad)


def _slice_axis(values: np.ndarray) -> np.ndarray:
    """Per-axis hard decision -> 2-bit pair values, lower label on ties."""
    # Region index 0..3 over levels -3, -1, +1, +3.
    region = np.digitize(values, _THRESHOLDS, right=False)
    # right=False puts boundary values in the upper region; pull the three
    # exact-tie cases back down to the lower-label side.
    region = np.where(values == _THRESHOLDS[0], 0, region)  # -2 -> level -3 (00)
    region = np.where(values == _THRESHOLDS[1], 1, region)  # 0 -> level -1 (01)
    # +2 -> level +3 already label 10 < 11; right=False keeps it there.
    pair_for_region = np.array([0, 1, 3, 2])  # 00, 01, 11, 10
    return pair_for_region[region]


def qam16_demodulate(frame: SymbolFrame) -> BitStream:
    """Minimum-distance hard decisions; strips the recorded modulation pad."""
    symbols = np.asarray(frame.symbols, dtype=np.complex128)
    i_pairs = _slice_axis(symbols.real)
    q_pairs = _slice_axis(symbols.imag)
    bits = np.empty((symbols.size, 4), dtype=np.uint8)
    bits[:, 0] = (i_pairs >> 1) & 1
    bits[:, 1] = i_pairs & 1
    bits[:, 2] = (q_pairs >> 1) & 1
    bits[:, 3] = q_pairs & 1
    flat = bits.reshape(-1)
    if frame.pad_bits:
        flat = flat[: flat.size - frame.pad_bits]
    return BitStream(bits=flat)
