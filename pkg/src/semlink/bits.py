"""Bit-stream container and the 7-bit ASCII text codec.

Each character maps to 7 bits, most-significant bit first. Code points
above 127 are replaced by '?' on encode and counted; on decode, control
characters other than newline and tab also come back as '?' so noisy bit
streams always produce printable, same-length text.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FramingError, GeometryError
from .validation import check_bit_array

__all__ = ["BitStream", "ascii_encode", "ascii_decode", "random_bits"]

_REPLACEMENT = 0x3F  # '?'


@dataclass(frozen=True)
class BitStream:
    """An ordered 0/1 sequence plus padding/substitution bookkeeping."""

    bits: np.ndarray
    pad_len: int = 0
    replaced: int = 0

    def __post_init__(self):
        arr = check_bit_array(self.bits)
        arr.flags.writeable = False
        object.__setattr__(self, "bits", arr)
        if not (0 <= self.pad_len < 4):
            raise GeometryError(f"pad_len must be in [0, 4), got {self.pad_len}")

    def __len__(self) -> int:
        return self.bits.size


def ascii_encode(text: str) -> BitStream:
    """Encode text as 7-bit ASCII, MSB first; lossy above code point 127."""
    codes = np.array([ord(c) for c in text], dtype=np.int64)
    replaced = int((codes > 127).sum())
    codes = np.where(codes > 127, _REPLACEMENT, codes)
    if codes.size == 0:
        return BitStream(bits=np.zeros(0, dtype=np.uint8), replaced=replaced)
    shifts = np.arange(6, -1, -1)
    bits = ((codes[:, None] >> shifts) & 1).astype(np.uint8).reshape(-1)
    return BitStream(bits=bits, replaced=replaced)


def ascii_decode(stream: BitStream) -> str:
    """Decode a 7-bit ASCII stream back to text.

    Inverse of ascii_encode on its image; any 7-bit pattern is accepted,
    with unprintable results mapped to '?' (newline, tab and space pass).
    """
    bits = stream.bits
    if bits.size % 7 != 0:
        raise FramingError(f"bit count {bits.size} is not a multiple of 7")
    if bits.size == 0:
        return ""
    codes = bits.reshape(-1, 7) @ (1 << np.arange(6, -1, -1))
    printable = (codes >= 32) & (codes <= 126)
    keep = printable | (codes == 9) | (codes == 10)
    codes = np.where(keep, codes, _REPLACEMENT)
    return "".join(chr(c) for c in codes)


def random_bits(n: int, seed: int) -> np.ndarray:
    """Uniform random bits, handy for Monte-Carlo BER runs."""
    return np.random.default_rng(seed).integers(0, 2, size=n, dtype=np.uint8)
