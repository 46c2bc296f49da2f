"""Systematic (7,4) Hamming block code with syndrome decoding.

Codewords are [data | parity] under the pinned generator G = [I4 | A];
the parity-check matrix H = [A^T | I3] satisfies H G^T = 0 over GF(2).
Every single-bit error has a distinct nonzero syndrome equal to the
corresponding column of H, so syndrome decoding corrects all 112
single-error cases; two or more errors may miscorrect, which is inherent
to the code, never an exception.
"""

from __future__ import annotations

import numpy as np

from .bits import BitStream
from .errors import FramingError
from .validation import check_bit_array

__all__ = ["Hamming74Code", "hamming74_encode", "hamming74_decode"]

_A = np.array(
    [
        [1, 1, 0],
        [1, 0, 1],
        [0, 1, 1],
        [1, 1, 1],
    ],
    dtype=np.uint8,
)


class Hamming74Code:
    """Matrices and block-level encode/correct for the (7,4) code."""

    n = 7
    k = 4

    def __init__(self):
        self.generator = np.hstack([np.eye(4, dtype=np.uint8), _A])
        self.parity_check = np.hstack([_A.T, np.eye(3, dtype=np.uint8)])
        # syndrome value (as an integer) -> bit position to flip
        cols = self.parity_check.T @ (1 << np.arange(2, -1, -1))
        self._flip_for_syndrome = np.full(8, -1, dtype=np.int64)
        for pos, syn in enumerate(cols):
            self._flip_for_syndrome[syn] = pos

    def encode_blocks(self, data: np.ndarray) -> np.ndarray:
        """(m, 4) data bits -> (m, 7) codewords."""
        return (data @ self.generator) % 2

    def correct_blocks(self, coded: np.ndarray):
        """(m, 7) received blocks -> ((m, 4) data bits, corrections count)."""
        syndromes = (coded @ self.parity_check.T) % 2
        syn_ints = syndromes @ (1 << np.arange(2, -1, -1))
        flips = self._flip_for_syndrome[syn_ints]
        fixed = coded.copy()
        rows = np.nonzero(syn_ints)[0]
        fixed[rows, flips[rows]] ^= 1
        return fixed[:, :4], int(rows.size)

    def codewords(self) -> np.ndarray:
        """All 16 codewords, indexed by the 4-bit data word (MSB first)."""
        data = ((np.arange(16)[:, None] >> np.arange(3, -1, -1)) & 1).astype(np.uint8)
        return self.encode_blocks(data)


_CODE = Hamming74Code()


def hamming74_encode(stream: BitStream) -> BitStream:
    """Encode a bit stream; input is zero-padded to a multiple of 4 bits.

    The pad length is recorded on the returned stream so decoding can
    strip it again.
    """
    bits = check_bit_array(stream.bits)
    pad = (-bits.size) % 4
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    if bits.size == 0:
        return BitStream(bits=bits, pad_len=0, replaced=stream.replaced)
    coded = _CODE.encode_blocks(bits.reshape(-1, 4)).reshape(-1)
    return BitStream(bits=coded.astype(np.uint8), pad_len=pad, replaced=stream.replaced)


def hamming74_decode(stream: BitStream) -> BitStream:
    """Syndrome-decode a coded stream and strip the recorded data padding."""
    coded = check_bit_array(stream.bits)
    if coded.size % 7 != 0:
        raise FramingError(f"coded bit count {coded.size} is not a multiple of 7")
    if coded.size == 0:
        return BitStream(bits=coded, pad_len=0, replaced=stream.replaced)
    data, _ = _CODE.correct_blocks(coded.reshape(-1, 7))
    flat = data.reshape(-1)
    if stream.pad_len:
        flat = flat[: flat.size - stream.pad_len]
    return BitStream(bits=flat.astype(np.uint8), pad_len=0, replaced=stream.replaced)
