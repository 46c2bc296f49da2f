"""Semantic codec interface and the deterministic toy implementation.

The toy codec stands in for the vision-language encoder and the text
and image decoders. It keeps their external contract — a fixed-size
N x d feature frame regardless of image resolution, decoders that are
total on noisy input — while staying fully checkable on a desk:

- encode: an orthonormal row projection P applied to the flattened
  image. P = S.H.D with D a seeded random sign diagonal, H the
  orthonormal DCT-II, and S a seeded row subset, so P.P^T = I without
  ever materializing an (N.d) x (C.h.w) matrix.
- decode_image: the transpose reconstruction P^T.vec(frame), whose
  noiseless error is exactly the projection truncation error.
- decode_text: mean-pool the N query rows, project d -> k, and return
  the nearest label-bank prototype by cosine, with that cosine as the
  confidence.

A zero image encodes to a zero frame; that frame is rejected later by
pack_features (power normalization is undefined), not here.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.fft import dct, idct

from .errors import ConfigError, GeometryError
from .frames import DEFAULT_DIM, DEFAULT_N_QUERIES, FeatureFrame
from .validation import check_image_array

__all__ = [
    "SemanticCodec",
    "ToyProjectionCodec",
    "LabelEntry",
    "default_label_bank",
    "pool_frame",
    "DEFAULT_TEXT_DIM",
    "DEFAULT_IMAGE_SHAPE",
    "DEFAULT_LABELS",
]

DEFAULT_TEXT_DIM = 64
DEFAULT_IMAGE_SHAPE = (3, 256, 256)

# Caption-like strings so text metrics (BLEU, character error rate)
# exercise real n-gram structure rather than single tokens.
DEFAULT_LABELS = (
    "a red vintage car parked on a quiet street",
    "two children flying a kite over the beach",
    "a bowl of ripe oranges on a wooden table",
    "a cyclist climbing a steep mountain road at dawn",
    "an old lighthouse standing against a stormy sky",
    "a black cat sleeping on a sunlit windowsill",
    "workers loading crates onto a cargo ship",
    "a field of sunflowers under scattered clouds",
    "a violinist performing in a crowded subway station",
    "snow covered pine trees along a frozen river",
    "a chef plating dessert in a busy kitchen",
    "hot air balloons drifting over patchwork farmland",
    "a dog catching a frisbee in a city park",
    "fishing boats moored in a calm harbor at dusk",
    "a librarian shelving books between tall wooden stacks",
    "street vendors selling fruit under striped awnings",
)


def pool_frame(frame: FeatureFrame) -> np.ndarray:
    """Unweighted mean over the N query rows -> d-vector. Linear."""
    return frame.data.mean(axis=0)


@dataclass(frozen=True)
class LabelEntry:
    label: str
    prototype: FeatureFrame


def default_label_bank(
    n_queries: int = DEFAULT_N_QUERIES,
    dim: int = DEFAULT_DIM,
    seed: int = 0,
    labels: Sequence[str] = DEFAULT_LABELS,
) -> list[LabelEntry]:
    """Seeded Gaussian prototype frames, one per label, each scaled so
    its pooled vector is unit-norm. In high dimension the pooled
    prototypes are nearly orthogonal, giving a well-separated bank."""
    entries = []
    for index, label in enumerate(labels):
        rng = np.random.default_rng([seed, 991, index])
        data = rng.standard_normal((n_queries, dim))
        pooled_norm = float(np.linalg.norm(data.mean(axis=0)))
        if pooled_norm == 0.0:
            raise ConfigError(f"degenerate prototype for label {label!r}")
        entries.append(LabelEntry(label, FeatureFrame.from_array(data / pooled_norm)))
    return entries


class SemanticCodec(ABC):
    """Encoder/decoder trio around the N x d feature frame."""

    n_queries: int
    dim: int

    @abstractmethod
    def encode(self, image) -> FeatureFrame: ...

    @abstractmethod
    def decode_text(self, frame: FeatureFrame) -> tuple[str, float]: ...

    @abstractmethod
    def decode_image(self, frame: FeatureFrame, image_shape=None) -> np.ndarray: ...

    def close(self) -> None:
        """Release backend resources; in-process codecs have none."""


class ToyProjectionCodec(SemanticCodec):
    """Seeded orthonormal-projection codec. Immutable after
    construction; encode/decode are pure (the per-image-shape operator
    cache only memoizes a deterministic function of (seed, shape))."""

    def __init__(
        self,
        n_queries: int = DEFAULT_N_QUERIES,
        dim: int = DEFAULT_DIM,
        seed: int = 0,
        text_dim: int = DEFAULT_TEXT_DIM,
        image_shape: tuple[int, int, int] = DEFAULT_IMAGE_SHAPE,
        label_bank: Optional[Sequence[LabelEntry]] = None,
    ):
        if n_queries < 1 or dim < 1:
            raise GeometryError(f"n_queries and dim must be positive, got ({n_queries}, {dim})")
        if text_dim < 1:
            raise ConfigError(f"text_dim must be positive, got {text_dim}")
        self.n_queries = int(n_queries)
        self.dim = int(dim)
        self.seed = int(seed)
        self.text_dim = int(text_dim)
        self.image_shape = tuple(int(v) for v in image_shape)
        if len(self.image_shape) != 3 or min(self.image_shape) < 1:
            raise GeometryError(f"image_shape must be (C, h, w), got {image_shape}")
        bank = list(label_bank) if label_bank is not None else default_label_bank(
            self.n_queries, self.dim, seed=self.seed
        )
        if not bank:
            raise ConfigError("label bank must be nonempty")
        for entry in bank:
            if entry.prototype.n_queries != self.n_queries or entry.prototype.dim != self.dim:
                raise GeometryError(
                    f"prototype for {entry.label!r} has geometry "
                    f"({entry.prototype.n_queries}, {entry.prototype.dim}), "
                    f"expected ({self.n_queries}, {self.dim})"
                )
        self.label_bank = tuple(bank)
        rng = np.random.default_rng([self.seed, 617])
        self._w_proj = rng.standard_normal((self.text_dim, self.dim))
        protos = np.stack([self._w_proj @ pool_frame(e.prototype) for e in self.label_bank])
        norms = np.linalg.norm(protos, axis=1, keepdims=True)
        if np.any(norms == 0.0):
            raise ConfigError("a bank prototype projects to zero; choose another seed")
        self._proto_unit = protos / norms
        self._operators: dict[tuple[int, int, int], tuple[np.ndarray, np.ndarray]] = {}

    # -- projection operator ------------------------------------------------

    def _operator(self, shape: tuple[int, int, int]) -> tuple[np.ndarray, np.ndarray]:
        """(signs, row_indices) defining P = S.H.D for one image shape."""
        cached = self._operators.get(shape)
        if cached is not None:
            return cached
        total = int(np.prod(shape))
        k = self.n_queries * self.dim
        if total < k:
            raise GeometryError(
                f"image with {total} samples cannot carry a ({self.n_queries}, {self.dim}) "
                f"frame; need at least {k}"
            )
        rng = np.random.default_rng([self.seed, 307, *shape])
        signs = rng.integers(0, 2, size=total).astype(np.float64) * 2.0 - 1.0
        rows = np.sort(rng.choice(total, size=k, replace=False))
        self._operators[shape] = (signs, rows)
        return signs, rows

    def encode(self, image) -> FeatureFrame:
        image = check_image_array(image)
        signs, rows = self._operator(image.shape)
        spectrum = dct(signs * image.reshape(-1), type=2, norm="ortho")
        return FeatureFrame.from_array(spectrum[rows].reshape(self.n_queries, self.dim))

    def decode_image(self, frame: FeatureFrame, image_shape=None) -> np.ndarray:
        shape = tuple(int(v) for v in (image_shape if image_shape is not None else self.image_shape))
        if frame.n_queries != self.n_queries or frame.dim != self.dim:
            raise GeometryError(
                f"frame geometry ({frame.n_queries}, {frame.dim}) does not match "
                f"codec ({self.n_queries}, {self.dim})"
            )
        signs, rows = self._operator(shape)
        spectrum = np.zeros(int(np.prod(shape)))
        spectrum[rows] = frame.flat()
        return (signs * idct(spectrum, type=2, norm="ortho")).reshape(shape)

    # -- text decoding ------------------------------------------------------

    def decode_text(self, frame: FeatureFrame) -> tuple[str, float]:
        """Nearest bank label by cosine in the projected k-space.

        Total on any finite frame: a frame that pools/projects to zero
        returns the first bank label with confidence 0.0.
        """
        if frame.dim != self.dim:
            raise GeometryError(f"frame dim {frame.dim} does not match codec dim {self.dim}")
        embedded = self._w_proj @ pool_frame(frame)
        norm = float(np.linalg.norm(embedded))
        if norm == 0.0:
            return self.label_bank[0].label, 0.0
        cosines = self._proto_unit @ (embedded / norm)
        best = int(np.argmax(cosines))
        return self.label_bank[best].label, float(cosines[best])

    def label_index(self, label: str) -> int:
        for i, entry in enumerate(self.label_bank):
            if entry.label == label:
                return i
        raise ConfigError(f"label {label!r} not in bank")
