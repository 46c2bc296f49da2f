"""Estimator-style wrappers over the link primitives.

Each wrapper follows the fit/transform/inverse_transform protocol
(get_params/set_params included via the scikit-learn base classes) so
link stages can sit inside pipelines and grid searches. Rows are
samples: a frame, a bit block, or a flattened image per row.

Two deliberate deviations from the functional API, both documented on
the classes: FeaturePacker learns one normalization scale at fit time
and applies it to every frame (pack_features normalizes each frame by
itself), and WirelessChannel derives one seed per row index so a
transform is reproducible yet rows see independent channels.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .channel import ChannelConfig, equalize_zf, transmit
from .codec import DEFAULT_IMAGE_SHAPE, DEFAULT_TEXT_DIM, ToyProjectionCodec
from .errors import DataError, DegenerateFrameError, GeometryError
from .frames import DEFAULT_DIM, DEFAULT_N_QUERIES, FeatureFrame, SymbolFrame
from .hamming import Hamming74Code
from .harness import derive_seed
from .qam import qam16_demodulate, qam16_modulate

__all__ = [
    "FeaturePacker",
    "WirelessChannel",
    "Hamming74Coder",
    "Qam16Modem",
    "ToyCodecTransform",
]


def _as_2d(X, dtype, name: str) -> np.ndarray:
    arr = np.asarray(X, dtype=dtype)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] == 0:
        raise GeometryError(f"{name} expects a 2-D sample matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} input must be finite")
    return arr


def _check_bits_2d(X, width_multiple: int, name: str) -> np.ndarray:
    arr = _as_2d(X, np.float64, name)
    rounded = arr.astype(np.uint8)
    if not np.array_equal(rounded, arr):
        raise DataError(f"{name} expects 0/1 entries")
    if arr.shape[1] % width_multiple != 0:
        raise GeometryError(
            f"{name} expects row width divisible by {width_multiple}, got {arr.shape[1]}"
        )
    return rounded


class FeaturePacker(TransformerMixin, BaseEstimator):
    """Consecutive-real pairing plus power normalization, scaler-style.

    fit learns a single scale from the training frames' mean complex
    symbol power; transform applies that one scale to every row and
    pairs element 2k with 2k+1 as real/imaginary parts. Per-frame
    normalization (ideal per-frame side information) is pack_features.
    """

    def __init__(self, target_power: float = 1.0):
        self.target_power = target_power

    def fit(self, X, y=None):
        X = _as_2d(X, np.float64, "FeaturePacker")
        if X.shape[1] % 2 != 0:
            raise GeometryError(f"row width must be even, got {X.shape[1]}")
        if not (self.target_power > 0):
            raise GeometryError(f"target_power must be positive, got {self.target_power}")
        raw = X[:, 0::2] + 1j * X[:, 1::2]
        mean_power = float(np.mean(np.abs(raw) ** 2))
        if mean_power == 0.0:
            raise DegenerateFrameError("cannot learn a scale from all-zero training frames")
        self.n_features_in_ = X.shape[1]
        self.scale_ = float(np.sqrt(self.target_power / mean_power))
        return self

    def transform(self, X) -> np.ndarray:
        self._check_is_fitted()
        X = _as_2d(X, np.float64, "FeaturePacker")
        if X.shape[1] != self.n_features_in_:
            raise GeometryError(f"expected {self.n_features_in_} features, got {X.shape[1]}")
        return self.scale_ * (X[:, 0::2] + 1j * X[:, 1::2])

    def inverse_transform(self, Z) -> np.ndarray:
        self._check_is_fitted()
        Z = np.asarray(Z, dtype=np.complex128)
        if Z.ndim == 1:
            Z = Z.reshape(1, -1)
        out = np.empty((Z.shape[0], 2 * Z.shape[1]), dtype=np.float64)
        out[:, 0::2] = Z.real
        out[:, 1::2] = Z.imag
        return out / self.scale_

    def _check_is_fitted(self):
        if not hasattr(self, "scale_"):
            raise DataError("FeaturePacker is not fitted; call fit first")


class WirelessChannel(TransformerMixin, BaseEstimator):
    """Channel stage: each row of complex symbols takes one independent
    realization, seeded by (seed, row index) so transforms replay
    exactly. With CSI the output is zero-forcing equalized; the
    erasures_ attribute tallies deep fades from the last transform."""

    def __init__(self, kind="awgn", snr_db: float = 10.0, csi="perfect", seed: int = 0,
                 target_power: float = 1.0):
        self.kind = kind
        self.snr_db = snr_db
        self.csi = csi
        self.seed = seed
        self.target_power = target_power

    def fit(self, X, y=None):
        self.n_features_in_ = np.asarray(X).shape[-1]
        return self

    def transform(self, X) -> np.ndarray:
        Z = np.asarray(X, dtype=np.complex128)
        if Z.ndim == 1:
            Z = Z.reshape(1, -1)
        out = np.empty_like(Z)
        erasures = 0
        for i in range(Z.shape[0]):
            cfg = ChannelConfig(
                kind=self.kind,
                snr_db=self.snr_db,
                csi=self.csi,
                seed=derive_seed(self.seed, 0, i, "row"),
            )
            tx = SymbolFrame(symbols=Z[i], scale=1.0, target_power=self.target_power)
            rx = transmit(tx, cfg)
            if rx.csi_available:
                eq = equalize_zf(rx)
                out[i] = eq.symbols
                erasures += eq.erasures
            else:
                out[i] = rx.symbols
        self.erasures_ = erasures
        return out


class Hamming74Coder(TransformerMixin, BaseEstimator):
    """(7,4) block code over rows of bits: transform encodes rows of
    width 4k into 7k, inverse_transform syndrome-corrects back and
    counts applied corrections in corrections_."""

    def fit(self, X, y=None):
        X = _check_bits_2d(X, 4, "Hamming74Coder")
        self.n_features_in_ = X.shape[1]
        self.code_ = Hamming74Code()
        return self

    def transform(self, X) -> np.ndarray:
        self._require_fit()
        X = _check_bits_2d(X, 4, "Hamming74Coder")
        n = X.shape[0]
        coded = self.code_.encode_blocks(X.reshape(-1, 4))
        return coded.reshape(n, -1)

    def inverse_transform(self, C) -> np.ndarray:
        self._require_fit()
        C = _check_bits_2d(C, 7, "Hamming74Coder")
        n = C.shape[0]
        data, corrections = self.code_.correct_blocks(C.reshape(-1, 7))
        self.corrections_ = corrections
        return data.reshape(n, -1)

    def _require_fit(self):
        if not hasattr(self, "code_"):
            raise DataError("Hamming74Coder is not fitted; call fit first")


class Qam16Modem(TransformerMixin, BaseEstimator):
    """Gray 16-QAM over rows of bits: width-4k bit rows become width-k
    complex rows and back."""

    def fit(self, X, y=None):
        X = _check_bits_2d(X, 4, "Qam16Modem")
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X) -> np.ndarray:
        X = _check_bits_2d(X, 4, "Qam16Modem")
        return np.stack([qam16_modulate(row).symbols for row in X])

    def inverse_transform(self, Z) -> np.ndarray:
        Z = np.asarray(Z, dtype=np.complex128)
        if Z.ndim == 1:
            Z = Z.reshape(1, -1)
        rows = [
            qam16_demodulate(SymbolFrame(symbols=row, scale=1.0, target_power=1.0)).bits
            for row in Z
        ]
        return np.stack(rows)


class ToyCodecTransform(TransformerMixin, BaseEstimator):
    """Toy codec as a transformer: rows are flattened images of the
    configured shape; transform yields flattened feature frames,
    inverse_transform the flattened reconstructions."""

    def __init__(self, n_queries: int = DEFAULT_N_QUERIES, dim: int = DEFAULT_DIM,
                 seed: int = 0, text_dim: int = DEFAULT_TEXT_DIM,
                 image_shape: tuple[int, int, int] = DEFAULT_IMAGE_SHAPE):
        self.n_queries = n_queries
        self.dim = dim
        self.seed = seed
        self.text_dim = text_dim
        self.image_shape = image_shape

    def fit(self, X=None, y=None):
        self.codec_ = ToyProjectionCodec(
            n_queries=self.n_queries,
            dim=self.dim,
            seed=self.seed,
            text_dim=self.text_dim,
            image_shape=tuple(self.image_shape),
        )
        self.n_features_in_ = int(np.prod(self.image_shape))
        return self

    def transform(self, X) -> np.ndarray:
        self._require_fit()
        X = _as_2d(X, np.float64, "ToyCodecTransform")
        if X.shape[1] != self.n_features_in_:
            raise GeometryError(
                f"rows must hold {self.n_features_in_} samples for shape {self.image_shape}, "
                f"got {X.shape[1]}"
            )
        frames = [self.codec_.encode(row.reshape(self.image_shape)) for row in X]
        return np.stack([f.flat() for f in frames])

    def inverse_transform(self, F) -> np.ndarray:
        self._require_fit()
        F = _as_2d(F, np.float64, "ToyCodecTransform")
        expected = self.n_queries * self.dim
        if F.shape[1] != expected:
            raise GeometryError(f"rows must hold {expected} feature values, got {F.shape[1]}")
        images = [
            self.codec_.decode_image(
                FeatureFrame.from_array(row.reshape(self.n_queries, self.dim)),
                self.image_shape,
            ).reshape(-1)
            for row in F
        ]
        return np.stack(images)

    def _require_fit(self):
        if not hasattr(self, "codec_"):
            raise DataError("ToyCodecTransform is not fitted; call fit first")
