"""Fading/noisy channel model, SNR calibration and zero-forcing recovery.

Received symbols follow y_rx[i] = h[i] * y[i] + n[i] with i.i.d. noise of
total complex variance sigma^2 = target_power * 10^(-snr_db/10), split
evenly between quadratures. Gains are all ones for AWGN and i.i.d.
circularly-symmetric complex Gaussian with unit second moment for
Rayleigh fading (fast fading: one independent gain per symbol).

Draw layout is pinned for reproducibility and paired comparisons: symbol i
consumes standard normals (h_re, h_im, n_re, n_im) in index order, so the
draws of a short transmission are a prefix of a longer one's under the
same seed, and AWGN/Rayleigh runs with equal seeds share noise.

The receiver side is a documented choice, not part of the channel model:
zero-forcing division under perfect per-symbol CSI, with deep fades
(|h| < 1e-12) zeroed and tallied instead of amplified.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, CsiUnavailableError, GeometryError
from .frames import SymbolFrame

__all__ = [
    "ChannelKind",
    "CsiMode",
    "ChannelConfig",
    "ChannelRealization",
    "ReceivedFrame",
    "transmit",
    "equalize_zf",
    "calibrate_snr",
    "noise_variance_for",
    "ERASURE_GAIN_FLOOR",
]

ERASURE_GAIN_FLOOR = 1e-12


class ChannelKind(str, enum.Enum):
    AWGN = "awgn"
    RAYLEIGH_AWGN = "rayleigh"


class CsiMode(str, enum.Enum):
    PERFECT = "perfect"
    NONE = "none"


@dataclass(frozen=True)
class ChannelConfig:
    kind: ChannelKind = ChannelKind.AWGN
    snr_db: float = 10.0
    csi: CsiMode = CsiMode.PERFECT
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "kind", ChannelKind(self.kind))
            object.__setattr__(self, "csi", CsiMode(self.csi))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if not np.isfinite(self.snr_db):
            raise ConfigError(f"snr_db must be finite, got {self.snr_db}")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True)
class ChannelRealization:
    """Per-symbol gains and the noise variance used for one transmission."""

    gains: np.ndarray
    noise_variance: float


@dataclass(frozen=True)
class ReceivedFrame:
    """Channel output plus what the receiver is allowed to know about it."""

    symbols: np.ndarray
    realization: ChannelRealization
    csi_available: bool
    tx_scale: float = 1.0
    target_power: float = 1.0
    pad_bits: int = 0

    def __len__(self) -> int:
        return self.symbols.size


def noise_variance_for(snr_db: float, target_power: float = 1.0) -> float:
    """Total complex-symbol noise variance for a given SNR in dB."""
    return target_power * 10.0 ** (-snr_db / 10.0)


def _draws(seed: int, n: int) -> np.ndarray:
    # (n, 4) standard normals; column order (h_re, h_im, n_re, n_im).
    rng = np.random.default_rng(seed)
    return rng.standard_normal((n, 4))


def transmit(tx: SymbolFrame, cfg: ChannelConfig) -> ReceivedFrame:
    """Push a symbol frame through the configured channel.

    Deterministic given (cfg.seed, symbol count): equal inputs produce
    bit-for-bit equal outputs.
    """
    n = len(tx)
    if n == 0:
        raise GeometryError("cannot transmit an empty symbol frame")
    sigma2 = noise_variance_for(cfg.snr_db, tx.target_power)
    g = _draws(cfg.seed, n)
    if cfg.kind is ChannelKind.RAYLEIGH_AWGN:
        gains = (g[:, 0] + 1j * g[:, 1]) / np.sqrt(2.0)
    else:
        gains = np.ones(n, dtype=np.complex128)
    noise = np.sqrt(sigma2 / 2.0) * (g[:, 2] + 1j * g[:, 3])
    received = gains * tx.symbols + noise
    return ReceivedFrame(
        symbols=received,
        realization=ChannelRealization(gains=gains, noise_variance=sigma2),
        csi_available=cfg.csi is CsiMode.PERFECT,
        tx_scale=tx.scale,
        target_power=tx.target_power,
        pad_bits=tx.pad_bits,
    )


def equalize_zf(rx: ReceivedFrame) -> SymbolFrame:
    """Zero-forcing recovery: divide each symbol by its known gain.

    Symbols whose gain magnitude is below ERASURE_GAIN_FLOOR are replaced
    by 0 and counted in the returned frame's erasure tally; amplifying
    them would blow the noise up to non-finite feature values.
    """
    if not rx.csi_available:
        raise CsiUnavailableError("zero-forcing needs channel state the receiver does not have")
    gains = rx.realization.gains
    erased = np.abs(gains) < ERASURE_GAIN_FLOOR
    safe = np.where(erased, 1.0, gains)
    out = np.where(erased, 0.0, rx.symbols / safe)
    return SymbolFrame(
        symbols=out,
        scale=rx.tx_scale,
        target_power=rx.target_power,
        erasures=int(erased.sum()),
        pad_bits=rx.pad_bits,
    )


def calibrate_snr(cfg: ChannelConfig, n_symbols: int = 100_000) -> float:
    """Measure the realized SNR in dB from a pilot transmission.

    Sends n_symbols unit-power pilots, separates gains and noise (both are
    known to the measurement, not to a receiver) and returns
    10*log10(P * mean|h|^2 / mean|n|^2) with P = 1.
    """
    if n_symbols < 10_000:
        raise ConfigError(f"calibration needs at least 10000 pilots, got {n_symbols}")
    pilots = np.full(n_symbols, (1.0 + 1.0j) / np.sqrt(2.0), dtype=np.complex128)
    tx = SymbolFrame(symbols=pilots, scale=1.0, target_power=1.0)
    rx = transmit(tx, cfg)
    gains = rx.realization.gains
    noise = rx.symbols - gains * pilots
    mean_gain_power = float(np.mean(np.abs(gains) ** 2))
    mean_noise_power = float(np.mean(np.abs(noise) ** 2))
    return 10.0 * np.log10(mean_gain_power / mean_noise_power)
