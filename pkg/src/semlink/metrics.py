"""Evaluation metrics and the per-trial report record.

Everything here is computable with no model weights. Neural scorers
(BERT score, LPIPS, CLIP score and friends) attach through
register_external_metric and run per trial when configured; they are
never required.

BLEU variant (pinned): lowercase whitespace tokenization, clipped
n-gram precisions up to min(max_n, candidate length), no smoothing,
geometric mean, brevity penalty exp(1 - ref_len/cand_len) when the
candidate is shorter. Any included precision of zero makes the score
zero. Empty candidates score 0.0 and set a flag rather than raising.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np

from .errors import ConfigError, DataError, DegenerateFrameError, FramingError, GeometryError
from .frames import FeatureFrame
from .validation import check_bit_array, check_image_array

__all__ = [
    "tokenize",
    "bleu",
    "bleu_report",
    "BleuFlags",
    "feature_cosine",
    "feature_mse",
    "image_mse",
    "psnr_db",
    "PSNR_CAP_DB",
    "ber",
    "cer",
    "MetricRegistry",
    "register_external_metric",
    "external_registry",
    "LinkTrialReport",
]

# Reported instead of +inf when a reconstruction is exact, so report
# fields stay finite and CSV stays parseable.
PSNR_CAP_DB = 300.0


def tokenize(text: str) -> list[str]:
    """Pinned tokenization: lowercase, split on whitespace."""
    return text.lower().split()


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


@dataclass(frozen=True)
class BleuFlags:
    empty_candidate: bool = False
    zero_precision: bool = False


def bleu_report(candidate, reference, max_n: int = 4) -> tuple[float, BleuFlags]:
    """BLEU score plus degeneracy flags. Arguments may be strings
    (tokenized here) or pre-tokenized sequences."""
    if max_n < 1:
        raise ConfigError(f"max_n must be >= 1, got {max_n}")
    cand = tokenize(candidate) if isinstance(candidate, str) else [str(t).lower() for t in candidate]
    ref = tokenize(reference) if isinstance(reference, str) else [str(t).lower() for t in reference]
    if not cand:
        return 0.0, BleuFlags(empty_candidate=True)
    top_n = min(max_n, len(cand))
    log_sum = 0.0
    for n in range(1, top_n + 1):
        cand_counts = _ngram_counts(cand, n)
        ref_counts = _ngram_counts(ref, n)
        clipped = sum(min(c, ref_counts[g]) for g, c in cand_counts.items())
        total = max(len(cand) - n + 1, 0)
        if clipped == 0 or total == 0:
            return 0.0, BleuFlags(zero_precision=True)
        log_sum += np.log(clipped / total)
    precision_term = float(np.exp(log_sum / top_n))
    if len(cand) < len(ref):
        bp = float(np.exp(1.0 - len(ref) / len(cand)))
    else:
        bp = 1.0
    return bp * precision_term, BleuFlags()


def bleu(candidate, reference, max_n: int = 4) -> float:
    score, _ = bleu_report(candidate, reference, max_n=max_n)
    return score


def _flat_pair(a, b):
    fa = a.flat() if isinstance(a, FeatureFrame) else np.asarray(a, dtype=np.float64).reshape(-1)
    fb = b.flat() if isinstance(b, FeatureFrame) else np.asarray(b, dtype=np.float64).reshape(-1)
    if fa.shape != fb.shape:
        raise GeometryError(f"shape mismatch: {fa.shape} vs {fb.shape}")
    return fa, fb


def feature_cosine(a, b) -> float:
    """Cosine similarity of flattened frames. Scale-invariant; raises
    DegenerateFrameError on an all-zero argument."""
    fa, fb = _flat_pair(a, b)
    na = float(np.linalg.norm(fa))
    nb = float(np.linalg.norm(fb))
    if na == 0.0 or nb == 0.0:
        raise DegenerateFrameError("cosine undefined for an all-zero frame")
    return float(np.dot(fa, fb) / (na * nb))


def feature_mse(a, b) -> float:
    fa, fb = _flat_pair(a, b)
    return float(np.mean((fa - fb) ** 2))


def image_mse(a, b) -> float:
    xa = check_image_array(a)
    xb = check_image_array(b)
    if xa.shape != xb.shape:
        raise GeometryError(f"image shape mismatch: {xa.shape} vs {xb.shape}")
    return float(np.mean((xa - xb) ** 2))


def psnr_db(mse: float, peak: float = 1.0) -> float:
    """Peak SNR in dB; an exact reconstruction reports PSNR_CAP_DB."""
    if mse < 0.0:
        raise DataError(f"mse must be nonnegative, got {mse}")
    if mse == 0.0:
        return PSNR_CAP_DB
    return min(float(10.0 * np.log10(peak * peak / mse)), PSNR_CAP_DB)


def ber(sent, received) -> float:
    sent = check_bit_array(sent)
    received = check_bit_array(received)
    if sent.size != received.size:
        raise FramingError(f"bit length mismatch: {sent.size} vs {received.size}")
    if sent.size == 0:
        return 0.0
    return float(np.mean(sent != received))


def cer(reference: str, candidate: str) -> float:
    """Character error rate: Levenshtein distance over reference length."""
    if reference == candidate:
        return 0.0
    if not reference:
        return float(len(candidate))
    prev = np.arange(len(candidate) + 1)
    for i, rc in enumerate(reference, start=1):
        cur = np.empty_like(prev)
        cur[0] = i
        for j, cc in enumerate(candidate, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (rc != cc))
        prev = cur
    return float(prev[-1]) / len(reference)


class MetricRegistry:
    """Named external scorers, invoked per trial by the harness.

    A scorer is a callable taking a mapping of trial artifacts
    (keys among: sent_text, received_text, sent_image, received_image,
    sent_frame, received_frame) and returning a finite float. Scorer
    exceptions are caught by the harness, which marks the trial
    metric-failed and keeps sweeping.
    """

    def __init__(self):
        self._scorers: dict[str, Callable[[Mapping[str, object]], float]] = {}

    def register(self, name: str, scorer: Callable[[Mapping[str, object]], float]) -> None:
        if not name or not name.replace("_", "").isalnum():
            raise ConfigError(f"metric name must be a nonempty identifier, got {name!r}")
        if name in self._scorers:
            raise ConfigError(f"external metric {name!r} already registered")
        self._scorers[name] = scorer

    def unregister(self, name: str) -> None:
        self._scorers.pop(name, None)

    def names(self) -> list[str]:
        return sorted(self._scorers)

    def score(self, name: str, artifacts: Mapping[str, object]) -> float:
        return float(self._scorers[name](artifacts))


external_registry = MetricRegistry()


def register_external_metric(name: str, scorer: Callable[[Mapping[str, object]], float]) -> None:
    """Register a scorer in the process-wide registry."""
    external_registry.register(name, scorer)


@dataclass
class LinkTrialReport:
    """One pipeline run at one (snr, trial, input) point.

    Fields that do not apply to a pipeline stay None and render as
    empty CSV cells; set fields are finite.
    """

    pipeline: str
    snr_db: float
    seed: int
    trial: int = 0
    input_id: str = ""
    feature_mse: Optional[float] = None
    feature_cosine: Optional[float] = None
    image_mse: Optional[float] = None
    psnr_db: Optional[float] = None
    bleu: Optional[float] = None
    ber_pre_fec: Optional[float] = None
    ber_post_fec: Optional[float] = None
    cer: Optional[float] = None
    erasures: int = 0
    label_correct: Optional[int] = None
    externals: dict[str, float] = field(default_factory=dict)
    metric_failed: bool = False

    def __post_init__(self):
        for name in ("feature_mse", "feature_cosine", "image_mse", "psnr_db",
                     "bleu", "ber_pre_fec", "ber_post_fec", "cer"):
            value = getattr(self, name)
            if value is not None and not np.isfinite(value):
                raise DataError(f"report field {name} must be finite, got {value}")
        if self.bleu is not None and not 0.0 <= self.bleu <= 1.0:
            raise DataError(f"bleu out of [0,1]: {self.bleu}")
        for name in ("ber_pre_fec", "ber_post_fec"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise DataError(f"{name} out of [0,1]: {value}")
