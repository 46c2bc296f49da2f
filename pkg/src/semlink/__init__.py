"""semlink: link-level simulation of feature-based semantic transmission.

An N x d vision-language feature matrix travels as analog complex
symbols over AWGN or Rayleigh channels, next to the classical digital
chain (7-bit ASCII, (7,4) Hamming, Gray 16-QAM) for comparison, with a
Monte-Carlo sweep harness on top. See README.md for the tour.
"""

from .baseline import baseline_pipeline, sanitize_text, transmit_bits
from .bcr import ImageGeometry, bcr_table, channel_uses, compute_bcr
from .bits import BitStream, ascii_decode, ascii_encode, random_bits
from .channel import (
    ChannelConfig,
    ChannelKind,
    ChannelRealization,
    CsiMode,
    ReceivedFrame,
    calibrate_snr,
    equalize_zf,
    transmit,
)
from .codec import (
    DEFAULT_IMAGE_SHAPE,
    DEFAULT_LABELS,
    DEFAULT_TEXT_DIM,
    LabelEntry,
    SemanticCodec,
    ToyProjectionCodec,
    default_label_bank,
    pool_frame,
)
from .errors import (
    BridgeError,
    ConfigError,
    CsiUnavailableError,
    DataError,
    DegenerateFrameError,
    FramingError,
    GeometryError,
    SemLinkError,
    VersionError,
)
from .frames import (
    DEFAULT_DIM,
    DEFAULT_N_QUERIES,
    FeatureFrame,
    NormalizationRecord,
    SymbolFrame,
    pack_features,
    unpack_features,
)
from .hamming import Hamming74Code, hamming74_decode, hamming74_encode
from .harness import (
    DEFAULT_SNR_LIST,
    InputItem,
    SweepConfig,
    SweepResult,
    derive_seed,
    emit_plots,
    load_dataset,
    run_sweep,
    semantic_pipeline,
)
from .images import ppm_bytes, read_image, write_ppm
from .metrics import (
    PSNR_CAP_DB,
    BleuFlags,
    LinkTrialReport,
    MetricRegistry,
    ber,
    bleu,
    bleu_report,
    cer,
    feature_cosine,
    feature_mse,
    image_mse,
    psnr_db,
    register_external_metric,
    tokenize,
)
from .qam import Qam16Constellation, qam16_demodulate, qam16_modulate

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # frames
    "DEFAULT_N_QUERIES",
    "DEFAULT_DIM",
    "FeatureFrame",
    "SymbolFrame",
    "NormalizationRecord",
    "pack_features",
    "unpack_features",
    # channel
    "ChannelKind",
    "CsiMode",
    "ChannelConfig",
    "ChannelRealization",
    "ReceivedFrame",
    "transmit",
    "equalize_zf",
    "calibrate_snr",
    # bcr
    "ImageGeometry",
    "channel_uses",
    "compute_bcr",
    "bcr_table",
    # digital chain
    "BitStream",
    "ascii_encode",
    "ascii_decode",
    "random_bits",
    "Hamming74Code",
    "hamming74_encode",
    "hamming74_decode",
    "Qam16Constellation",
    "qam16_modulate",
    "qam16_demodulate",
    "baseline_pipeline",
    "transmit_bits",
    "sanitize_text",
    # codec
    "SemanticCodec",
    "ToyProjectionCodec",
    "LabelEntry",
    "default_label_bank",
    "pool_frame",
    "DEFAULT_TEXT_DIM",
    "DEFAULT_IMAGE_SHAPE",
    "DEFAULT_LABELS",
    # metrics
    "PSNR_CAP_DB",
    "BleuFlags",
    "LinkTrialReport",
    "MetricRegistry",
    "register_external_metric",
    "tokenize",
    "bleu",
    "bleu_report",
    "feature_cosine",
    "feature_mse",
    "image_mse",
    "psnr_db",
    "ber",
    "cer",
    # harness
    "DEFAULT_SNR_LIST",
    "SweepConfig",
    "InputItem",
    "SweepResult",
    "derive_seed",
    "load_dataset",
    "semantic_pipeline",
    "run_sweep",
    "emit_plots",
    # images
    "read_image",
    "write_ppm",
    "ppm_bytes",
    # errors
    "SemLinkError",
    "GeometryError",
    "DataError",
    "DegenerateFrameError",
    "ConfigError",
    "FramingError",
    "VersionError",
    "CsiUnavailableError",
    "BridgeError",
]
