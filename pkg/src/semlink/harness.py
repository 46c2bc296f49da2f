"""Monte-Carlo SNR sweep runner.

For every (snr, trial, input) the runner derives one seed and feeds it
to every configured pipeline, so the analog feature path and the
digital baseline see identical channel gain/noise draws (the shorter
transmission consumes a prefix of the longer one's draws). Image
inputs drive both pipelines: the baseline transmits the text the codec
decodes from the clean frame. Text inputs drive the baseline only.

Results land in one CSV (schema header line, LF endings, '.' decimals,
deterministic float formatting) so two runs of the same config are
byte-identical. emit_plots turns a sweep CSV into per-metric
(snr, mean, stderr) series files for any plotting tool.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
import os
import shlex
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .baseline import baseline_pipeline
from .channel import ChannelConfig, ChannelKind, CsiMode, equalize_zf, transmit
from .codec import SemanticCodec, ToyProjectionCodec
from .errors import ConfigError, DataError, VersionError
from .frames import SymbolFrame, pack_features, unpack_features
from .images import read_image
from .metrics import (
    LinkTrialReport,
    MetricRegistry,
    bleu,
    external_registry,
    feature_cosine,
    feature_mse,
    image_mse,
    psnr_db,
)

__all__ = [
    "DEFAULT_SNR_LIST",
    "CSV_SCHEMA",
    "CORE_COLUMNS",
    "SweepConfig",
    "InputItem",
    "SweepResult",
    "derive_seed",
    "load_dataset",
    "make_codec",
    "semantic_pipeline",
    "run_sweep",
    "resolve_output",
    "write_csv",
    "read_csv",
    "summarize",
    "emit_plots",
    "parse_config_file",
    "config_from_mapping",
    "OUTPUT_DIR_ENV",
]

log = logging.getLogger("semlink.harness")

DEFAULT_SNR_LIST = (-5.0, -2.5, 0.0, 2.5, 5.0, 7.5, 10.0)
CSV_SCHEMA = "semlink.sweep.v1"
OUTPUT_DIR_ENV = "SEMLINK_OUTPUT_DIR"

CORE_COLUMNS = (
    "pipeline",
    "snr_db",
    "trial",
    "input_id",
    "seed",
    "feature_mse",
    "feature_cosine",
    "image_mse",
    "psnr_db",
    "bleu",
    "ber_pre_fec",
    "ber_post_fec",
    "cer",
    "erasures",
    "label_correct",
)
_KEY_COLUMNS = ("pipeline", "snr_db", "trial", "input_id", "seed", "metric_failed")
_PIPELINES = ("baseline", "semantic")

_CONFIG_KEYS = (
    "snr_list",
    "trials",
    "base_seed",
    "kind",
    "csi",
    "codec",
    "codec_seed",
    "bridge_command",
    "pipelines",
    "output",
    "images",
    "texts",
)


@dataclass(frozen=True)
class SweepConfig:
    snr_list: tuple[float, ...] = DEFAULT_SNR_LIST
    trials_per_snr: int = 200
    base_seed: int = 0
    kind: ChannelKind = ChannelKind.AWGN
    csi: CsiMode = CsiMode.PERFECT
    codec_name: str = "toy"
    codec_seed: int = 0
    bridge_command: str = ""
    pipelines: tuple[str, ...] = _PIPELINES
    output: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "snr_list", tuple(float(s) for s in self.snr_list))
        try:
            object.__setattr__(self, "kind", ChannelKind(self.kind))
            object.__setattr__(self, "csi", CsiMode(self.csi))
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        object.__setattr__(self, "pipelines", tuple(self.pipelines))
        if not self.snr_list:
            raise ConfigError("snr_list must be nonempty")
        if any(not math.isfinite(s) for s in self.snr_list):
            raise ConfigError("snr_list entries must be finite")
        if self.trials_per_snr < 1:
            raise ConfigError(f"trials_per_snr must be >= 1, got {self.trials_per_snr}")
        bad = set(self.pipelines) - set(_PIPELINES)
        if bad or not self.pipelines:
            raise ConfigError(f"pipelines must be a nonempty subset of {_PIPELINES}, got {self.pipelines}")
        if self.codec_name not in ("toy", "bridge"):
            raise ConfigError(f"codec must be 'toy' or 'bridge', got {self.codec_name!r}")
        if self.codec_name == "bridge" and not self.bridge_command:
            raise ConfigError("codec 'bridge' needs bridge_command")


@dataclass(frozen=True)
class InputItem:
    input_id: str
    image: Optional[np.ndarray] = None
    text: Optional[str] = None

    def __post_init__(self):
        if (self.image is None) == (self.text is None):
            raise ConfigError(f"input {self.input_id!r} must carry exactly one of image/text")


@dataclass
class SweepResult:
    csv_path: Path
    rows: list[LinkTrialReport]
    summary: str
    skipped_inputs: list[str] = field(default_factory=list)
    failed_trials: list[str] = field(default_factory=list)

    @property
    def clean(self) -> bool:
        return not self.skipped_inputs and not self.failed_trials


def derive_seed(base_seed: int, snr_index: int, trial: int, input_id: str) -> int:
    """Stable 64-bit trial seed; never wall-clock."""
    key = f"{base_seed}|{snr_index}|{trial}|{input_id}".encode("utf-8")
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")


_IMAGE_SUFFIXES = (".ppm", ".pgm", ".ff", ".farbfeld")


def load_dataset(
    images_dir=None, texts_path=None
) -> tuple[list[InputItem], list[str]]:
    """Collect sweep inputs; unreadable files are skipped with a warning
    and reported so the caller can flag the run."""
    items: list[InputItem] = []
    skipped: list[str] = []
    if images_dir is not None:
        root = Path(images_dir)
        if not root.is_dir():
            raise ConfigError(f"image directory {root} does not exist")
        paths = sorted(p for p in root.iterdir() if p.suffix.lower() in _IMAGE_SUFFIXES)
        for path in paths:
            try:
                items.append(InputItem(input_id=path.name, image=read_image(path)))
            except (DataError, OSError) as exc:
                log.warning("skipping unreadable input %s: %s", path, exc)
                skipped.append(f"{path.name}: {exc}")
    if texts_path is not None:
        path = Path(texts_path)
        if not path.is_file():
            raise ConfigError(f"text list {path} does not exist")
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if line.strip():
                items.append(InputItem(input_id=f"text:{lineno:04d}", text=line))
    return items, skipped


def make_codec(cfg: SweepConfig) -> SemanticCodec:
    if cfg.codec_name == "toy":
        return ToyProjectionCodec(seed=cfg.codec_seed)
    from .bridge import BridgeCodec

    return BridgeCodec.spawn(shlex.split(cfg.bridge_command))


def _through_channel(tx: SymbolFrame, channel_cfg: ChannelConfig) -> SymbolFrame:
    rx = transmit(tx, channel_cfg)
    if rx.csi_available:
        return equalize_zf(rx)
    return SymbolFrame(
        symbols=rx.symbols,
        scale=rx.tx_scale,
        target_power=rx.target_power,
        pad_bits=rx.pad_bits,
    )


def semantic_pipeline(
    image: np.ndarray,
    codec: SemanticCodec,
    channel_cfg: ChannelConfig,
    clean_frame=None,
    clean_text: Optional[str] = None,
):
    """Analog feature transmission of one image.

    Returns (received frame, decoded image, decoded text, report).
    clean_frame/clean_text may be passed in to reuse a cached encode.
    """
    frame = clean_frame if clean_frame is not None else codec.encode(image)
    if clean_text is None:
        clean_text = codec.decode_text(frame)[0]
    tx, record = pack_features(frame)
    eq = _through_channel(tx, channel_cfg)
    rx_frame = unpack_features(eq, record)
    decoded_image = codec.decode_image(rx_frame, image.shape)
    decoded_text, _conf = codec.decode_text(rx_frame)
    mse = image_mse(image, decoded_image)
    report = LinkTrialReport(
        pipeline="semantic",
        snr_db=channel_cfg.snr_db,
        seed=channel_cfg.seed,
        feature_mse=feature_mse(frame, rx_frame),
        feature_cosine=feature_cosine(frame, rx_frame),
        image_mse=mse,
        psnr_db=psnr_db(mse),
        bleu=bleu(decoded_text, clean_text),
        erasures=eq.erasures,
        label_correct=int(decoded_text == clean_text),
    )
    return rx_frame, decoded_image, decoded_text, report


def _apply_external_metrics(report: LinkTrialReport, artifacts: dict, registry: MetricRegistry):
    for name in registry.names():
        try:
            report.externals[name] = registry.score(name, artifacts)
        except Exception as exc:
            log.warning("external metric %s failed on %s: %s", name, report.input_id, exc)
            report.metric_failed = True


def run_sweep(
    cfg: SweepConfig,
    items: Sequence[InputItem],
    registry: Optional[MetricRegistry] = None,
) -> SweepResult:
    """Run the configured pipelines over every (snr, trial, input).

    Execution is serial; rows come out in the canonical
    (snr, trial, input, pipeline) order, so a parallel executor only
    needs to reproduce this ordering before writing.
    """
    if not items:
        raise ConfigError("sweep needs at least one input item")
    registry = external_registry if registry is None else registry
    codec: Optional[SemanticCodec] = None
    image_items = [it for it in items if it.image is not None]
    if image_items:
        codec = make_codec(cfg)

    rows: list[LinkTrialReport] = []
    failed: list[str] = []
    try:
        # Clean-side encode/label once per image; every trial reuses them.
        clean: dict[str, tuple] = {}
        for item in image_items:
            frame = codec.encode(item.image)
            clean[item.input_id] = (frame, codec.decode_text(frame)[0])

        run_semantic = "semantic" in cfg.pipelines
        run_baseline = "baseline" in cfg.pipelines
        for snr_index, snr_db in enumerate(cfg.snr_list):
            for trial in range(cfg.trials_per_snr):
                for item in items:
                    seed = derive_seed(cfg.base_seed, snr_index, trial, item.input_id)
                    channel_cfg = ChannelConfig(kind=cfg.kind, snr_db=snr_db, csi=cfg.csi, seed=seed)
                    if item.image is not None:
                        frame, label = clean[item.input_id]
                        text = label
                    else:
                        frame, label, text = None, None, item.text
                    for pipeline in _PIPELINES:
                        if pipeline == "semantic" and (not run_semantic or item.image is None):
                            continue
                        if pipeline == "baseline" and not run_baseline:
                            continue
                        try:
                            if pipeline == "semantic":
                                rx_frame, decoded_image, decoded_text, report = semantic_pipeline(
                                    item.image, codec, channel_cfg, clean_frame=frame, clean_text=label
                                )
                                artifacts = {
                                    "sent_text": label,
                                    "received_text": decoded_text,
                                    "sent_image": item.image,
                                    "received_image": decoded_image,
                                    "sent_frame": frame,
                                    "received_frame": rx_frame,
                                }
                            else:
                                received_text, report = baseline_pipeline(text, channel_cfg)
                                artifacts = {"sent_text": text, "received_text": received_text}
                            report.trial = trial
                            report.input_id = item.input_id
                            _apply_external_metrics(report, artifacts, registry)
                            rows.append(report)
                        except Exception as exc:
                            log.warning(
                                "%s trial failed (snr=%s, trial=%d, input=%s): %s",
                                pipeline, snr_db, trial, item.input_id, exc,
                            )
                            failed.append(f"{pipeline} snr={snr_db} trial={trial} input={item.input_id}: {exc}")
    finally:
        if codec is not None:
            codec.close()

    csv_path = resolve_output(cfg.output)
    write_csv(csv_path, rows, registry.names())
    summary = summarize(rows)
    summary_path = csv_path.with_suffix(csv_path.suffix + ".summary.txt")
    try:
        summary_path.write_text(summary + "\n", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise ConfigError(f"cannot write summary {summary_path}: {exc}") from exc
    return SweepResult(csv_path=csv_path, rows=rows, summary=summary, failed_trials=failed)


def resolve_output(output: Optional[str], default_name: str = "sweep.csv") -> Path:
    """Turn an --output value (file, directory, or None) into a CSV path.
    None falls back to $SEMLINK_OUTPUT_DIR, then the working directory."""
    if output:
        path = Path(output)
        if path.suffix == ".csv":
            try:
                path.parent.mkdir(parents=True, exist_ok=True)
            except OSError as exc:
                raise ConfigError(f"cannot create output directory {path.parent}: {exc}") from exc
            return path
        base = path
    else:
        base = Path(os.environ.get(OUTPUT_DIR_ENV, "."))
    try:
        base.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {base}: {exc}") from exc
    return base / default_name


def _format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(path, rows: Sequence[LinkTrialReport], external_names: Sequence[str] = ()) -> None:
    """Schema-stamped CSV, LF endings, shortest-roundtrip float text."""
    external_names = sorted(external_names)
    columns = list(CORE_COLUMNS) + list(external_names) + ["metric_failed"]
    ordered = sorted(
        range(len(rows)),
        key=lambda i: (rows[i].snr_db, rows[i].trial, rows[i].input_id, rows[i].pipeline),
    )
    path = Path(path)
    try:
        handle = path.open("w", encoding="utf-8", newline="")
    except OSError as exc:
        raise ConfigError(f"cannot write sweep output {path}: {exc}") from exc
    with handle:
        handle.write(f"# schema={CSV_SCHEMA}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for i in ordered:
            row = rows[i]
            record = [
                row.pipeline,
                _format_cell(row.snr_db),
                str(row.trial),
                row.input_id,
                str(row.seed),
                _format_cell(row.feature_mse),
                _format_cell(row.feature_cosine),
                _format_cell(row.image_mse),
                _format_cell(row.psnr_db),
                _format_cell(row.bleu),
                _format_cell(row.ber_pre_fec),
                _format_cell(row.ber_post_fec),
                _format_cell(row.cer),
                str(row.erasures),
                _format_cell(row.label_correct),
            ]
            record += [_format_cell(row.externals.get(name)) for name in external_names]
            record.append(str(int(row.metric_failed)))
            writer.writerow(record)


def read_csv(path) -> tuple[list[str], list[dict[str, str]]]:
    """Read a sweep CSV back; raises VersionError on a schema mismatch."""
    path = Path(path)
    with path.open("r", encoding="utf-8", newline="") as handle:
        first = handle.readline().strip()
        if first != f"# schema={CSV_SCHEMA}":
            raise VersionError(f"{path} does not carry schema {CSV_SCHEMA} (got {first!r})")
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path} has no header row") from None
        records = [dict(zip(header, row)) for row in reader]
    return header, records


def summarize(rows: Sequence[LinkTrialReport]) -> str:
    """Mean and standard error per (pipeline, snr) for each set metric."""
    metric_names = [c for c in CORE_COLUMNS if c not in _KEY_COLUMNS]
    lines = []
    pipelines = sorted({r.pipeline for r in rows})
    for pipeline in pipelines:
        mine = [r for r in rows if r.pipeline == pipeline]
        for snr in sorted({r.snr_db for r in mine}):
            at = [r for r in mine if r.snr_db == snr]
            parts = [f"[{pipeline}] snr={snr:g} n={len(at)}"]
            for name in metric_names:
                values = [getattr(r, name) for r in at if getattr(r, name) is not None]
                if not values:
                    continue
                arr = np.asarray(values, dtype=np.float64)
                stderr = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
                parts.append(f"{name}={arr.mean():.6g}±{stderr:.2g}")
            lines.append(" ".join(parts))
    return "\n".join(lines) if lines else "(no rows)"


def emit_plots(csv_path) -> list[Path]:
    """Per-metric (pipeline, snr, mean, stderr, n) series files next to
    the CSV; refuses empty inputs before creating anything."""
    csv_path = Path(csv_path)
    header, records = read_csv(csv_path)
    if not records:
        raise DataError(f"{csv_path} has no data rows; nothing to plot")
    metric_names = [c for c in header if c not in _KEY_COLUMNS]
    out_paths = []
    for metric in metric_names:
        series: dict[tuple[str, float], list[float]] = {}
        for rec in records:
            cell = rec.get(metric, "")
            if cell == "":
                continue
            key = (rec["pipeline"], float(rec["snr_db"]))
            series.setdefault(key, []).append(float(cell))
        if not series:
            continue
        out = csv_path.with_name(f"{csv_path.stem}_{metric}.series.csv")
        with out.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(["pipeline", "snr_db", "mean", "stderr", "n"])
            for (pipeline, snr) in sorted(series):
                arr = np.asarray(series[(pipeline, snr)], dtype=np.float64)
                stderr = float(arr.std(ddof=1) / np.sqrt(arr.size)) if arr.size > 1 else 0.0
                writer.writerow([pipeline, repr(snr), repr(float(arr.mean())), repr(stderr), arr.size])
        out_paths.append(out)
    return out_paths


def parse_config_file(path) -> dict[str, str]:
    """Flat key=value config; '#' comments and blank lines ignored."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r} (valid: {', '.join(_CONFIG_KEYS)})")
        values[key] = value.strip()
    return values


def config_from_mapping(values: dict[str, str], base: Optional[SweepConfig] = None) -> SweepConfig:
    """Build a SweepConfig from string key/values (config file or CLI)."""
    cfg = base if base is not None else SweepConfig()
    updates = {}
    if "snr_list" in values:
        try:
            updates["snr_list"] = tuple(float(v) for v in values["snr_list"].split(",") if v.strip())
        except ValueError:
            raise ConfigError(f"bad snr_list {values['snr_list']!r}") from None
    for key, attr, conv in (
        ("trials", "trials_per_snr", int),
        ("base_seed", "base_seed", int),
        ("codec_seed", "codec_seed", int),
        ("kind", "kind", str),
        ("csi", "csi", str),
        ("codec", "codec_name", str),
        ("bridge_command", "bridge_command", str),
        ("output", "output", str),
    ):
        if key in values:
            try:
                updates[attr] = conv(values[key])
            except ValueError:
                raise ConfigError(f"bad value for {key}: {values[key]!r}") from None
    if "pipelines" in values:
        updates["pipelines"] = tuple(p.strip() for p in values["pipelines"].split(",") if p.strip())
    try:
        return replace(cfg, **updates)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
