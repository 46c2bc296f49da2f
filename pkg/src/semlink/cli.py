"""Command-line front end.

Subcommands: sweep, baseline, bcr, calibrate, plot-data. Output CSVs
default to $SEMLINK_OUTPUT_DIR (falling back to the working directory)
unless --output names a file or directory. Exit codes: 0 clean, 1 when
any input was skipped or any trial failed, 2 on configuration/usage
errors.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys

import numpy as np

from .baseline import baseline_pipeline
from .bcr import ImageGeometry, channel_uses, compute_bcr
from .channel import ChannelConfig, calibrate_snr
from .errors import SemLinkError
from .harness import (
    DEFAULT_SNR_LIST,
    SweepConfig,
    config_from_mapping,
    derive_seed,
    emit_plots,
    load_dataset,
    parse_config_file,
    resolve_output,
    run_sweep,
)

__all__ = ["main", "build_parser"]

BASELINE_SCHEMA = "semlink.baseline.v1"


def _parse_snr_list(text: str) -> tuple[float, ...]:
    return tuple(float(v) for v in text.split(",") if v.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semlink", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true", help="log per-trial warnings")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="Monte-Carlo SNR sweep over a dataset")
    p_sweep.add_argument("--config", help="flat key=value config file; flags override")
    p_sweep.add_argument("--images", help="directory of P6/P5 PPM or farbfeld rasters")
    p_sweep.add_argument("--texts", help="file with one baseline message per line")
    p_sweep.add_argument("--snr", help="comma-separated SNR list in dB")
    p_sweep.add_argument("--trials", type=int, help="trials per SNR point")
    p_sweep.add_argument("--seed", type=int, help="base seed for trial derivation")
    p_sweep.add_argument("--codec-seed", type=int, help="toy codec projection seed")
    p_sweep.add_argument("--kind", choices=["awgn", "rayleigh"], help="channel kind")
    p_sweep.add_argument("--csi", choices=["perfect", "none"], help="receiver CSI")
    p_sweep.add_argument("--codec", choices=["toy", "bridge"], help="semantic codec")
    p_sweep.add_argument("--bridge-command", help="server command for --codec bridge")
    p_sweep.add_argument("--pipelines", help="comma subset of semantic,baseline")
    p_sweep.add_argument("--output", help="output CSV file or directory")
    p_sweep.add_argument("--plot", action="store_true", help="emit per-metric series files too")

    p_base = sub.add_parser("baseline", help="digital chain over a text list")
    p_base.add_argument("--text-file", help="file with one message per line")
    p_base.add_argument("--text", help="single message (alternative to --text-file)")
    p_base.add_argument("--snr", default=None, help="comma-separated SNR list in dB")
    p_base.add_argument("--trials", type=int, default=10)
    p_base.add_argument("--seed", type=int, default=0)
    p_base.add_argument("--kind", choices=["awgn", "rayleigh"], default="awgn")
    p_base.add_argument("--csi", choices=["perfect", "none"], default="perfect")
    p_base.add_argument("--output", help="output CSV file or directory")

    p_bcr = sub.add_parser("bcr", help="bandwidth compression ratio for a geometry")
    p_bcr.add_argument("--queries", type=int, default=32)
    p_bcr.add_argument("--dim", type=int, default=768)
    p_bcr.add_argument("--channels", type=int, default=3)
    p_bcr.add_argument("--height", type=int, default=256)
    p_bcr.add_argument("--width", type=int, default=256)

    p_cal = sub.add_parser("calibrate", help="measure realized SNR against the configuration")
    p_cal.add_argument("--snr", default=None, help="comma-separated SNR list in dB")
    p_cal.add_argument("--kind", choices=["awgn", "rayleigh"], default="awgn")
    p_cal.add_argument("--csi", choices=["perfect", "none"], default="perfect")
    p_cal.add_argument("--pilots", type=int, default=100_000)
    p_cal.add_argument("--seed", type=int, default=0)

    p_plot = sub.add_parser("plot-data", help="per-metric series files from a sweep CSV")
    p_plot.add_argument("csv", help="sweep CSV path")
    return parser


def _cmd_sweep(args) -> int:
    values = parse_config_file(args.config) if args.config else {}
    overrides = {
        "snr_list": args.snr,
        "trials": args.trials,
        "base_seed": args.seed,
        "codec_seed": args.codec_seed,
        "kind": args.kind,
        "csi": args.csi,
        "codec": args.codec,
        "bridge_command": args.bridge_command,
        "pipelines": args.pipelines,
        "output": args.output,
    }
    for key, value in overrides.items():
        if value is not None:
            values[key] = str(value)
    cfg = config_from_mapping(values)
    images = args.images if args.images else values.get("images")
    texts = args.texts if args.texts else values.get("texts")
    items, skipped = load_dataset(images_dir=images, texts_path=texts)
    result = run_sweep(cfg, items)
    result.skipped_inputs.extend(skipped)
    print(result.summary)
    print(f"wrote {result.csv_path}")
    if args.plot:
        for path in emit_plots(result.csv_path):
            print(f"wrote {path}")
    if skipped:
        print(f"skipped {len(skipped)} unreadable input(s)", file=sys.stderr)
    if result.failed_trials:
        print(f"{len(result.failed_trials)} trial(s) failed", file=sys.stderr)
    return 0 if result.clean else 1


def _cmd_baseline(args) -> int:
    if bool(args.text_file) == bool(args.text):
        raise SemLinkError("pass exactly one of --text-file or --text")
    if args.text_file:
        lines = [ln for ln in open(args.text_file, encoding="utf-8").read().splitlines() if ln.strip()]
    else:
        lines = [args.text]
    if not lines:
        raise SemLinkError("no messages to send")
    snr_list = _parse_snr_list(args.snr) if args.snr else DEFAULT_SNR_LIST
    out = resolve_output(args.output, default_name="baseline.csv")
    with out.open("w", encoding="utf-8", newline="") as handle:
        handle.write(f"# schema={BASELINE_SCHEMA}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["snr_db", "trial", "input_id", "ber_pre_fec", "ber_post_fec", "cer", "bleu"])
        for snr_index, snr_db in enumerate(snr_list):
            collected = {"ber_pre_fec": [], "ber_post_fec": [], "cer": [], "bleu": []}
            for trial in range(args.trials):
                for lineno, text in enumerate(lines, start=1):
                    input_id = f"text:{lineno:04d}"
                    seed = derive_seed(args.seed, snr_index, trial, input_id)
                    cfg = ChannelConfig(kind=args.kind, snr_db=snr_db, csi=args.csi, seed=seed)
                    _, report = baseline_pipeline(text, cfg)
                    writer.writerow(
                        [
                            repr(float(snr_db)),
                            trial,
                            input_id,
                            repr(report.ber_pre_fec),
                            repr(report.ber_post_fec),
                            repr(report.cer),
                            repr(report.bleu),
                        ]
                    )
                    for key in collected:
                        collected[key].append(getattr(report, key))
            means = {k: float(np.mean(v)) for k, v in collected.items()}
            print(
                f"snr={snr_db:g} ber_pre={means['ber_pre_fec']:.4g} "
                f"ber_post={means['ber_post_fec']:.4g} cer={means['cer']:.4g} "
                f"bleu={means['bleu']:.4g}"
            )
    print(f"wrote {out}")
    return 0


def _cmd_bcr(args) -> int:
    geom = ImageGeometry(channels=args.channels, height=args.height, width=args.width)
    ratio = compute_bcr(args.queries, args.dim, geom)
    uses = channel_uses(args.queries, args.dim)
    print(f"geometry: {geom.channels}x{geom.height}x{geom.width} ({geom.samples} samples)")
    print(f"feature frame: {args.queries}x{args.dim} -> {uses} channel uses")
    print(f"bcr: {ratio} ({float(ratio):.6g})")
    return 0


def _cmd_calibrate(args) -> int:
    snr_list = _parse_snr_list(args.snr) if args.snr else DEFAULT_SNR_LIST
    worst = 0.0
    for snr_db in snr_list:
        cfg = ChannelConfig(kind=args.kind, snr_db=snr_db, csi=args.csi, seed=args.seed)
        measured = calibrate_snr(cfg, n_symbols=args.pilots)
        delta = measured - snr_db
        worst = max(worst, abs(delta))
        print(f"configured={snr_db:+.2f} dB measured={measured:+.4f} dB delta={delta:+.4f} dB")
    print(f"worst |delta| = {worst:.4f} dB over {len(snr_list)} point(s)")
    return 0


def _cmd_plot_data(args) -> int:
    for path in emit_plots(args.csv):
        print(f"wrote {path}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.WARNING if args.verbose else logging.ERROR,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handlers = {
        "sweep": _cmd_sweep,
        "baseline": _cmd_baseline,
        "bcr": _cmd_bcr,
        "calibrate": _cmd_calibrate,
        "plot-data": _cmd_plot_data,
    }
    try:
        return handlers[args.command](args)
    except SemLinkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
