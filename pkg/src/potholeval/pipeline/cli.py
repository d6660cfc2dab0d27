"""Command-line interface.

Subcommands: ``evaluate``, ``compare``, ``upscale``, ``bench``, ``split``,
``plot``. Exit codes: 0 success, 1 validation or config error, 2 data
parse error, 3 partial failure (some images were skipped; results cover
the rest).

Report-emitting commands write figures (SVG) next to the JSON/CSV output
whenever an output directory is given.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .. import __version__
from ..boxgeom import ImageDims
from ..dataio.labels import DETECTION_COLUMNS, parse_label_file
from ..dataio.ppm import load_ppm
from ..dataio.split import ImageRecord, split_counts, split_dataset, write_manifest
from ..errors import ParseError, PotholevalError, ValidationError
from .bench import bench_command
from .compare import compare_runs
from .config import RunConfig, load_config
from .evaluate import run_evaluation
from .plots import comparison_figure, emit_pr_plot
from .report import emit_comparison, emit_report, parse_report
from .upscale import UPSCALE_METHODS, list_images, upscale_dir

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_PARSE = 2
EXIT_PARTIAL = 3


def _parse_ratio(text: str) -> tuple[int, int, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"expected train:val:test, got {text!r}")
    try:
        values = tuple(int(p) for p in parts)
    except ValueError:
        raise ValidationError(f"ratio parts must be integers: {text!r}") from None
    return values


def _parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"expected lo:hi:step, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ValidationError(f"range parts must be numbers: {text!r}") from None


def _parse_columns(text: str) -> tuple[str, ...]:
    return tuple(c.strip() for c in text.replace(",", " ").split())


def _shared_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON run config file")
    parser.add_argument("--seed", type=int, default=0, help="seed for deterministic shuffles")
    parser.add_argument("--iou", type=float, help="primary IoU threshold")
    parser.add_argument("--iou-range", help="ranged-mAP grid as lo:hi:step")
    parser.add_argument("--ap-mode", choices=("raw", "interp"), help="AP integration mode")
    parser.add_argument(
        "--det-format",
        help=f"detection file column order (default {','.join(DETECTION_COLUMNS)})",
    )
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="potholeval",
        description="Evaluate pothole detections and LR-vs-SR upscaling experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("evaluate", help="score detections against ground truth")
    _shared_flags(p_eval)
    p_eval.add_argument("--manifest", help="manifest JSON (overrides config)")
    p_eval.add_argument("--ground-truth", help="ground-truth label dir (overrides config)")
    p_eval.add_argument("--detections", help="detections dir (overrides config)")
    p_eval.add_argument("--images", help="image dir (only needed for timing)")
    p_eval.add_argument("--split", choices=("train", "val", "test", "all"))
    p_eval.add_argument("--label", default="", help="row label for CSV summaries")

    p_cmp = sub.add_parser("compare", help="pair an LR report with an SR report")
    _shared_flags(p_cmp)
    p_cmp.add_argument("lr_report", help="report JSON of the low-resolution run")
    p_cmp.add_argument("sr_report", help="report JSON of the super-resolved run")
    p_cmp.add_argument("--label", default="", help="experiment label")

    p_up = sub.add_parser("upscale", help="upscale a directory of PPM/PGM images")
    _shared_flags(p_up)
    p_up.add_argument("input_dir")
    p_up.add_argument("--method", choices=UPSCALE_METHODS, default="bicubic")
    p_up.add_argument("--factor", type=int, default=4)
    p_up.add_argument("--weights", help="generator parameter file (for --method rrdb)")

    p_bench = sub.add_parser("bench", help="time an external command per image")
    _shared_flags(p_bench)
    p_bench.add_argument("image_dir")
    p_bench.add_argument("--cmd", required=True, help="command template with {image}")
    p_bench.add_argument("--reps", type=int, default=1)

    p_split = sub.add_parser("split", help="write a train/val/test manifest")
    _shared_flags(p_split)
    p_split.add_argument("image_dir")
    p_split.add_argument("label_dir")
    group = p_split.add_mutually_exclusive_group(required=True)
    group.add_argument("--ratio", help="train:val:test ratio, e.g. 11:3:1")
    group.add_argument("--counts", help="exact train:val:test counts summing to N")

    p_plot = sub.add_parser("plot", help="render the PR curve of a report")
    _shared_flags(p_plot)
    p_plot.add_argument("report", help="report JSON file")

    return parser


def _write(out_dir: Path, name: str, data: bytes) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_bytes(data)


def _config_from_args(args) -> RunConfig:
    if args.config:
        config = load_config(args.config)
    else:
        missing = [
            flag
            for flag, value in (
                ("--manifest", args.manifest),
                ("--ground-truth", args.ground_truth),
                ("--detections", args.detections),
            )
            if value is None
        ]
        if missing:
            raise ValidationError(
                f"evaluate needs --config or all of --manifest/--ground-truth/--detections"
                f" (missing {', '.join(missing)})"
            )
        config = RunConfig(
            manifest=args.manifest,
            ground_truth_dir=args.ground_truth,
            detections_dir=args.detections,
        )
    overrides = {}
    if args.manifest:
        overrides["manifest"] = args.manifest
    if args.ground_truth:
        overrides["ground_truth_dir"] = args.ground_truth
    if args.detections:
        overrides["detections_dir"] = args.detections
    if args.images:
        overrides["image_dir"] = args.images
    if args.split:
        overrides["split"] = args.split
    if args.iou is not None:
        overrides["iou_threshold"] = args.iou
    if args.iou_range:
        overrides["iou_range"] = _parse_range(args.iou_range)
    if args.ap_mode:
        overrides["ap_mode"] = args.ap_mode
    if args.det_format:
        overrides["detection_columns"] = _parse_columns(args.det_format)
    if args.out:
        overrides["output_dir"] = args.out
    return dataclasses.replace(config, **overrides) if overrides else config


def _cmd_evaluate(args) -> int:
    config = _config_from_args(args)
    report = run_evaluation(config)
    payload = emit_report(report, args.format, label=args.label)
    if args.out:
        out_dir = Path(args.out)
        _write(out_dir, f"report.{args.format}", payload)
        if args.format != "json":
            _write(out_dir, "report.json", emit_report(report, "json", label=args.label))
        plot = emit_pr_plot(report.curve)
        _write(out_dir, "pr_curve.svg", plot.svg)
        _write(out_dir, "pr_curve.csv", plot.csv)
        if plot.warning:
            print(f"warning: {plot.warning}", file=sys.stderr)
    else:
        sys.stdout.write(payload.decode("utf-8"))
    if report.partial:
        skipped = [e.image_id for e in report.per_image if e.error]
        print(f"warning: skipped {len(skipped)} unreadable image(s): "
              f"{', '.join(skipped)}", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


def _cmd_compare(args) -> int:
    lr = parse_report(Path(args.lr_report).read_bytes())
    sr = parse_report(Path(args.sr_report).read_bytes())
    comparison = compare_runs(lr, sr, label=args.label)
    payload = emit_comparison(comparison, args.format)
    if args.out:
        out_dir = Path(args.out)
        _write(out_dir, f"comparison.{args.format}", payload)
        if args.format != "json":
            _write(out_dir, "comparison.json", emit_comparison(comparison, "json"))
        _write(out_dir, "comparison.svg", comparison_figure(comparison))
    else:
        sys.stdout.write(payload.decode("utf-8"))
    return EXIT_OK


def _cmd_upscale(args) -> int:
    if not args.out:
        raise ValidationError("upscale needs --out for the upscaled images")
    result = upscale_dir(
        args.input_dir,
        args.out,
        method=args.method,
        factor=args.factor,
        weights_path=args.weights,
    )
    timing = {
        "method": args.method,
        "factor": args.factor,
        "written": list(result.written),
        "errors": list(result.errors),
        "timing": result.stats.to_dict(),
    }
    _write(Path(args.out), "timing.json", (json.dumps(timing, indent=2) + "\n").encode())
    for failure in result.errors:
        print(f"warning: skipped {failure['image']}: {failure['error']}", file=sys.stderr)
    return EXIT_PARTIAL if result.errors else EXIT_OK


def _cmd_bench(args) -> int:
    images = list_images(args.image_dir)
    if not images:
        print("warning: no images found; empty stats", file=sys.stderr)
    result = bench_command(args.cmd, images, repetitions=args.reps)
    payload = {
        "command": args.cmd,
        "repetitions": args.reps,
        "images": [p.name for p in images],
        "failures": list(result.failures),
        "timing": result.stats.to_dict(),
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        _write(Path(args.out), "bench.json", text.encode())
    else:
        sys.stdout.write(text)
    return EXIT_PARTIAL if result.failures else EXIT_OK


def _cmd_split(args) -> int:
    image_paths = list_images(args.image_dir)
    if not image_paths:
        raise ValidationError(f"no PPM/PGM images under {args.image_dir}")
    label_root = Path(args.label_dir)
    if not label_root.is_dir():
        raise ValidationError(f"label dir does not exist: {args.label_dir}")
    records = []
    for path in image_paths:
        header = load_ppm(path.read_bytes())
        label_path = label_root / f"{path.stem}.txt"
        annotations = ()
        if label_path.exists():
            try:
                annotations = tuple(parse_label_file(label_path.read_text()))
            except ParseError as exc:
                raise ParseError(str(exc), path=str(label_path)) from None
        records.append(
            ImageRecord(
                image_id=path.stem,
                dims=ImageDims(header.dims.width, header.dims.height),
                annotations=annotations,
            )
        )
    if args.counts:
        counts = _parse_ratio(args.counts)
        if sum(counts) != len(records):
            raise ValidationError(
                f"counts {args.counts} sum to {sum(counts)}, but there are"
                f" {len(records)} images"
            )
        ratio = counts
    else:
        ratio = _parse_ratio(args.ratio)
    split_counts(len(records), ratio)  # validates before shuffling
    manifest = split_dataset(records, ratio, seed=args.seed)
    text = write_manifest(manifest)
    if args.out:
        _write(Path(args.out), "manifest.json", text.encode())
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_plot(args) -> int:
    report = parse_report(Path(args.report).read_bytes())
    plot = emit_pr_plot(report.curve)
    out_dir = Path(args.out) if args.out else Path(".")
    _write(out_dir, "pr_curve.svg", plot.svg)
    _write(out_dir, "pr_curve.csv", plot.csv)
    if plot.warning:
        print(f"warning: {plot.warning}", file=sys.stderr)
    return EXIT_OK


_COMMANDS = {
    "evaluate": _cmd_evaluate,
    "compare": _cmd_compare,
    "upscale": _cmd_upscale,
    "bench": _cmd_bench,
    "split": _cmd_split,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (ValidationError, PotholevalError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
