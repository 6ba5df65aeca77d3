"""Command line entry points: export-anchors and export-images.

Exit codes match the consumer's convention: 0 success, 2 usage, 3 I/O,
4 invalid data or model failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import ExporterError
from .export import export_anchors, export_images
from .templates import TEMPLATES, get_template


def _anchor_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="export-anchors",
        description="Encode one year-prompt per year with a CLIP text encoder "
                    "and write anchor JSONL.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    ap.add_argument("--model", required=True, help="checkpoint id or local path")
    ap.add_argument("--template", default="P7", choices=sorted(TEMPLATES),
                    help="prompt phrasing")
    ap.add_argument("--ymin", type=int, default=1700, help="first year")
    ap.add_argument("--ymax", type=int, default=2024, help="last year")
    ap.add_argument("--batch-size", type=int, default=32)
    ap.add_argument("--device", default="cpu")
    ap.add_argument("--out", required=True, help="anchor JSONL output path")
    return ap


def _image_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="export-images",
        description="Encode a manifest of year-labeled images with a CLIP "
                    "image encoder and write query JSONL.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    ap.add_argument("--model", required=True, help="checkpoint id or local path")
    ap.add_argument("--manifest", required=True,
                    help="CSV with header file,year,label")
    ap.add_argument("--batch-size", type=int, default=32)
    ap.add_argument("--device", default="cpu")
    ap.add_argument("--out", required=True, help="query JSONL output path")
    return ap


def run_anchors(argv: list[str] | None = None) -> int:
    try:
        args = _anchor_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = export_anchors(args.model, get_template(args.template),
                                args.ymin, args.ymax, args.out,
                                batch_size=args.batch_size, device=args.device)
    except ExporterError as exc:
        print(f"export-anchors: error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"export-anchors: i/o error: {exc}", file=sys.stderr)
        return 3
    print(f"wrote {result.written} anchors to {args.out}", file=sys.stderr)
    return 0


def run_images(argv: list[str] | None = None) -> int:
    try:
        args = _image_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        result = export_images(args.model, args.manifest, args.out,
                               batch_size=args.batch_size, device=args.device)
    except ExporterError as exc:
        print(f"export-images: error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"export-images: i/o error: {exc}", file=sys.stderr)
        return 3
    note = f"wrote {result.written} queries to {args.out}"
    if result.skipped:
        note += f" ({result.skipped} unreadable, skipped)"
    print(note, file=sys.stderr)
    return 0


def main_anchors() -> None:
    sys.exit(run_anchors())


def main_images() -> None:
    sys.exit(run_images())
