"""Batch CLIP inference that writes chronoline-compatible JSONL files.

Anchors come from the text encoder (one filled prompt per year), queries
from the image encoder (one line per manifest row). Vectors are written
raw; the consumer owns the normalization policy.
"""

from __future__ import annotations

import csv
import json
import os
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ExporterError
from .templates import PromptTemplate

_BATCH = 32


@dataclass(frozen=True)
class ExportResult:
    written: int
    skipped: int


@dataclass(frozen=True)
class ManifestRow:
    file: Path
    year: int
    label: str


def load_clip(model_id: str, device: str = "cpu"):
    """(model, processor) for a CLIP-family checkpoint, eval mode on device."""
    import torch
    from transformers import CLIPModel, CLIPProcessor

    try:
        model = CLIPModel.from_pretrained(model_id)
        processor = CLIPProcessor.from_pretrained(model_id)
    except Exception as exc:
        raise ExporterError(f"cannot load model {model_id!r}: {exc}") from exc
    model.eval()
    model.to(torch.device(device))
    return model, processor


def build_prompts(template: PromptTemplate, years: list[int]) -> list[str]:
    return [template.fill(y) for y in years]


def _encode(feature_fn, inputs_fn, items: list, batch_size: int) -> np.ndarray:
    import torch

    chunks = []
    with torch.no_grad():
        for start in range(0, len(items), batch_size):
            batch = items[start:start + batch_size]
            try:
                features = feature_fn(**inputs_fn(batch))
            except ExporterError:
                raise
            except Exception as exc:
                raise ExporterError(f"encoder error: {exc}") from exc
            # transformers >= 5 returns an output object; older versions a tensor
            if hasattr(features, "pooler_output"):
                features = features.pooler_output
            chunks.append(features.cpu().numpy().astype(np.float64))
    if not chunks:
        return np.zeros((0, 0))
    return np.concatenate(chunks, axis=0)


def encode_texts(model, processor, prompts: list[str], batch_size: int = _BATCH) -> np.ndarray:
    device = next(model.parameters()).device

    def inputs(batch):
        enc = processor(text=batch, padding=True, return_tensors="pt")
        return {k: v.to(device) for k, v in enc.items()}

    return _encode(model.get_text_features, inputs, prompts, batch_size)


def encode_images(model, processor, images: list, batch_size: int = _BATCH) -> np.ndarray:
    device = next(model.parameters()).device

    def inputs(batch):
        enc = processor(images=batch, return_tensors="pt")
        return {k: v.to(device) for k, v in enc.items()}

    return _encode(model.get_image_features, inputs, images, batch_size)


def _write_jsonl(path: str | Path, records: list[dict]) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            for rec in records:
                fh.write(json.dumps(rec, sort_keys=True))
                fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def export_anchors(model_id: str, template: PromptTemplate, y_min: int, y_max: int,
                   out: str | Path, batch_size: int = _BATCH,
                   device: str = "cpu") -> ExportResult:
    """One JSONL line per year in [y_min, y_max] with the filled prompt's
    text embedding; ids are "{template.id}-{year}"."""
    if y_max < y_min:
        raise ExporterError(f"invalid year range {y_min}..{y_max}")
    model, processor = load_clip(model_id, device=device)
    years = list(range(y_min, y_max + 1))
    vectors = encode_texts(model, processor, build_prompts(template, years), batch_size)
    records = [
        {"id": f"{template.id}-{year}", "vec": vec.tolist(), "year": year}
        for year, vec in zip(years, vectors)
    ]
    _write_jsonl(out, records)
    return ExportResult(written=len(records), skipped=0)


def read_manifest(path: str | Path) -> list[ManifestRow]:
    """Rows of a file,year,label CSV; relative paths resolve against the
    manifest's own directory."""
    path = Path(path)
    base = path.parent
    rows: list[ManifestRow] = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        required = {"file", "year", "label"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise ExporterError(
                f"{path}: manifest header must contain columns file,year,label"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                year = int(row["year"])
            except (TypeError, ValueError):
                raise ExporterError(
                    f"{path}:{lineno}: year {row['year']!r} is not an integer"
                ) from None
            file = Path(row["file"])
            if not file.is_absolute():
                file = base / file
            rows.append(ManifestRow(file=file, year=year, label=row["label"]))
    if not rows:
        raise ExporterError(f"{path}: manifest has no data rows")
    return rows


def export_images(model_id: str, manifest: str | Path, out: str | Path,
                  batch_size: int = _BATCH, device: str = "cpu") -> ExportResult:
    """One JSONL line per readable manifest image with its image embedding,
    year, and label; unreadable files are skipped with a warning."""
    from PIL import Image, UnidentifiedImageError

    rows = read_manifest(manifest)
    model, processor = load_clip(model_id, device=device)

    kept: list[ManifestRow] = []
    images = []
    skipped = 0
    for row in rows:
        try:
            with Image.open(row.file) as img:
                images.append(img.convert("RGB"))
        except (OSError, UnidentifiedImageError) as exc:
            warnings.warn(f"skipping unreadable image {row.file}: {exc}")
            skipped += 1
            continue
        kept.append(row)

    if not kept:
        raise ExporterError(f"{manifest}: no readable images in manifest")
    vectors = encode_images(model, processor, images, batch_size)
    records = [
        {"id": row.file.stem, "vec": vec.tolist(), "year": row.year,
         "label": row.label}
        for row, vec in zip(kept, vectors)
    ]
    _write_jsonl(out, records)
    return ExportResult(written=len(records), skipped=skipped)
