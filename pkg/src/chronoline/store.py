"""Data model and file I/O for embeddings, time anchors and 1D projections.

Embeddings travel as JSON Lines (one ``{"id", "year"?, "label"?, "vec"}``
object per line); external one-dimensional projections as ``year,value`` CSV.
All floats are serialized with shortest round-trip decimals, so a
save/load cycle reproduces vectors exactly.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

import numpy as np

from .errors import ChronolineError

# Vectors whose L2 norm is already this close to 1 pass through normalize()
# unchanged, which makes normalization idempotent bit-for-bit.
_UNIT_TOL = 1e-12


def normalize(vec: np.ndarray) -> np.ndarray:
    """Scale a vector to unit L2 norm; idempotent within _UNIT_TOL."""
    vec = np.asarray(vec, dtype=np.float64)
    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        raise ChronolineError("cannot normalize a zero-norm vector")
    if abs(norm - 1.0) <= _UNIT_TOL:
        return vec.copy()
    return vec / norm


@dataclass(frozen=True)
class EmbeddingRecord:
    id: str
    vec: np.ndarray
    year: int | None = None
    label: str | None = None

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=np.float64)
        if vec.ndim != 1 or vec.shape[0] < 2:
            raise ChronolineError(
                f"record {self.id!r}: vec must be 1-D with at least 2 entries"
            )
        if not np.all(np.isfinite(vec)):
            raise ChronolineError(f"record {self.id!r}: vec has non-finite entries")
        vec.setflags(write=False)
        object.__setattr__(self, "vec", vec)


@dataclass(frozen=True)
class EmbeddingSet:
    """Ordered collection of records sharing one dimension N."""

    dim: int
    records: tuple[EmbeddingRecord, ...]

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        seen: set[str] = set()
        for rec in self.records:
            if rec.vec.shape[0] != self.dim:
                raise ChronolineError(
                    f"record {rec.id!r} has dim {rec.vec.shape[0]}, expected {self.dim}"
                )
            if rec.id in seen:
                raise ChronolineError(f"duplicate id {rec.id!r}")
            seen.add(rec.id)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> Iterator[EmbeddingRecord]:
        return iter(self.records)

    def matrix(self) -> np.ndarray:
        if not self.records:
            return np.empty((0, self.dim))
        return np.stack([rec.vec for rec in self.records])


@dataclass(frozen=True)
class TimeAnchorSet:
    """One anchor vector per year over a contiguous range [y_min, y_max]."""

    y_min: int
    y_max: int
    anchors: dict[int, np.ndarray]

    def __post_init__(self):
        if self.y_max < self.y_min:
            raise ChronolineError(f"y_max {self.y_max} < y_min {self.y_min}")
        expected = range(self.y_min, self.y_max + 1)
        missing = [y for y in expected if y not in self.anchors]
        if missing:
            raise ChronolineError(f"missing anchor for year {missing[0]}")
        if len(self.anchors) != len(expected):
            extra = sorted(set(self.anchors) - set(expected))
            raise ChronolineError(f"anchor year {extra[0]} outside range")
        anchors = {y: np.asarray(self.anchors[y], dtype=np.float64) for y in expected}
        dims = {v.shape[0] for v in anchors.values()}
        if len(dims) != 1:
            raise ChronolineError(f"anchor vectors mix dimensions {sorted(dims)}")
        for v in anchors.values():
            v.setflags(write=False)
        object.__setattr__(self, "anchors", anchors)

    @property
    def dim(self) -> int:
        return self.anchors[self.y_min].shape[0]

    def __len__(self) -> int:
        return self.y_max - self.y_min + 1

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.y_min, self.y_max + 1)

    def matrix(self) -> np.ndarray:
        """Anchor vectors stacked in ascending-year order."""
        return np.stack([self.anchors[y] for y in range(self.y_min, self.y_max + 1)])


@dataclass(frozen=True)
class ExternalProjection1D:
    """Year -> 1D coordinate map produced by an external projector."""

    values: dict[int, float]

    def __post_init__(self):
        if not self.values:
            raise ChronolineError("projection is empty")
        years = sorted(self.values)
        if years[-1] - years[0] + 1 != len(years):
            raise ChronolineError("projection years are not contiguous")
        vals = {y: float(self.values[y]) for y in years}
        bad = [y for y, v in vals.items() if not math.isfinite(v)]
        if bad:
            raise ChronolineError(f"projection value for year {bad[0]} is not finite")
        object.__setattr__(self, "values", vals)


def load_embeddings(path: str | Path, normalize_vectors: bool = True) -> EmbeddingSet:
    """Read a JSONL embedding file; optionally rescale vectors to unit norm."""
    records: list[EmbeddingRecord] = []
    seen: set[str] = set()
    dim: int | None = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ChronolineError(f"{path}:{lineno}: malformed JSON: {exc}") from exc
            try:
                rec_id = obj["id"]
                vec = np.asarray(obj["vec"], dtype=np.float64)
            except (KeyError, TypeError, ValueError) as exc:
                raise ChronolineError(f"{path}:{lineno}: missing or bad field: {exc}") from exc
            if vec.ndim != 1:
                raise ChronolineError(f"{path}:{lineno}: vec must be a flat array")
            if rec_id in seen:
                raise ChronolineError(f"{path}:{lineno}: duplicate id {rec_id!r}")
            seen.add(rec_id)
            if dim is None:
                dim = vec.shape[0]
            elif vec.shape[0] != dim:
                raise ChronolineError(
                    f"{path}:{lineno}: dimension mismatch (expected {dim}, got {vec.shape[0]})"
                )
            if normalize_vectors:
                try:
                    vec = normalize(vec)
                except ChronolineError as exc:
                    raise ChronolineError(f"{path}:{lineno}: {exc}") from exc
            year = obj.get("year")
            if year is not None and not isinstance(year, int):
                raise ChronolineError(f"{path}:{lineno}: year must be an integer")
            label = obj.get("label")
            try:
                records.append(EmbeddingRecord(id=rec_id, vec=vec, year=year, label=label))
            except ChronolineError as exc:
                raise ChronolineError(f"{path}:{lineno}: {exc}") from exc
    if dim is None:
        raise ChronolineError(f"{path}: no records")
    return EmbeddingSet(dim=dim, records=tuple(records))


def save_embeddings(embeddings: EmbeddingSet, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for rec in embeddings:
            obj: dict = {"id": rec.id}
            if rec.year is not None:
                obj["year"] = rec.year
            if rec.label is not None:
                obj["label"] = rec.label
            obj["vec"] = rec.vec.tolist()
            fh.write(json.dumps(obj, allow_nan=False) + "\n")


def to_anchor_set(embeddings: EmbeddingSet, y_min: int, y_max: int) -> TimeAnchorSet:
    """Key records by year; every year in [y_min, y_max] must appear once."""
    anchors: dict[int, np.ndarray] = {}
    for rec in embeddings:
        if rec.year is None:
            raise ChronolineError(f"record {rec.id!r} has no year field")
        if rec.year < y_min or rec.year > y_max:
            continue
        if rec.year in anchors:
            raise ChronolineError(f"duplicate anchor for year {rec.year}")
        anchors[rec.year] = rec.vec
    return TimeAnchorSet(y_min=y_min, y_max=y_max, anchors=anchors)


def anchors_to_embedding_set(anchor_set: TimeAnchorSet) -> EmbeddingSet:
    """View a TimeAnchorSet as an EmbeddingSet (ids ``year-<y>``), for saving."""
    records = tuple(
        EmbeddingRecord(id=f"year-{y}", vec=anchor_set.anchors[y], year=int(y))
        for y in range(anchor_set.y_min, anchor_set.y_max + 1)
    )
    return EmbeddingSet(dim=anchor_set.dim, records=records)


def load_projection_1d(path: str | Path) -> ExternalProjection1D:
    """Read a ``year,value`` CSV into an ExternalProjection1D."""
    values: dict[int, float] = {}
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["year", "value"]:
            raise ChronolineError(f"{path}: expected header 'year,value'")
        for rownum, row in enumerate(reader, start=2):
            try:
                year = int(row["year"])
                value = float(row["value"])
            except (TypeError, ValueError) as exc:
                raise ChronolineError(f"{path}:{rownum}: bad row: {exc}") from exc
            if not math.isfinite(value):
                raise ChronolineError(f"{path}:{rownum}: value is not finite")
            if year in values:
                raise ChronolineError(f"{path}:{rownum}: duplicate year {year}")
            values[year] = value
    return ExternalProjection1D(values=values)
