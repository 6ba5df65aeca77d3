"""Ground-truth generator: a known chronological 1D manifold embedded in
high-dimensional space, for oracle-based testing.

Years map to a parameter u in [0, 1], u picks a point on a low-dimensional
curve, and a seeded random orthonormal frame carries that point into R^N.
Before embedding, the 3D curve point is lifted to 4D with a constant first
coordinate. The lift keeps every curve point away from the origin (the
plain line passes through it at u=0, where normalization is undefined) and
cancels in differences, so pairwise distances still match the 3D curve
exactly. The frame therefore needs dim >= 4 for every curve kind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChronolineError
from .store import EmbeddingRecord, EmbeddingSet, TimeAnchorSet, normalize

CURVE_KINDS = ("line", "helix", "s-curve")


@dataclass(frozen=True)
class SyntheticSpec:
    dim: int = 512
    y_min: int = 1700
    y_max: int = 2024
    curve_kind: str = "helix"
    noise_sigma: float = 0.0
    queries_per_year: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.curve_kind not in CURVE_KINDS:
            raise ChronolineError(
                f"curve_kind must be one of {CURVE_KINDS}, got {self.curve_kind!r}"
            )
        if self.dim < 4:
            raise ChronolineError(f"dim must be >= 4, got {self.dim}")
        if self.y_max <= self.y_min:
            raise ChronolineError(f"need y_max > y_min, got [{self.y_min}, {self.y_max}]")
        if self.noise_sigma < 0:
            raise ChronolineError(f"noise_sigma must be >= 0, got {self.noise_sigma}")
        if self.queries_per_year < 0:
            raise ChronolineError(
                f"queries_per_year must be >= 0, got {self.queries_per_year}"
            )


def base_curve(kind: str, u: np.ndarray) -> np.ndarray:
    """3D curve points for parameters u in [0, 1], shape (len(u), 3).

    line: (u, 0, 0); helix: (cos 4pi*u, sin 4pi*u, u), two full windings so
    no linear functional can order it; s-curve: (u, tanh(6u - 3), 0).
    """
    u = np.asarray(u, dtype=np.float64)
    zero = np.zeros_like(u)
    if kind == "line":
        return np.stack([u, zero, zero], axis=1)
    if kind == "helix":
        return np.stack([np.cos(4 * np.pi * u), np.sin(4 * np.pi * u), u], axis=1)
    if kind == "s-curve":
        return np.stack([u, np.tanh(6.0 * u - 3.0), zero], axis=1)
    raise ChronolineError(f"unknown curve kind {kind!r}")


def random_orthonormal_frame(dim: int, cols: int, rng: np.random.Generator) -> np.ndarray:
    """(dim, cols) matrix with orthonormal columns, deterministic per rng state."""
    if cols > dim:
        raise ChronolineError(f"cannot fit {cols} orthonormal columns in R^{dim}")
    q, r = np.linalg.qr(rng.standard_normal((dim, cols)))
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0  # fix the QR sign ambiguity
    return q * signs


def generate(spec: SyntheticSpec) -> tuple[TimeAnchorSet, EmbeddingSet]:
    """Anchors = exact curve points, normalized; queries = noisy copies.

    Noise is drawn for every query regardless of sigma, so the rng stream
    (and with it every output) depends only on the SyntheticSpec fields, and
    sigma=0 yields queries bitwise equal to their year's anchor.
    """
    rng = np.random.default_rng(spec.seed)
    frame = random_orthonormal_frame(spec.dim, 4, rng)

    years = np.arange(spec.y_min, spec.y_max + 1)
    u = (years - spec.y_min) / (spec.y_max - spec.y_min)
    lifted = np.concatenate(
        [np.ones((years.size, 1)), base_curve(spec.curve_kind, u)], axis=1
    )
    embedded = lifted @ frame.T  # (n_years, dim)

    anchors = TimeAnchorSet(
        y_min=spec.y_min,
        y_max=spec.y_max,
        anchors={int(y): normalize(embedded[i]) for i, y in enumerate(years)},
    )

    records = []
    for i, y in enumerate(years):
        for k in range(spec.queries_per_year):
            noisy = embedded[i] + spec.noise_sigma * rng.standard_normal(spec.dim)
            records.append(
                EmbeddingRecord(
                    id=f"q-{y}-{k}",
                    vec=normalize(noisy),
                    year=int(y),
                    label=spec.curve_kind,
                )
            )
    return anchors, EmbeddingSet(dim=spec.dim, records=tuple(records))
