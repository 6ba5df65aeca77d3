"""Explicit timeline: a high-degree Bezier curve through the sorted time
anchors, plus year prediction by nearest neighbour or interpolation.

The curve uses the anchors themselves (uniformly subsampled by year order)
as control points and is evaluated with de Casteljau's algorithm, whose
convex combinations stay numerically stable at degree K-1 = 199. All
closest-point queries are brute force over the N_samples discretization;
interpolation distances are measured along the curve parameter t.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable

import numpy as np

from .errors import ChronolineError
from .kpca import Projector, transform
from .store import EmbeddingSet, TimeAnchorSet

_T_CHUNK = 128  # batch curve evaluation in chunks to bound peak memory

SPACE_AMBIENT = "ambient"
SPACE_KPCA = "kpca"


def decasteljau(control_points: np.ndarray, t: float) -> np.ndarray:
    """Evaluate the Bezier curve of the control polygon at parameter t.

    Repeated convex combinations; exact at the endpoints (t=0 gives the
    first control point, t=1 the last).
    """
    points = np.asarray(control_points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ChronolineError("need at least 2 control points")
    if not 0.0 <= t <= 1.0:
        raise ChronolineError(f"t={t} outside [0, 1]")
    b = points.copy()
    for level in range(1, points.shape[0]):
        b = (1.0 - t) * b[:-1] + t * b[1:]
    return b[0]


def _decasteljau_batch(points: np.ndarray, ts: np.ndarray) -> np.ndarray:
    """decasteljau() vectorized over many parameter values."""
    k = points.shape[0]
    out = np.empty((ts.shape[0], points.shape[1]))
    for start in range(0, ts.shape[0], _T_CHUNK):
        tc = ts[start : start + _T_CHUNK, np.newaxis, np.newaxis]
        b = np.broadcast_to(points, (tc.shape[0], *points.shape)).copy()
        for level in range(1, k):
            b = (1.0 - tc) * b[:, :-1] + tc * b[:, 1:]
        out[start : start + _T_CHUNK] = b[:, 0]
    return out


def select_control_points(sorted_anchor_matrix: np.ndarray, k: int) -> np.ndarray:
    """Uniformly subsample k rows of a chronologically sorted matrix.

    Row indices are round(i*(M-1)/(k-1)); the first and last rows are
    always included.
    """
    matrix = np.asarray(sorted_anchor_matrix, dtype=np.float64)
    m = matrix.shape[0]
    if k < 2:
        raise ChronolineError(f"need at least 2 control points, got {k}")
    if k > m:
        raise ChronolineError(f"cannot select {k} control points from {m} rows")
    idx = np.rint(np.arange(k) * (m - 1) / (k - 1)).astype(int)
    return matrix[idx]


@dataclass(frozen=True)
class BezierCurve:
    control_points: np.ndarray  # (K, D)
    samples: np.ndarray         # (n_samples, D); sample j is C(j/(n_samples-1))

    def __post_init__(self):
        if self.control_points.shape[0] < 2:
            raise ChronolineError("curve needs at least 2 control points")
        if self.samples.shape[0] < self.control_points.shape[0]:
            raise ChronolineError("n_samples must be >= number of control points")
        self.control_points.setflags(write=False)
        self.samples.setflags(write=False)

    @property
    def degree(self) -> int:
        return self.control_points.shape[0] - 1

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    def param(self, sample_index: int) -> float:
        return sample_index / (self.n_samples - 1)


def sample_curve(control_points: np.ndarray, n_samples: int) -> BezierCurve:
    """Discretize the Bezier curve at t_j = j/(n_samples-1)."""
    points = np.asarray(control_points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] < 2:
        raise ChronolineError("need at least 2 control points")
    if n_samples < points.shape[0]:
        raise ChronolineError("n_samples must be >= number of control points")
    ts = np.arange(n_samples, dtype=np.float64) / (n_samples - 1)
    return BezierCurve(control_points=points, samples=_decasteljau_batch(points, ts))


@dataclass(frozen=True)
class TimelineModel:
    curve: BezierCurve
    space: str                     # SPACE_AMBIENT or SPACE_KPCA
    projector: Projector | None    # present iff space == SPACE_KPCA
    anchor_params: dict[int, float]  # year -> curve parameter t in [0, 1]
    y_min: int
    y_max: int

    def __post_init__(self):
        if self.space not in (SPACE_AMBIENT, SPACE_KPCA):
            raise ChronolineError(f"unknown space tag {self.space!r}")
        if (self.space == SPACE_KPCA) != (self.projector is not None):
            raise ChronolineError("projector must be present exactly when space is kpca")
        for y in range(self.y_min, self.y_max + 1):
            if y not in self.anchor_params:
                raise ChronolineError(f"anchor_params missing year {y}")

    @cached_property
    def _years(self) -> np.ndarray:
        return np.arange(self.y_min, self.y_max + 1)

    @cached_property
    def _anchor_ts(self) -> np.ndarray:
        return np.array([self.anchor_params[y] for y in self._years])


@dataclass(frozen=True)
class TimePrediction:
    id: str
    y_pred: float
    t_query: float
    method: str  # "nn" or "interp"


def fit_timeline(anchors: TimeAnchorSet, space: str = SPACE_KPCA,
                 projector: Projector | None = None, k: int = 200,
                 n_samples: int = 1000) -> TimelineModel:
    """Fit the Bezier timeline to an anchor set.

    Anchors are sorted by year (optionally projected through the embedded
    KPCA projector first), k of them become control points, the curve is
    discretized into n_samples points, and every anchor is assigned the
    parameter of its nearest curve sample.
    """
    if space == SPACE_KPCA:
        if projector is None:
            raise ChronolineError("space 'kpca' requires a fitted projector")
        if projector.input_dim != anchors.dim:
            raise ChronolineError(
                f"projector dim {projector.input_dim} does not match anchors dim {anchors.dim}"
            )
        coords = np.stack(
            [transform(projector, anchors.anchors[y]) for y in anchors.years]
        )
    elif space == SPACE_AMBIENT:
        if projector is not None:
            raise ChronolineError("space 'ambient' does not take a projector")
        coords = anchors.matrix()
    else:
        raise ChronolineError(f"unknown space tag {space!r}")

    control = select_control_points(coords, k)
    curve = sample_curve(control, n_samples)
    params = {
        int(y): curve.param(_nearest_sample(curve.samples, coords[i]))
        for i, y in enumerate(anchors.years)
    }
    return TimelineModel(
        curve=curve,
        space=space,
        projector=projector,
        anchor_params=params,
        y_min=anchors.y_min,
        y_max=anchors.y_max,
    )


def _nearest_sample(samples: np.ndarray, point: np.ndarray) -> int:
    diff = samples - point
    # argmin returns the first minimum, i.e. the smaller t on exact ties
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def map_to_curve(model: TimelineModel, query: np.ndarray) -> float:
    """Curve parameter t of the query's nearest discretized curve point."""
    q = np.asarray(query, dtype=np.float64)
    if model.space == SPACE_KPCA:
        q = transform(model.projector, q)
    elif q.shape != (model.curve.samples.shape[1],):
        raise ChronolineError(
            f"query dim {q.shape} does not match curve dim {model.curve.samples.shape[1]}"
        )
    return model.curve.param(_nearest_sample(model.curve.samples, q))


def predict_nn(model: TimelineModel, query: np.ndarray,
               query_id: str = "") -> TimePrediction:
    """Assign the year whose anchor parameter is closest to the query's t."""
    t = map_to_curve(model, query)
    dist = np.abs(model._anchor_ts - t)
    year = int(model._years[int(np.argmin(dist))])  # first min = smaller year
    return TimePrediction(id=query_id, y_pred=float(year), t_query=t, method="nn")


def predict_interp(model: TimelineModel, query: np.ndarray,
                   query_id: str = "") -> TimePrediction:
    """Interpolate between the straddling anchors in parameter space.

    With t_before the largest anchor parameter <= t and t_after the
    smallest >= t, the prediction is (1-w)*y_before + w*y_after where
    w = d_before/(d_before + d_after). Outside the anchor parameter range
    the extreme anchor's year is returned; so is the exact year when both
    distances vanish. Year ties at equal parameters resolve to the
    smallest year.
    """
    t = map_to_curve(model, query)
    ts = model._anchor_ts
    years = model._years

    below = ts <= t
    above = ts >= t
    if not below.any():
        year = years[int(np.argmin(ts))]
        return TimePrediction(id=query_id, y_pred=float(year), t_query=t, method="interp")
    if not above.any():
        year = years[int(np.argmax(ts))]
        return TimePrediction(id=query_id, y_pred=float(year), t_query=t, method="interp")

    t_before = ts[below].max()
    t_after = ts[above].min()
    # smallest year attaining each straddling parameter
    y_before = int(years[below][np.argmax(ts[below] == t_before)])
    y_after = int(years[above][np.argmax(ts[above] == t_after)])
    d_before = t - t_before
    d_after = t_after - t
    if d_before == 0.0 and d_after == 0.0:
        return TimePrediction(id=query_id, y_pred=float(y_before), t_query=t, method="interp")
    w = d_before / (d_before + d_after)
    y_pred = (1.0 - w) * y_before + w * y_after
    return TimePrediction(id=query_id, y_pred=float(y_pred), t_query=t, method="interp")


def predict_batch(model: TimelineModel, queries: EmbeddingSet,
                  method: str = "interp") -> list[TimePrediction]:
    """Predict every query record in input order."""
    if method == "nn":
        fn = predict_nn
    elif method == "interp":
        fn = predict_interp
    else:
        raise ChronolineError(f"unknown inference method {method!r}")
    return [fn(model, rec.vec, query_id=rec.id) for rec in queries]


def save_model(model: TimelineModel, path: str | Path) -> None:
    """Write the model (and any embedded projector) as round-trippable JSON."""
    payload: dict = {
        "space": model.space,
        "y_min": model.y_min,
        "y_max": model.y_max,
        "n_samples": model.curve.n_samples,
        "control_points": model.curve.control_points.tolist(),
        "anchor_params": {str(y): t for y, t in model.anchor_params.items()},
        "projector": None,
    }
    if model.projector is not None:
        proj = model.projector
        payload["projector"] = {
            "kernel": proj.kernel,
            "s_dim": proj.s_dim,
            "training_vectors": proj.training_vectors.tolist(),
            "eigvals": proj.eigvals.tolist(),
            "eigvecs": proj.eigvecs.tolist(),
            "row_mean": proj.row_mean.tolist(),
            "total_mean": proj.total_mean,
        }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, allow_nan=False)
        fh.write("\n")


def load_model(path: str | Path) -> TimelineModel:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ChronolineError(f"{path}: malformed model file: {exc}") from exc
    try:
        projector = None
        if payload["projector"] is not None:
            p = payload["projector"]
            projector = Projector(
                training_vectors=np.asarray(p["training_vectors"], dtype=np.float64),
                kernel=p["kernel"],
                eigvals=np.asarray(p["eigvals"], dtype=np.float64),
                eigvecs=np.asarray(p["eigvecs"], dtype=np.float64),
                s_dim=int(p["s_dim"]),
                row_mean=np.asarray(p["row_mean"], dtype=np.float64),
                total_mean=float(p["total_mean"]),
            )
        curve = sample_curve(
            np.asarray(payload["control_points"], dtype=np.float64),
            int(payload["n_samples"]),
        )
        return TimelineModel(
            curve=curve,
            space=payload["space"],
            projector=projector,
            anchor_params={int(y): float(t) for y, t in payload["anchor_params"].items()},
            y_min=int(payload["y_min"]),
            y_max=int(payload["y_max"]),
        )
    except (KeyError, TypeError) as exc:
        raise ChronolineError(f"{path}: incomplete model file: {exc}") from exc
