"""Evaluation metrics: MAE, time-adaptive accuracy (TAI), and the three
ranking scores (Spearman rho, Kendall tau, delta_MNDL).

The ranking scores all live in [-1, 1]: 1 for perfect chronological order,
-1 for a fully reversed one. delta_MNDL is defined as ``1 - 2*S/M`` where S
is the minimum number of adjacent swaps between the two orderings and
``M = N*(N-1)/2``; for tie-free inputs Kendall's tau coincides with it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import ChronolineError


@dataclass(frozen=True)
class TaiConfig:
    """Year-dependent tolerance/intolerance thresholds, linear in the year.

    T(y) and I(y) interpolate between their values at y_min and y_max; an
    absolute error <= T scores 1, >= I scores 0, and in between the score
    falls off as 1 - err/I.
    """

    t_at_ymin: float = 20.0
    i_at_ymin: float = 50.0
    t_at_ymax: float = 5.0
    i_at_ymax: float = 15.0
    y_min: int = 1700
    y_max: int = 2024

    def __post_init__(self):
        if self.y_max < self.y_min:
            raise ChronolineError("TaiConfig: y_max < y_min")
        for t, i, side in (
            (self.t_at_ymin, self.i_at_ymin, "y_min"),
            (self.t_at_ymax, self.i_at_ymax, "y_max"),
        ):
            if not 0.0 <= t < i:
                raise ChronolineError(
                    f"TaiConfig: need 0 <= T < I at {side}, got T={t}, I={i}"
                )

    def thresholds(self, year: float) -> tuple[float, float]:
        """(T(y), I(y)) at a (possibly fractional) year, clamped to the range."""
        y = min(max(year, self.y_min), self.y_max)
        span = self.y_max - self.y_min
        u = 0.0 if span == 0 else (y - self.y_min) / span
        t = self.t_at_ymin + u * (self.t_at_ymax - self.t_at_ymin)
        i = self.i_at_ymin + u * (self.i_at_ymax - self.i_at_ymin)
        return t, i


def mae(preds: Sequence[float], truths: Sequence[float]) -> float:
    """Mean absolute deviation between predicted and true years."""
    preds = np.asarray(preds, dtype=np.float64)
    truths = np.asarray(truths, dtype=np.float64)
    if preds.shape != truths.shape:
        raise ChronolineError(f"length mismatch: {preds.shape} vs {truths.shape}")
    if preds.size == 0:
        raise ChronolineError("mae of empty input")
    return float(np.mean(np.abs(preds - truths)))


def tai(pred: float, truth: float, cfg: TaiConfig | None = None) -> float:
    """Piecewise time-adaptive accuracy of one prediction (in [0, 1])."""
    cfg = cfg or TaiConfig()
    t, i = cfg.thresholds(truth)
    err = abs(pred - truth)
    if err <= t:
        return 1.0
    if err >= i:
        return 0.0
    return 1.0 - err / i


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Fractional ranks starting at 1; exact ties share the average rank."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(order_a: Sequence[float], order_b: Sequence[float]) -> float:
    """Spearman's rank correlation: Pearson correlation of average ranks."""
    a = np.asarray(order_a, dtype=np.float64)
    b = np.asarray(order_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ChronolineError("spearman: length mismatch")
    if a.size < 2:
        raise ChronolineError("spearman needs at least 2 observations")
    ra = _average_ranks(a) - (a.size + 1) / 2.0
    rb = _average_ranks(b) - (b.size + 1) / 2.0
    va = float(ra @ ra)
    vb = float(rb @ rb)
    if va == 0.0 or vb == 0.0:
        raise ChronolineError("spearman undefined: zero rank variance")
    return float((ra @ rb) / np.sqrt(va * vb))


def count_inversions(seq: Sequence[float]) -> int:
    """Number of pairs i<j with seq[i] > seq[j], by merge sort (ties excluded)."""
    seq = list(seq)
    if len(seq) < 2:
        return 0

    def merge_count(items: list) -> tuple[list, int]:
        if len(items) <= 1:
            return items, 0
        mid = len(items) // 2
        left, nl = merge_count(items[:mid])
        right, nr = merge_count(items[mid:])
        merged: list = []
        count = nl + nr
        i = j = 0
        while i < len(left) and j < len(right):
            if right[j] < left[i]:
                count += len(left) - i
                merged.append(right[j])
                j += 1
            else:
                merged.append(left[i])
                i += 1
        merged.extend(left[i:])
        merged.extend(right[j:])
        return merged, count

    return merge_count(seq)[1]


def kendall(order_a: Sequence[float], order_b: Sequence[float]) -> float:
    """Kendall's tau-a: (concordant - discordant) / (n*(n-1)/2).

    order_a must be tie-free; exact ties in order_b count as neither
    concordant nor discordant.
    """
    a = np.asarray(order_a, dtype=np.float64)
    b = np.asarray(order_b, dtype=np.float64)
    if a.shape != b.shape:
        raise ChronolineError("kendall: length mismatch")
    n = a.size
    if n < 2:
        raise ChronolineError("kendall needs at least 2 observations")
    if len(np.unique(a)) != n:
        raise ChronolineError("kendall: first ordering has tied values")
    b_by_a = b[np.argsort(a, kind="stable")]
    discordant = count_inversions(b_by_a)
    _, counts = np.unique(b_by_a, return_counts=True)
    tied = int(np.sum(counts * (counts - 1) // 2))
    m = n * (n - 1) // 2
    concordant = m - discordant - tied
    return (concordant - discordant) / m


def mndl(predicted_order: Sequence, true_order: Sequence) -> float:
    """Modified normalised Damerau-Levenshtein score 1 - 2*S/M.

    S is the minimum number of adjacent swaps turning predicted_order into
    true_order (the inversion count of the composed permutation), and
    M = N*(N-1)/2 is the worst case.
    """
    predicted = list(predicted_order)
    true = list(true_order)
    n = len(true)
    if n < 2:
        raise ChronolineError("mndl needs at least 2 elements")
    position = {}
    for idx, item in enumerate(true):
        if item in position:
            raise ChronolineError(f"true order repeats element {item!r}")
        position[item] = idx
    if len(predicted) != n or set(position) != set(predicted):
        raise ChronolineError("inputs are not permutations of each other")
    swaps = count_inversions([position[item] for item in predicted])
    m = n * (n - 1) // 2
    # (m - 2s)/m rather than 1 - 2s/m: single rounding, bit-identical to the
    # (concordant - discordant)/m form kendall uses on permutations
    return (m - 2 * swaps) / m


def ranking_metrics(coord_by_year: Mapping[int, float]) -> dict[str, float]:
    """Chronological-order quality of a year -> 1D coordinate map.

    Returns rho/tau/mndl of the coordinate ordering against ascending years;
    mndl breaks coordinate ties toward the earlier year.
    """
    years = sorted(coord_by_year)
    coords = [float(coord_by_year[y]) for y in years]
    by_coord = [y for _, y in sorted(zip(coords, years))]
    return {
        "rho": spearman(years, coords),
        "tau": kendall(years, coords),
        "mndl": mndl(by_coord, years),
    }


@dataclass(frozen=True)
class EvalReport:
    mae: float
    tai: float
    n: int
    per_label: dict[str, dict] = field(default_factory=dict)
    ranking: dict[str, float] | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "mae": self.mae,
            "tai": self.tai,
            "per_label": self.per_label,
            "ranking": self.ranking,
        }


def evaluate(preds, truths, cfg: TaiConfig | None = None,
             anchor_coords: Mapping[int, float] | None = None) -> EvalReport:
    """Score predictions against ground-truth years, overall and per label.

    ``preds`` is any sequence of objects with ``id`` and ``y_pred``
    attributes; every id must resolve to a record in ``truths`` carrying a
    year. ``anchor_coords`` optionally adds ranking metrics for a timeline's
    year -> coordinate ordering.
    """
    cfg = cfg or TaiConfig()
    by_id = {rec.id: rec for rec in truths}
    rows: list[tuple[str | None, float, float, int]] = []
    for pred in preds:
        rec = by_id.get(pred.id)
        if rec is None:
            raise ChronolineError(f"prediction id {pred.id!r} not found in truth set")
        if rec.year is None:
            raise ChronolineError(f"record {rec.id!r} has no ground-truth year")
        err = abs(float(pred.y_pred) - rec.year)
        rows.append((rec.label, err, tai(float(pred.y_pred), rec.year, cfg), rec.year))
    if not rows:
        raise ChronolineError("no predictions to evaluate")

    errs = np.array([r[1] for r in rows])
    tais = np.array([r[2] for r in rows])
    per_label: dict[str, dict] = {}
    for label in sorted({r[0] for r in rows if r[0] is not None}):
        grp = [r for r in rows if r[0] == label]
        years = [r[3] for r in grp]
        per_label[label] = {
            "mae": float(np.mean([r[1] for r in grp])),
            "tai": float(np.mean([r[2] for r in grp])),
            "n": len(grp),
            "year_range": [min(years), max(years)],
        }

    ranking = ranking_metrics(anchor_coords) if anchor_coords is not None else None
    return EvalReport(
        mae=float(np.mean(errs)),
        tai=float(np.mean(tais)),
        n=len(rows),
        per_label=per_label,
        ranking=ranking,
    )
