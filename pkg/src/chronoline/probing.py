"""Time probing: zero-shot year prediction by dot-product similarity.

The predicted year is the one whose anchor embedding has the highest raw
dot product with the query; scores are never softmaxed and ties resolve
toward the smaller year.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ChronolineError
from .store import EmbeddingSet, TimeAnchorSet


@dataclass(frozen=True)
class ProbeResult:
    id: str
    y_pred: int
    score: float
    ranked_years: tuple[tuple[int, float], ...] | None = None


def probe(query: np.ndarray, anchors: TimeAnchorSet, top_k: int = 1,
          query_id: str = "") -> ProbeResult:
    """Rank anchor years by dot product with the query vector."""
    query = np.asarray(query, dtype=np.float64)
    if top_k < 1:
        raise ChronolineError(f"top_k must be >= 1, got {top_k}")
    if len(anchors) == 0:
        raise ChronolineError("empty anchor set")
    if query.shape != (anchors.dim,):
        raise ChronolineError(
            f"query dim {query.shape} does not match anchor dim {anchors.dim}"
        )
    scores = anchors.matrix() @ query
    years = anchors.years
    # primary key: score descending; secondary: year ascending
    order = np.lexsort((years, -scores))
    top = order[: min(top_k, len(years))]
    ranked = tuple((int(years[i]), float(scores[i])) for i in top)
    return ProbeResult(
        id=query_id, y_pred=ranked[0][0], score=ranked[0][1], ranked_years=ranked
    )


def probe_batch(queries: EmbeddingSet, anchors: TimeAnchorSet,
                top_k: int = 1) -> list[ProbeResult]:
    """probe() applied to every query record, preserving input order."""
    if len(queries) and queries.dim != anchors.dim:
        raise ChronolineError(
            f"query dim {queries.dim} does not match anchor dim {anchors.dim}"
        )
    return [probe(rec.vec, anchors, top_k=top_k, query_id=rec.id) for rec in queries]
